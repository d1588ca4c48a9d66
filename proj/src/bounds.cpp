#include "loccache/bounds.hpp"

#include <algorithm>
#include <stdexcept>

namespace loccache {

std::string label_name(PointLabel label) {
  switch (label) {
    case PointLabel::kAchievable:
      return "ACHIEVABLE";
    case PointLabel::kOptUncoded:
      return "OPT_UNCODED";
    case PointLabel::kCutset:
      return "CUTSET";
    case PointLabel::kMultiaccessOpt:
      return "MULTIACCESS_OPT";
    case PointLabel::kLp:
      return "LP";
  }
  return "UNKNOWN";
}

namespace {

void check_memory(const ProblemInstance& inst) {
  if (inst.M() < 0 || inst.M() > inst.max_memory()) throw std::invalid_argument("M out of range");
}

}  // namespace

Rational rstar_u(const ProblemInstance& inst) {
  check_memory(inst);
  const Rational K(inst.K()), a(inst.a()), b(inst.b()), M = inst.M();
  if (inst.coded_regime()) {
    if (M <= a + b) return K - (K + 1) * M / (2 * (a + b));
    return (K - 1) * (2 * a + b) / (2 * a) - (K - 1) * M / (2 * a);
  }
  return K - K * M / (2 * a + b);
}

Rational man_load(int K, int t) {
  if (K < 1) throw std::invalid_argument("K must be positive");
  if (t < 0 || t > K) throw std::invalid_argument("t must lie in [0, K]");
  return make_rational(K - t, t + 1);
}

Rational cutset_bound(const ProblemInstance& inst) {
  check_memory(inst);
  const Rational a(inst.a()), b(inst.b()), M = inst.M();
  const int K = inst.K();
  const Rational s(K % 2 == 0 ? K : K - 1);
  return rational_max(Rational(0), s / 2 - s * M / (2 * (2 * a + b)));
}

Rational rstar_multiaccess(const ProblemInstance& inst) {
  if (inst.L() < 2) throw std::invalid_argument("multiaccess load requires L >= 2");
  check_memory(inst);
  const Rational K(inst.K());
  return rational_max(Rational(0), K - K * inst.M() / Rational(inst.a() + inst.b()));
}

std::vector<Rational> memory_grid(const Rational& lo, const Rational& hi, int steps) {
  if (steps < 2) throw std::invalid_argument("grid needs at least 2 points");
  if (hi < lo) throw std::invalid_argument("grid endpoints out of order");
  std::vector<Rational> out;
  for (int i = 0; i < steps; ++i) out.push_back(lo + (hi - lo) * Rational(i) / Rational(steps - 1));
  return out;
}

std::vector<Rational> breakpoints(const ProblemInstance& inst) {
  std::vector<Rational> pts{Rational(0)};
  if (inst.coded_regime()) pts.emplace_back(inst.a() + inst.b());
  pts.push_back(inst.max_memory());
  return pts;
}

std::vector<Rational> regime_grid(const ProblemInstance& inst, int per_piece) {
  auto bp = breakpoints(inst);
  std::vector<Rational> out;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    for (const auto& m : memory_grid(bp[i], bp[i + 1], per_piece)) {
      if (out.empty() || out.back() != m) out.push_back(m);
    }
  }
  return out;
}

GapResult gap_check(const ProblemInstance& inst) {
  GapResult g;
  g.bound = inst.K() % 2 == 0 ? 2 : 3;
  const std::vector<Rational> corners{Rational(0), Rational(inst.a() + inst.b()), inst.max_memory()};
  std::vector<Rational> pts = corners;
  for (std::size_t i = 0; i + 1 < corners.size(); ++i) {
    if (corners[i] == corners[i + 1]) continue;
    for (const auto& m : memory_grid(corners[i], corners[i + 1], 11)) pts.push_back(m);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  bool first = true;
  for (const auto& m : pts) {
    auto at = inst.with_memory(m);
    Rational cut = cutset_bound(at);
    if (cut == 0) continue;
    Rational r = rstar_u(at) / cut;
    if (m == 0) g.ratio_at_zero = r;
    if (first || r > g.ratio) g.ratio = r;
    first = false;
    ++g.points;
  }
  g.pass = g.ratio <= g.bound;
  return g;
}

}  // namespace loccache
