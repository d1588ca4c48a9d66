#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "loccache/bounds.hpp"
#include "loccache/certificate.hpp"
#include "loccache/converse.hpp"
#include "loccache/errors.hpp"
#include "loccache/symmetry.hpp"

using namespace loccache;

namespace {

ProblemInstance inst(int K, int a, int b, int L = 1, Rational M = 0) {
  return ProblemInstance::create(K, a, b, L, M);
}

Rational q(const char* s) { return parse_rational(s); }

NodeMask permute(const std::vector<int>& pi, NodeMask T) {
  NodeMask out = 0;
  for (int k = 1; k <= static_cast<int>(pi.size()); ++k) {
    if (T & node_bit(k)) out |= node_bit(pi[static_cast<std::size_t>(k - 1)]);
  }
  return out;
}

// Orbit count by brute force over every node permutation that maps the
// multiset of demander sets onto itself; files with equal demander sets are
// interchangeable, so (f, T) ~ (f', pi(T)) whenever demanders(f') = pi(demanders(f)).
int orbit_oracle(const DemandStructure& ds) {
  const int K = ds.K();
  const int N = ds.N();
  std::map<NodeMask, int> sig_count;
  for (int f = 1; f <= N; ++f) ++sig_count[ds.demanders(f)];
  std::vector<std::vector<int>> group;
  std::vector<int> pi(static_cast<std::size_t>(K));
  std::iota(pi.begin(), pi.end(), 1);
  do {
    bool ok = true;
    for (const auto& [sig, count] : sig_count) {
      auto it = sig_count.find(permute(pi, sig));
      if (it == sig_count.end() || it->second != count) ok = false;
    }
    if (ok) group.push_back(pi);
  } while (std::next_permutation(pi.begin(), pi.end()));

  const std::size_t masks = std::size_t{1} << K;
  std::vector<int> orbit(static_cast<std::size_t>(N) * masks, -1);
  int next = 0;
  for (int f = 1; f <= N; ++f) {
    for (NodeMask T = 0; T < masks; ++T) {
      auto& slot = orbit[static_cast<std::size_t>(f - 1) * masks + T];
      if (slot >= 0) continue;
      for (const auto& g : group) {
        const NodeMask sig = permute(g, ds.demanders(f));
        for (int h = 1; h <= N; ++h) {
          if (ds.demanders(h) == sig) orbit[static_cast<std::size_t>(h - 1) * masks + permute(g, T)] = next;
        }
      }
      ++next;
    }
  }
  return next;
}

}  // namespace

TEST_CASE("orbit counts") {
  const std::vector<std::tuple<int, int, int, int>> cases{
      {3, 2, 1, 12}, {4, 1, 1, 22}, {3, 1, 1, 12}, {2, 1, 1, 7}, {4, 1, 2, 22}};
  for (auto [K, a, b, expected] : cases) {
    auto ds = build_demand_structure(inst(K, a, b));
    auto orbits = variable_orbits(ds);
    const int count = *std::max_element(orbits.begin(), orbits.end()) + 1;
    CHECK(count == expected);
    CHECK(count == orbit_oracle(ds));
  }
  auto ds = build_demand_structure(inst(4, 1, 1));
  CHECK(variable_orbits(ds).size() + 1 == 129);
}

TEST_CASE("generators preserve demand sets") {
  for (auto [K, a, b] : {std::tuple{2, 1, 1}, std::tuple{3, 2, 1}, std::tuple{5, 1, 2}}) {
    auto ds = build_demand_structure(inst(K, a, b));
    for (const auto& g : instance_symmetries(ds)) {
      for (int f = 1; f <= ds.N(); ++f) {
        CHECK(ds.demanders(g.file_map[static_cast<std::size_t>(f - 1)]) == apply_to_mask(g, ds.demanders(f)));
      }
    }
  }
}

TEST_CASE("symmetrized LP keeps the optimum") {
  for (auto [K, a, b, M] : {std::tuple{3, 2, 1, "3"}, std::tuple{3, 2, 1, "4"}, std::tuple{2, 1, 1, "1"},
                            std::tuple{3, 1, 1, "1"}, std::tuple{4, 1, 1, "2"}}) {
    auto p = inst(K, a, b, 1, q(M));
    auto ds = build_demand_structure(p);
    auto lp = build_lp(p, ds, full_family(ds));
    auto raw = solve_lp(lp);
    auto sym = symmetrize(lp, ds);
    auto reduced = solve_lp(sym.lp);
    REQUIRE(reduced.status == LpStatus::kOptimal);
    CHECK(reduced.objective == raw.objective);
    CHECK(sym.lp.num_vars == sym.orbit_count + 1);
    CHECK(sym.lp.rows.size() < lp.rows.size());
  }
}

TEST_CASE("symmetrize rejects a family that is not closed") {
  auto p = inst(3, 2, 1, 1, 3);
  auto ds = build_demand_structure(p);
  std::vector<LinearInequality> one{genie_inequality(ds, make_demand(ds, {1, 6, 7}), {1, 3, 2})};
  auto lp = build_lp(p, ds, one);
  try {
    symmetrize(lp, ds);
    FAIL("expected an invariant violation");
  } catch (const InvariantViolation& e) {
    CHECK(e.invariant() == "symmetry-closed");
  }
}

TEST_CASE("certificates for (3,2,1)") {
  auto p = inst(3, 2, 1);
  auto ds = build_demand_structure(p);

  auto high = certificate_check(p, ds, Regime::kHighM);
  CHECK(high.pass);
  CHECK(high.constant == q("5/2"));
  CHECK(high.slope == q("1/2"));
  CHECK(high.w_shared == q("1/3"));
  CHECK(high.w_memory == q("1/6"));
  CHECK(high.matches_rstar);
  CHECK(high.min_residual >= 0);

  auto low = certificate_check(p, ds, Regime::kLowM);
  CHECK(low.pass);
  CHECK(low.gate_weight == q("2/3"));
  CHECK(low.constant == 3);
  CHECK(low.slope == q("2/3"));

  CHECK_THROWS_AS(certificate_check(p, ds, Regime::kLargeB), RegimeMismatch);
}

TEST_CASE("certificate for (4,1,2)") {
  auto p = inst(4, 1, 2);
  auto ds = build_demand_structure(p);
  auto large = certificate_check(p, ds, Regime::kLargeB);
  CHECK(large.pass);
  CHECK(large.gate_weight == q("2/3"));
  CHECK(large.constant == 4);
  CHECK(large.slope == 1);
  CHECK_THROWS_AS(certificate_check(p, ds, Regime::kHighM), RegimeMismatch);
  CHECK_THROWS_AS(certificate_check(p, ds, Regime::kLowM), RegimeMismatch);
  CHECK(large.to_json(4).find("\"LARGE_B\"") != std::string::npos);
}

TEST_CASE("certificates pass exactly on their regime") {
  for (int K = 2; K <= 5; ++K) {
    for (int a = 0; a <= 4; ++a) {
      for (int b = 1; b <= 3; ++b) {
        auto p = inst(K, a, b);
        auto ds = build_demand_structure(p);
        const bool coded = b * (K - 1) < 2 * a;
        for (Regime r : {Regime::kHighM, Regime::kLowM, Regime::kLargeB}) {
          const bool expected = (r == Regime::kLargeB) != coded;
          if (expected) {
            auto rep = certificate_check(p, ds, r);
            CHECK(rep.pass);
            CHECK(rep.min_residual >= 0);
            CHECK(rep.matches_rstar);
          } else {
            CHECK_THROWS_AS(certificate_check(p, ds, r), RegimeMismatch);
          }
        }
      }
    }
  }
}

TEST_CASE("certificate bound is a valid lower bound on its piece") {
  for (auto [K, a, b] : {std::tuple{3, 2, 1}, std::tuple{4, 1, 2}, std::tuple{4, 3, 1}}) {
    auto base = inst(K, a, b);
    auto ds = build_demand_structure(base);
    for (Regime r : {Regime::kHighM, Regime::kLowM, Regime::kLargeB}) {
      const bool coded = base.coded_regime();
      if ((r == Regime::kLargeB) == coded) continue;
      auto rep = certificate_check(base, ds, r);
      for (const auto& M : memory_grid(0, base.max_memory(), 11)) {
        const Rational bound = rep.constant - rep.slope * M;
        CHECK(bound <= rstar_u(base.with_memory(M)));
      }
    }
  }
}
