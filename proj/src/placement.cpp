#include "loccache/placement.hpp"

#include <bit>
#include <stdexcept>

#include "loccache/errors.hpp"

namespace loccache {

UncodedPlacement::UncodedPlacement(int K, int N)
    : K_(K), N_(N), sizes_(static_cast<std::size_t>(N)) {
  if (K < 1 || K > 30) throw std::invalid_argument("K must lie in [1, 30]");
  if (N < 1) throw std::invalid_argument("N must be positive");
}

Rational UncodedPlacement::size(int file, NodeMask mask) const {
  const auto& m = entries(file);
  auto it = m.find(mask);
  return it == m.end() ? Rational(0) : it->second;
}

void UncodedPlacement::set(int file, NodeMask mask, const Rational& value) {
  if (file < 1 || file > N_) throw std::out_of_range("file index out of range");
  if (mask >> K_) throw std::out_of_range("mask has bits beyond K");
  auto& m = sizes_[static_cast<std::size_t>(file - 1)];
  if (value == 0) {
    m.erase(mask);
  } else {
    m[mask] = value;
  }
}

void UncodedPlacement::add(int file, NodeMask mask, const Rational& value) {
  set(file, mask, size(file, mask) + value);
}

const std::map<NodeMask, Rational>& UncodedPlacement::entries(int file) const {
  if (file < 1 || file > N_) throw std::out_of_range("file index out of range");
  return sizes_[static_cast<std::size_t>(file - 1)];
}

Rational UncodedPlacement::node_usage(int node) const {
  Rational total(0);
  for (const auto& m : sizes_) {
    for (const auto& [mask, v] : m) {
      if (mask & node_bit(node)) total += v;
    }
  }
  return total;
}

Rational UncodedPlacement::max_node_usage() const {
  Rational best(0);
  for (int k = 1; k <= K_; ++k) best = rational_max(best, node_usage(k));
  return best;
}

void UncodedPlacement::validate(const Rational& M) const {
  for (int i = 1; i <= N_; ++i) {
    Rational total(0);
    for (const auto& [mask, v] : entries(i)) {
      if (v < 0) {
        throw InvariantViolation("non-negative", "file " + std::to_string(i) + " mask " +
                                                     mask_to_string(mask, K_));
      }
      total += v;
    }
    if (total != 1) {
      throw InvariantViolation("file-partition", "file " + std::to_string(i) + " sums to " +
                                                     to_string(total));
    }
  }
  for (int k = 1; k <= K_; ++k) {
    Rational used = node_usage(k);
    if (used > M) {
      throw InvariantViolation("memory-budget", "node " + std::to_string(k) + " uses " +
                                                    to_string(used) + " > " + to_string(M));
    }
  }
}

UncodedPlacement place_nothing(const ProblemInstance& inst) {
  UncodedPlacement p(inst.K(), inst.N());
  for (int i = 1; i <= inst.N(); ++i) p.set(i, 0, Rational(1));
  return p;
}

UncodedPlacement place_local_full(const ProblemInstance& inst, const DemandStructure& ds) {
  UncodedPlacement p(inst.K(), inst.N());
  for (int i = 1; i <= inst.N(); ++i) p.set(i, ds.demanders(i), Rational(1));
  return p;
}

UncodedPlacement place_man(const ProblemInstance& inst, int t) {
  const int K = inst.K();
  if (t < 0 || t > K) throw std::invalid_argument("t must lie in [0, K]");
  UncodedPlacement p(K, inst.N());
  Rational part = make_rational(1, binomial(K, t));
  for (NodeMask mask = 0; mask < (NodeMask{1} << K); ++mask) {
    if (std::popcount(mask) != t) continue;
    for (int i = 1; i <= inst.N(); ++i) p.set(i, mask, part);
  }
  return p;
}

UncodedPlacement place_man_t1(const ProblemInstance& inst) { return place_man(inst, 1); }

UncodedPlacement place_multiaccess(const ProblemInstance& inst, const DemandStructure& ds) {
  if (inst.L() < 2) throw std::invalid_argument("multiaccess placement requires L >= 2");
  UncodedPlacement p(inst.K(), inst.N());
  for (int i = 1; i <= inst.N(); ++i) p.set(i, node_bit(ds.home_region(i)), Rational(1));
  return p;
}

}  // namespace loccache
