#pragma once

#include <map>
#include <vector>

#include "loccache/model.hpp"
#include "loccache/rational.hpp"

namespace loccache {

// Fraction of each file cached exactly by each node subset. Absent entries
// are zero.
class UncodedPlacement {
 public:
  UncodedPlacement(int K, int N);

  int K() const { return K_; }
  int N() const { return N_; }

  Rational size(int file, NodeMask mask) const;
  void set(int file, NodeMask mask, const Rational& value);
  void add(int file, NodeMask mask, const Rational& value);
  // Non-zero entries of one file, ordered by mask.
  const std::map<NodeMask, Rational>& entries(int file) const;

  // Σ_i Σ_{T ∋ node} size(i, T).
  Rational node_usage(int node) const;
  Rational max_node_usage() const;

  // Throws InvariantViolation ("file-partition", "non-negative" or
  // "memory-budget") when a placement invariant fails.
  void validate(const Rational& M) const;

 private:
  int K_;
  int N_;
  std::vector<std::map<NodeMask, Rational>> sizes_;
};

// Nothing cached.
UncodedPlacement place_nothing(const ProblemInstance& inst);
// Every file stored whole at each node whose region can demand it.
UncodedPlacement place_local_full(const ProblemInstance& inst, const DemandStructure& ds);
// Classic symmetric split: each file into C(K,t) equal parts, one per t-subset.
UncodedPlacement place_man(const ProblemInstance& inst, int t);
UncodedPlacement place_man_t1(const ProblemInstance& inst);
// Every file stored whole at its home node only. Requires L >= 2.
UncodedPlacement place_multiaccess(const ProblemInstance& inst, const DemandStructure& ds);

}  // namespace loccache
