#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "loccache/model.hpp"
#include "loccache/placement.hpp"
#include "loccache/rational.hpp"
#include "loccache/simplex.hpp"

namespace loccache {

// LP variable index of y_{file, mask}: (file - 1) * 2^K + mask. The load
// variable R follows the N * 2^K subfile variables.
std::uint32_t var_index(int K, int file, NodeMask mask);
std::pair<int, NodeMask> var_of(int K, std::uint32_t index);
std::uint32_t load_var_index(int K, int N);
std::string var_name(int K, std::uint32_t index);

// Which subsets a genie row keeps for the i-th user of the permutation:
// kTruncated keeps T = ∅ and singletons, kFull keeps every T ⊆ [K] ∖ {u_1..u_i}.
enum class GenieForm { kTruncated, kFull };

struct RowTag {
  std::vector<int> demand;  // d_1..d_K
  std::vector<int> perm;    // u_1..u_K; empty for rows not tied to a permutation
};

// R_coefficient · R ≥ Σ coeffs · y.
struct LinearInequality {
  std::vector<std::pair<std::uint32_t, Rational>> coeffs;  // sorted by variable
  Rational r_coefficient = 1;
  std::vector<RowTag> tags;

  Rational rhs_value(const UncodedPlacement& y) const;
  bool holds(const Rational& R, const UncodedPlacement& y) const;
  std::string to_string(int K) const;
};

LinearInequality genie_inequality(const DemandStructure& ds, const DemandVector& d,
                                  const std::vector<int>& perm,
                                  GenieForm form = GenieForm::kTruncated);

// One row per (distinct demand, permutation) pair, merged by coefficient
// pattern and sorted canonically. Throws BudgetExceeded when the raw row
// count would exceed max_rows.
std::vector<LinearInequality> full_family(const DemandStructure& ds,
                                          GenieForm form = GenieForm::kTruncated,
                                          std::uint64_t max_rows = 1'000'000);

// Raw (pre-merge) row count of full_family, saturating.
std::uint64_t full_family_raw_count(const DemandStructure& ds);

enum class Regime { kHighM, kLowM, kLargeB };

std::string regime_name(Regime r);
Regime parse_regime(const std::string& name);

// Rows of the hand-picked demand/permutation families. Throws
// std::invalid_argument when the family is empty for these parameters.
std::vector<LinearInequality> selected_family(const DemandStructure& ds, Regime regime,
                                              GenieForm form = GenieForm::kTruncated);

// The left/right permutations (k, k-1, ..., k-K+1) and (k, k+1, ..., k+K-1).
std::vector<int> left_permutation(int K, int k);
std::vector<int> right_permutation(int K, int k);

enum class MemoryMode { kAggregate, kPerNode };

// min R over y >= 0 subject to the rows, Σ_T y_{i,T} = 1 per file and the
// memory constraint. Genie rows are marked lazy.
LinearProgram build_lp(const ProblemInstance& inst, const DemandStructure& ds,
                       const std::vector<LinearInequality>& family,
                       MemoryMode mode = MemoryMode::kAggregate);

struct ConverseSolution {
  Rational optimum;
  UncodedPlacement witness;
  LpSolution lp;
};

ConverseSolution solve_converse(const ProblemInstance& inst, const DemandStructure& ds,
                                const std::vector<LinearInequality>& family,
                                MemoryMode mode = MemoryMode::kAggregate);

// Tag-weighted average of every full-family row as one inequality, with the
// per-file partition rows and the aggregate memory row.
Rational sum_all_bound(const ProblemInstance& inst, const DemandStructure& ds,
                       GenieForm form = GenieForm::kTruncated);

// Class totals of a placement.
struct SymmetrizedTotals {
  Rational alpha0;              // Σ_{i∈C1} y_{i,∅}
  Rational beta0;               // Σ_{i∈C2} y_{i,∅}
  Rational alpha1;              // Σ_{i∈C1} Σ_j y_{i,{j}}
  std::vector<Rational> x;      // x[t] = Σ_i Σ_{|T|=t} y_{i,T}, t = 0..K
};

SymmetrizedTotals symmetrized_totals(const DemandStructure& ds, const UncodedPlacement& y);

}  // namespace loccache
