#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "loccache/rational.hpp"

namespace loccache {

enum class Sense { kLe, kGe, kEq };

// Σ coeffs · x  (sense)  rhs. Coefficients are sparse (column, value) pairs
// with distinct columns.
struct LpRow {
  std::vector<std::pair<int, Rational>> coeffs;
  Sense sense = Sense::kGe;
  Rational rhs;
  // Lazy rows are withheld from the first solve and added only when the
  // current optimum violates them.
  bool lazy = false;

  Rational activity(const std::vector<Rational>& x) const;
  bool satisfied_by(const std::vector<Rational>& x) const;
  // rhs - activity for >=, activity - rhs for <=, |difference| for =; > 0 means violated.
  Rational violation(const std::vector<Rational>& x) const;
};

// minimize objective · x subject to rows, x >= 0.
struct LinearProgram {
  int num_vars = 0;
  std::vector<std::string> var_names;  // optional, size num_vars when set
  std::vector<std::pair<int, Rational>> objective;
  std::vector<LpRow> rows;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

std::string status_name(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Rational objective;
  std::vector<Rational> x;
  std::uint64_t pivots = 0;
  std::size_t rows_used = 0;  // rows in the final solved relaxation
  int rounds = 1;             // lazy row-generation rounds
};

struct SimplexOptions {
  // Consecutive degenerate pivots after which the entering rule switches
  // permanently from most-negative reduced cost to lowest index.
  int degenerate_switch = 50;
  std::uint64_t max_pivots = 5'000'000;
};

// Exact two-phase simplex over all rows (the lazy flag is ignored).
LpSolution solve_simplex(const LinearProgram& lp, const SimplexOptions& options = {});

struct LazyOptions {
  std::size_t batch = 64;
  SimplexOptions simplex;
};

// Solves with lazy rows added in batches of the most violated ones until the
// relaxation optimum satisfies every row. Same optimum as solve_simplex.
LpSolution solve_lp(const LinearProgram& lp, const LazyOptions& options = {});

}  // namespace loccache
