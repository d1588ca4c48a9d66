#pragma once

#include <string>
#include <vector>

#include "loccache/model.hpp"
#include "loccache/rational.hpp"

namespace loccache {

enum class PointLabel { kAchievable, kOptUncoded, kCutset, kMultiaccessOpt, kLp };

std::string label_name(PointLabel label);

struct TradeoffPoint {
  Rational M;
  Rational R;
  PointLabel label = PointLabel::kAchievable;
};

// Optimal worst-case load under uncoded placement, single access.
Rational rstar_u(const ProblemInstance& inst);

// (K - t) / (t + 1).
Rational man_load(int K, int t);

// Cut-set lower bound on the optimal load, clamped at 0.
Rational cutset_bound(const ProblemInstance& inst);

// Optimal load with L >= 2 reachable caches: max(0, K - KM/(a+b)).
Rational rstar_multiaccess(const ProblemInstance& inst);

struct GapResult {
  Rational ratio;      // max of rstar_u / cutset over evaluated points
  Rational ratio_at_zero;
  int bound = 2;       // 2 for even K, 3 for odd K
  bool pass = false;
  int points = 0;      // evaluated points (cutset > 0)
};

// Evaluates rstar_u / cutset_bound at {0, a+b, 2a+b} and on an 11-point grid
// per linear piece, skipping points where the cut-set bound is 0.
GapResult gap_check(const ProblemInstance& inst);

// `steps` equally spaced values from lo to hi inclusive (steps >= 2).
std::vector<Rational> memory_grid(const Rational& lo, const Rational& hi, int steps);

// The corner memories where rstar_u changes slope, ascending and deduplicated.
std::vector<Rational> breakpoints(const ProblemInstance& inst);

// 11 points on each linear piece of rstar_u (shared endpoints once).
std::vector<Rational> regime_grid(const ProblemInstance& inst, int per_piece = 11);

}  // namespace loccache
