#include "loccache/simplex.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "loccache/errors.hpp"

namespace loccache {

Rational LpRow::activity(const std::vector<Rational>& x) const {
  Rational total(0);
  for (const auto& [j, v] : coeffs) total += v * x.at(static_cast<std::size_t>(j));
  return total;
}

Rational LpRow::violation(const std::vector<Rational>& x) const {
  Rational act = activity(x);
  switch (sense) {
    case Sense::kGe:
      return rhs - act;
    case Sense::kLe:
      return act - rhs;
    case Sense::kEq:
      return abs(act - rhs);
  }
  return Rational(0);
}

bool LpRow::satisfied_by(const std::vector<Rational>& x) const { return violation(x) <= 0; }

std::string status_name(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& opt) : opt_(opt), n_(lp.num_vars) {
    const std::size_t m = lp.rows.size();
    std::vector<Sense> senses;
    std::vector<int> sign;
    int extra = 0;
    for (const auto& row : lp.rows) {
      int s = row.rhs < 0 ? -1 : 1;
      Sense sense = row.sense;
      if (s < 0 && sense != Sense::kEq) sense = sense == Sense::kLe ? Sense::kGe : Sense::kLe;
      senses.push_back(sense);
      sign.push_back(s);
      extra += sense == Sense::kGe ? 2 : 1;
    }
    cols_ = n_ + extra;
    rhs_ = cols_;
    is_art_.assign(static_cast<std::size_t>(cols_), false);
    T_.assign(m, std::vector<Rational>(static_cast<std::size_t>(cols_ + 1)));
    basis_.assign(m, -1);
    int next = n_;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& row = lp.rows[i];
      auto& t = T_[i];
      for (const auto& [j, v] : row.coeffs) {
        if (j < 0 || j >= n_) throw std::out_of_range("LP coefficient column out of range");
        t[static_cast<std::size_t>(j)] += sign[i] * v;
      }
      t[static_cast<std::size_t>(rhs_)] = sign[i] * row.rhs;
      switch (senses[i]) {
        case Sense::kLe:
          t[static_cast<std::size_t>(next)] = 1;
          basis_[i] = next++;
          break;
        case Sense::kGe:
          t[static_cast<std::size_t>(next++)] = -1;
          t[static_cast<std::size_t>(next)] = 1;
          is_art_[static_cast<std::size_t>(next)] = true;
          basis_[i] = next++;
          break;
        case Sense::kEq:
          t[static_cast<std::size_t>(next)] = 1;
          is_art_[static_cast<std::size_t>(next)] = true;
          basis_[i] = next++;
          break;
      }
    }
    obj_.assign(static_cast<std::size_t>(cols_ + 1), Rational(0));
  }

  LpSolution solve(const LinearProgram& lp) {
    LpSolution sol;
    sol.rows_used = lp.rows.size();

    // Phase 1: minimise the sum of artificials.
    std::fill(obj_.begin(), obj_.end(), Rational(0));
    for (int j = 0; j < cols_; ++j) {
      if (is_art_[static_cast<std::size_t>(j)]) obj_[static_cast<std::size_t>(j)] = 1;
    }
    for (std::size_t i = 0; i < T_.size(); ++i) {
      if (is_art_[static_cast<std::size_t>(basis_[i])]) subtract_row(obj_, T_[i], Rational(1));
    }
    if (run(false) != LpStatus::kOptimal) throw std::logic_error("phase 1 cannot be unbounded");
    if (obj_[static_cast<std::size_t>(rhs_)] != 0) {
      sol.status = LpStatus::kInfeasible;
      sol.pivots = pivots_;
      return sol;
    }
    drive_out_artificials();

    // Phase 2.
    std::vector<Rational> cost(static_cast<std::size_t>(cols_), Rational(0));
    for (const auto& [j, v] : lp.objective) {
      if (j < 0 || j >= n_) throw std::out_of_range("objective column out of range");
      cost[static_cast<std::size_t>(j)] += v;
    }
    std::fill(obj_.begin(), obj_.end(), Rational(0));
    for (int j = 0; j < cols_; ++j) obj_[static_cast<std::size_t>(j)] = cost[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < T_.size(); ++i) {
      const auto& cb = cost[static_cast<std::size_t>(basis_[i])];
      if (cb != 0) subtract_row(obj_, T_[i], cb);
    }
    LpStatus st = run(true);
    sol.pivots = pivots_;
    sol.status = st;
    if (st != LpStatus::kOptimal) return sol;
    sol.x.assign(static_cast<std::size_t>(n_), Rational(0));
    for (std::size_t i = 0; i < T_.size(); ++i) {
      if (basis_[i] < n_) sol.x[static_cast<std::size_t>(basis_[i])] = T_[i][static_cast<std::size_t>(rhs_)];
    }
    sol.objective = -obj_[static_cast<std::size_t>(rhs_)];
    return sol;
  }

 private:
  // target -= factor * source over the non-zero entries of source.
  void subtract_row(std::vector<Rational>& target, const std::vector<Rational>& source,
                    const Rational& factor) {
    for (std::size_t j = 0; j < source.size(); ++j) {
      if (sgn(source[j]) != 0) target[j] -= factor * source[j];
    }
  }

  void pivot(std::size_t r, int c) {
    const auto cc = static_cast<std::size_t>(c);
    auto& prow = T_[r];
    Rational inv = 1 / prow[cc];
    nz_.clear();
    for (std::size_t j = 0; j < prow.size(); ++j) {
      if (sgn(prow[j]) != 0) {
        prow[j] *= inv;
        nz_.push_back(j);
      }
    }
    Rational f;
    auto eliminate = [&](std::vector<Rational>& row) {
      if (sgn(row[cc]) == 0) return;
      f = row[cc];
      for (std::size_t j : nz_) row[j] -= f * prow[j];
    };
    for (std::size_t i = 0; i < T_.size(); ++i) {
      if (i != r) eliminate(T_[i]);
    }
    eliminate(obj_);
    basis_[r] = c;
    ++pivots_;
    if (pivots_ > opt_.max_pivots) throw BudgetExceeded("simplex pivot limit exceeded");
  }

  LpStatus run(bool forbid_artificial) {
    const auto rhs = static_cast<std::size_t>(rhs_);
    while (true) {
      int enter = -1;
      for (int j = 0; j < cols_; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        if (forbid_artificial && is_art_[jj]) continue;
        if (sgn(obj_[jj]) >= 0) continue;
        if (enter < 0) {
          enter = j;
          if (bland_) break;
        } else if (obj_[jj] < obj_[static_cast<std::size_t>(enter)]) {
          enter = j;
        }
      }
      if (enter < 0) return LpStatus::kOptimal;
      const auto ce = static_cast<std::size_t>(enter);
      std::size_t leave = T_.size();
      Rational best, ratio;
      for (std::size_t i = 0; i < T_.size(); ++i) {
        if (sgn(T_[i][ce]) <= 0) continue;
        ratio = T_[i][rhs] / T_[i][ce];
        if (leave == T_.size() || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == T_.size()) return LpStatus::kUnbounded;
      if (sgn(best) == 0) {
        if (++degenerate_run_ >= opt_.degenerate_switch) bland_ = true;
      } else {
        degenerate_run_ = 0;
      }
      pivot(leave, enter);
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < T_.size();) {
      if (!is_art_[static_cast<std::size_t>(basis_[i])]) {
        ++i;
        continue;
      }
      int col = -1;
      for (int j = 0; j < cols_; ++j) {
        if (!is_art_[static_cast<std::size_t>(j)] && sgn(T_[i][static_cast<std::size_t>(j)]) != 0) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
        ++i;
      } else {
        T_.erase(T_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
  }

  SimplexOptions opt_;
  int n_;
  int cols_ = 0;
  int rhs_ = 0;
  std::vector<std::vector<Rational>> T_;
  std::vector<Rational> obj_;
  std::vector<int> basis_;
  std::vector<bool> is_art_;
  std::vector<std::size_t> nz_;
  std::uint64_t pivots_ = 0;
  int degenerate_run_ = 0;
  bool bland_ = false;
};

}  // namespace

LpSolution solve_simplex(const LinearProgram& lp, const SimplexOptions& options) {
  if (lp.num_vars < 0) throw std::invalid_argument("negative variable count");
  Tableau t(lp, options);
  return t.solve(lp);
}

LpSolution solve_lp(const LinearProgram& lp, const LazyOptions& options) {
  LinearProgram active;
  active.num_vars = lp.num_vars;
  active.var_names = lp.var_names;
  active.objective = lp.objective;
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    if (lp.rows[i].lazy) {
      pending.push_back(i);
    } else {
      active.rows.push_back(lp.rows[i]);
    }
  }
  std::uint64_t pivots = 0;
  for (int round = 1;; ++round) {
    LpSolution sol = solve_simplex(active, options.simplex);
    pivots += sol.pivots;
    sol.pivots = pivots;
    sol.rounds = round;
    if (sol.status == LpStatus::kInfeasible) return sol;
    if (sol.status == LpStatus::kUnbounded) {
      if (pending.empty()) return sol;
      for (auto i : pending) active.rows.push_back(lp.rows[i]);
      pending.clear();
      continue;
    }
    std::vector<std::pair<Rational, std::size_t>> violated;
    std::vector<std::size_t> keep;
    for (auto i : pending) {
      Rational v = lp.rows[i].violation(sol.x);
      if (v > 0) {
        violated.emplace_back(std::move(v), i);
      } else {
        keep.push_back(i);
      }
    }
    if (violated.empty()) return sol;
    std::stable_sort(violated.begin(), violated.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    const std::size_t take = std::min(options.batch, violated.size());
    for (std::size_t k = 0; k < violated.size(); ++k) {
      if (k < take) {
        active.rows.push_back(lp.rows[violated[k].second]);
      } else {
        keep.push_back(violated[k].second);
      }
    }
    std::sort(keep.begin(), keep.end());
    pending = std::move(keep);
  }
}

}  // namespace loccache
