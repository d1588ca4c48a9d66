#include "loccache/converse.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "loccache/errors.hpp"

namespace loccache {

std::uint32_t var_index(int K, int file, NodeMask mask) {
  return (static_cast<std::uint32_t>(file - 1) << K) + mask;
}

std::pair<int, NodeMask> var_of(int K, std::uint32_t index) {
  return {static_cast<int>(index >> K) + 1, index & ((NodeMask{1} << K) - 1)};
}

std::uint32_t load_var_index(int K, int N) { return static_cast<std::uint32_t>(N) << K; }

std::string var_name(int K, std::uint32_t index) {
  auto [file, mask] = var_of(K, index);
  return "y[" + std::to_string(file) + "," + mask_to_string(mask, K) + "]";
}

Rational LinearInequality::rhs_value(const UncodedPlacement& y) const {
  Rational total(0);
  for (const auto& [v, c] : coeffs) {
    auto [file, mask] = var_of(y.K(), v);
    total += c * y.size(file, mask);
  }
  return total;
}

bool LinearInequality::holds(const Rational& R, const UncodedPlacement& y) const {
  return r_coefficient * R >= rhs_value(y);
}

std::string LinearInequality::to_string(int K) const {
  std::string s = (r_coefficient == 1 ? std::string() : loccache::to_string(r_coefficient) + "*") + "R >=";
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    s += i ? " + " : " ";
    if (coeffs[i].second != 1) s += loccache::to_string(coeffs[i].second) + "*";
    s += var_name(K, coeffs[i].first);
  }
  return s;
}

namespace {

void check_permutation(int K, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != K) throw std::invalid_argument("permutation must have K entries");
  NodeMask seen = 0;
  for (int u : perm) {
    if (u < 1 || u > K || (seen & node_bit(u))) throw std::invalid_argument("not a permutation of [K]");
    seen |= node_bit(u);
  }
}

// Sorted variable list of the genie row for (d, perm).
void genie_vars(int K, const std::vector<int>& files, const std::vector<int>& perm, GenieForm form,
                std::vector<std::uint32_t>& out) {
  out.clear();
  const NodeMask all = (NodeMask{1} << K) - 1;
  NodeMask consumed = 0;
  for (int u : perm) {
    consumed |= node_bit(u);
    const NodeMask avail = all & ~consumed;
    const int file = files[static_cast<std::size_t>(u - 1)];
    out.push_back(var_index(K, file, 0));
    if (form == GenieForm::kTruncated) {
      for (NodeMask rest = avail; rest; rest &= rest - 1) out.push_back(var_index(K, file, rest & (~rest + 1)));
    } else {
      for (NodeMask sub = avail; sub; sub = (sub - 1) & avail) out.push_back(var_index(K, file, sub));
    }
  }
  std::sort(out.begin(), out.end());
}

LinearInequality unit_row(const std::vector<std::uint32_t>& vars) {
  LinearInequality row;
  row.coeffs.reserve(vars.size());
  for (auto v : vars) row.coeffs.emplace_back(v, Rational(1));
  return row;
}

bool all_distinct(std::vector<int> files) {
  std::sort(files.begin(), files.end());
  return std::adjacent_find(files.begin(), files.end()) == files.end();
}

// Collects unit rows keyed by their variable pattern, merging tags.
class RowMerger {
 public:
  void add(const std::vector<std::uint32_t>& vars, RowTag tag) {
    auto [it, inserted] = index_.try_emplace(vars, rows_.size());
    if (inserted) rows_.push_back(unit_row(vars));
    rows_[it->second].tags.push_back(std::move(tag));
  }

  // Rows in canonical (lexicographic variable-list) order.
  std::vector<LinearInequality> take() {
    std::vector<LinearInequality> out;
    out.reserve(rows_.size());
    for (auto& [vars, i] : index_) out.push_back(std::move(rows_[i]));
    return out;
  }

 private:
  std::map<std::vector<std::uint32_t>, std::size_t> index_;
  std::vector<LinearInequality> rows_;
};

std::uint64_t factorial_sat(int K) {
  std::uint64_t f = 1;
  for (int i = 2; i <= K; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

}  // namespace

LinearInequality genie_inequality(const DemandStructure& ds, const DemandVector& d,
                                  const std::vector<int>& perm, GenieForm form) {
  const int K = ds.K();
  auto checked = make_demand(ds, d.files);
  if (!checked.distinct) throw std::invalid_argument("genie rows need pairwise distinct demands");
  check_permutation(K, perm);
  std::vector<std::uint32_t> vars;
  genie_vars(K, d.files, perm, form, vars);
  auto row = unit_row(vars);
  row.tags.push_back({d.files, perm});
  return row;
}

std::uint64_t full_family_raw_count(const DemandStructure& ds) {
  if (demand_count(ds) > 10'000'000) return std::numeric_limits<std::uint64_t>::max();
  std::uint64_t distinct = 0;
  for_each_demand(ds, true, [&](const DemandVector&) { ++distinct; });
  return distinct * factorial_sat(ds.K());
}

std::vector<LinearInequality> full_family(const DemandStructure& ds, GenieForm form,
                                          std::uint64_t max_rows) {
  const int K = ds.K();
  if (K > 10) throw BudgetExceeded("full family needs K <= 10");
  const auto raw = full_family_raw_count(ds);
  if (raw > max_rows) {
    throw BudgetExceeded("full family needs " +
                         (raw == std::numeric_limits<std::uint64_t>::max() ? std::string("too many")
                                                                           : std::to_string(raw)) +
                         " rows, budget is " + std::to_string(max_rows));
  }
  std::vector<int> identity(static_cast<std::size_t>(K));
  std::iota(identity.begin(), identity.end(), 1);
  RowMerger merger;
  std::vector<std::uint32_t> vars;
  for_each_demand(ds, true, [&](const DemandVector& d) {
    auto perm = identity;
    do {
      genie_vars(K, d.files, perm, form, vars);
      merger.add(vars, RowTag{d.files, perm});
    } while (std::next_permutation(perm.begin(), perm.end()));
  });
  return merger.take();
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::kHighM:
      return "HIGH_M";
    case Regime::kLowM:
      return "LOW_M";
    case Regime::kLargeB:
      return "LARGE_B";
  }
  return "UNKNOWN";
}

Regime parse_regime(const std::string& name) {
  if (name == "HIGH_M") return Regime::kHighM;
  if (name == "LOW_M") return Regime::kLowM;
  if (name == "LARGE_B") return Regime::kLargeB;
  throw std::invalid_argument("unknown regime '" + name + "'");
}

std::vector<int> left_permutation(int K, int k) {
  std::vector<int> u;
  for (int j = 0; j < K; ++j) u.push_back(static_cast<int>(cyclic_mod(k - j, K)));
  return u;
}

std::vector<int> right_permutation(int K, int k) {
  std::vector<int> u;
  for (int j = 0; j < K; ++j) u.push_back(static_cast<int>(cyclic_mod(k + j, K)));
  return u;
}

namespace {

using PartPicker = const std::vector<int>& (DemandStructure::*)(int) const;

// Every demand with d_{u_j} drawn from pick(j)(u_j); one genie row each.
void add_product_rows(const DemandStructure& ds, const std::vector<int>& perm,
                      const std::vector<PartPicker>& pick, GenieForm form, RowMerger& merger) {
  const int K = ds.K();
  std::vector<const std::vector<int>*> choices;
  for (int j = 0; j < K; ++j) {
    choices.push_back(&(ds.*pick[static_cast<std::size_t>(j)])(perm[static_cast<std::size_t>(j)]));
    if (choices.back()->empty()) return;
  }
  std::vector<std::size_t> pos(static_cast<std::size_t>(K), 0);
  std::vector<int> files(static_cast<std::size_t>(K));
  std::vector<std::uint32_t> vars;
  while (true) {
    for (int j = 0; j < K; ++j) {
      files[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)] - 1)] =
          (*choices[static_cast<std::size_t>(j)])[pos[static_cast<std::size_t>(j)]];
    }
    if (!all_distinct(files)) throw std::logic_error("selected demand is not distinct");
    genie_vars(K, files, perm, form, vars);
    merger.add(vars, RowTag{files, perm});
    int j = K - 1;
    while (j >= 0) {
      auto& p = pos[static_cast<std::size_t>(j)];
      if (++p < choices[static_cast<std::size_t>(j)]->size()) break;
      p = 0;
      --j;
    }
    if (j < 0) return;
  }
}

}  // namespace

std::vector<LinearInequality> selected_family(const DemandStructure& ds, Regime regime,
                                              GenieForm form) {
  const int K = ds.K();
  RowMerger merger;
  switch (regime) {
    case Regime::kHighM:
    case Regime::kLowM: {
      if (ds.a() == 0) throw std::invalid_argument(regime_name(regime) + " needs a >= 1");
      if (regime == Regime::kHighM && ds.b() == 0) throw std::invalid_argument("HIGH_M needs b >= 1");
      const PartPicker last_left = regime == Regime::kHighM ? &DemandStructure::unique : &DemandStructure::shared_left;
      const PartPicker last_right = regime == Regime::kHighM ? &DemandStructure::unique : &DemandStructure::shared_right;
      std::vector<PartPicker> left(static_cast<std::size_t>(K), &DemandStructure::shared_left);
      std::vector<PartPicker> right(static_cast<std::size_t>(K), &DemandStructure::shared_right);
      left.back() = last_left;
      right.back() = last_right;
      for (int k = 1; k <= K; ++k) {
        add_product_rows(ds, left_permutation(K, k), left, form, merger);
        add_product_rows(ds, right_permutation(K, k), right, form, merger);
      }
      break;
    }
    case Regime::kLargeB: {
      if (ds.b() == 0) throw std::invalid_argument("LARGE_B needs b >= 1");
      std::vector<std::size_t> pos(static_cast<std::size_t>(K), 0);
      std::vector<int> files(static_cast<std::size_t>(K));
      std::vector<std::uint32_t> vars;
      while (true) {
        vars.clear();
        for (int k = 1; k <= K; ++k) {
          files[static_cast<std::size_t>(k - 1)] = ds.unique(k)[pos[static_cast<std::size_t>(k - 1)]];
          vars.push_back(var_index(K, files[static_cast<std::size_t>(k - 1)], 0));
        }
        std::sort(vars.begin(), vars.end());
        merger.add(vars, RowTag{files, {}});
        int k = K - 1;
        while (k >= 0) {
          auto& p = pos[static_cast<std::size_t>(k)];
          if (++p < ds.unique(k + 1).size()) break;
          p = 0;
          --k;
        }
        if (k < 0) break;
      }
      break;
    }
  }
  return merger.take();
}

LinearProgram build_lp(const ProblemInstance& inst, const DemandStructure& ds,
                       const std::vector<LinearInequality>& family, MemoryMode mode) {
  if (inst.L() != 1) throw std::invalid_argument("the converse LP is defined for L = 1");
  if (ds.K() != inst.K() || ds.N() != inst.N()) throw std::invalid_argument("instance/structure mismatch");
  const int K = inst.K(), N = inst.N();
  if (K > 20) throw BudgetExceeded("LP needs K <= 20");
  const std::uint32_t masks = NodeMask{1} << K;
  const std::uint32_t R = load_var_index(K, N);
  LinearProgram lp;
  lp.num_vars = static_cast<int>(R) + 1;
  for (std::uint32_t v = 0; v < R; ++v) lp.var_names.push_back(var_name(K, v));
  lp.var_names.emplace_back("R");
  lp.objective.emplace_back(static_cast<int>(R), Rational(1));

  for (const auto& row : family) {
    LpRow r;
    r.sense = Sense::kGe;
    r.rhs = 0;
    r.lazy = true;
    for (const auto& [v, c] : row.coeffs) {
      if (v >= R) throw std::invalid_argument("row references a variable outside the LP");
      r.coeffs.emplace_back(static_cast<int>(v), -c);
    }
    r.coeffs.emplace_back(static_cast<int>(R), row.r_coefficient);
    lp.rows.push_back(std::move(r));
  }
  for (int i = 1; i <= N; ++i) {
    LpRow r;
    r.sense = Sense::kEq;
    r.rhs = 1;
    for (NodeMask m = 0; m < masks; ++m) r.coeffs.emplace_back(static_cast<int>(var_index(K, i, m)), Rational(1));
    lp.rows.push_back(std::move(r));
  }
  if (mode == MemoryMode::kAggregate) {
    LpRow r;
    r.sense = Sense::kLe;
    r.rhs = Rational(K) * inst.M();
    for (int i = 1; i <= N; ++i) {
      for (NodeMask m = 1; m < masks; ++m) {
        r.coeffs.emplace_back(static_cast<int>(var_index(K, i, m)), Rational(std::popcount(m)));
      }
    }
    lp.rows.push_back(std::move(r));
  } else {
    for (int k = 1; k <= K; ++k) {
      LpRow r;
      r.sense = Sense::kLe;
      r.rhs = inst.M();
      for (int i = 1; i <= N; ++i) {
        for (NodeMask m = 0; m < masks; ++m) {
          if (m & node_bit(k)) r.coeffs.emplace_back(static_cast<int>(var_index(K, i, m)), Rational(1));
        }
      }
      lp.rows.push_back(std::move(r));
    }
  }
  return lp;
}

ConverseSolution solve_converse(const ProblemInstance& inst, const DemandStructure& ds,
                                const std::vector<LinearInequality>& family, MemoryMode mode) {
  auto lp = build_lp(inst, ds, family, mode);
  auto sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal) {
    throw std::logic_error("converse LP is " + status_name(sol.status));
  }
  const int K = inst.K(), N = inst.N();
  UncodedPlacement witness(K, N);
  for (std::uint32_t v = 0; v < load_var_index(K, N); ++v) {
    const auto& val = sol.x[v];
    if (val != 0) {
      auto [file, mask] = var_of(K, v);
      witness.set(file, mask, val);
    }
  }
  return {sol.objective, std::move(witness), std::move(sol)};
}

Rational sum_all_bound(const ProblemInstance& inst, const DemandStructure& ds, GenieForm form) {
  auto family = full_family(ds, form);
  std::map<std::uint32_t, Rational> avg;
  std::uint64_t total = 0;
  for (const auto& row : family) total += row.tags.size();
  if (total == 0) throw std::invalid_argument("full family is empty");
  for (const auto& row : family) {
    Rational w(static_cast<unsigned long>(row.tags.size()), static_cast<unsigned long>(total));
    w.canonicalize();
    for (const auto& [v, c] : row.coeffs) avg[v] += w * c;
  }
  LinearInequality merged;
  for (auto& [v, c] : avg) merged.coeffs.emplace_back(v, c);
  auto sol = solve_converse(inst, ds, {merged}, MemoryMode::kAggregate);
  return rational_max(Rational(0), sol.optimum);
}

SymmetrizedTotals symmetrized_totals(const DemandStructure& ds, const UncodedPlacement& y) {
  const int K = ds.K();
  SymmetrizedTotals t;
  t.x.assign(static_cast<std::size_t>(K) + 1, Rational(0));
  for (int i = 1; i <= ds.N(); ++i) {
    const bool shared = ds.file_class(i) == FileClass::kShared;
    for (const auto& [mask, v] : y.entries(i)) {
      const int size = std::popcount(mask);
      t.x[static_cast<std::size_t>(size)] += v;
      if (size == 0) (shared ? t.alpha0 : t.beta0) += v;
      if (size == 1 && shared) t.alpha1 += v;
    }
  }
  return t;
}

}  // namespace loccache
