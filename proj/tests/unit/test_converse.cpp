#include <doctest.h>

#include <algorithm>
#include <bit>
#include <functional>
#include <optional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "loccache/bounds.hpp"
#include "loccache/converse.hpp"
#include "loccache/errors.hpp"
#include "loccache/lp_io.hpp"
#include "loccache/schemes.hpp"
#include "loccache/simplex.hpp"
#include "oracles.hpp"

using namespace loccache;

namespace {

ProblemInstance inst(int K, int a, int b, int L = 1, Rational M = 0) {
  return ProblemInstance::create(K, a, b, L, M);
}

Rational q(const char* s) { return parse_rational(s); }

NodeMask mask_of(std::initializer_list<int> nodes) {
  NodeMask m = 0;
  for (int k : nodes) m |= node_bit(k);
  return m;
}

std::set<std::uint32_t> support(const LinearInequality& row) {
  std::set<std::uint32_t> s;
  for (const auto& [v, c] : row.coeffs) {
    CHECK(c == 1);
    s.insert(v);
  }
  return s;
}

// Genie row straight from its definition: user u_i contributes every mask
// avoiding u_1..u_i, optionally limited to |T| <= 1.
std::set<std::uint32_t> genie_oracle(int K, const std::vector<int>& d, const std::vector<int>& u, bool truncated) {
  std::set<std::uint32_t> s;
  NodeMask used = 0;
  for (int i = 0; i < K; ++i) {
    used |= node_bit(u[static_cast<std::size_t>(i)]);
    for (NodeMask T = 0; T < (NodeMask{1} << K); ++T) {
      if (T & used) continue;
      if (truncated && std::popcount(T) > 1) continue;
      s.insert(var_index(K, d[static_cast<std::size_t>(u[static_cast<std::size_t>(i)] - 1)], T));
    }
  }
  return s;
}

std::vector<int> identity(int K) {
  std::vector<int> p(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) p[static_cast<std::size_t>(k)] = k + 1;
  return p;
}

// Brute-force LP oracle for tiny problems: enumerate every basis of the
// standard form (slacks included), keep feasible vertices, return the best.
std::optional<Rational> vertex_enumeration(const LinearProgram& lp) {
  using Matrix = std::vector<std::vector<Rational>>;
  const std::size_t n = static_cast<std::size_t>(lp.num_vars);
  const std::size_t m = lp.rows.size();
  std::size_t cols = n;
  for (const auto& r : lp.rows) cols += r.sense == Sense::kEq ? 0 : 1;
  Matrix A(m, std::vector<Rational>(cols + 1));
  std::size_t slack = n;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& r = lp.rows[i];
    for (const auto& [j, v] : r.coeffs) A[i][static_cast<std::size_t>(j)] = v;
    if (r.sense == Sense::kLe) A[i][slack++] = 1;
    if (r.sense == Sense::kGe) A[i][slack++] = -1;
    A[i][cols] = r.rhs;
  }
  std::optional<Rational> best;
  std::vector<std::size_t> basis;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (basis.size() < m) {
      for (std::size_t c = start; c < cols; ++c) {
        basis.push_back(c);
        rec(c + 1);
        basis.pop_back();
      }
      return;
    }
    // Gauss-Jordan on the chosen columns.
    Matrix B(m, std::vector<Rational>(m + 1));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t c = 0; c < m; ++c) B[i][c] = A[i][basis[c]];
      B[i][m] = A[i][cols];
    }
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t p = c;
      while (p < m && B[p][c] == 0) ++p;
      if (p == m) return;
      std::swap(B[c], B[p]);
      Rational inv = 1 / B[c][c];
      for (auto& v : B[c]) v *= inv;
      for (std::size_t i = 0; i < m; ++i) {
        if (i == c || B[i][c] == 0) continue;
        Rational f = B[i][c];
        for (std::size_t k = 0; k <= m; ++k) B[i][k] -= f * B[c][k];
      }
    }
    std::vector<Rational> x(cols);
    for (std::size_t c = 0; c < m; ++c) {
      if (B[c][m] < 0) return;
      x[basis[c]] = B[c][m];
    }
    Rational obj(0);
    for (const auto& [j, v] : lp.objective) obj += v * x[static_cast<std::size_t>(j)];
    if (!best || obj < *best) best = obj;
  };
  rec(0);
  return best;
}

LinearProgram random_lp(std::mt19937& rng, int n, int m) {
  std::uniform_int_distribution<int> coef(-3, 4), rhsd(1, 9), sense(0, 3);
  LinearProgram lp;
  lp.num_vars = n;
  for (int j = 0; j < n; ++j) lp.objective.emplace_back(j, Rational(coef(rng) + 3));
  for (int i = 0; i < m; ++i) {
    LpRow r;
    for (int j = 0; j < n; ++j) {
      int c = coef(rng);
      if (c != 0) r.coeffs.emplace_back(j, Rational(c));
    }
    const int s = sense(rng);
    r.sense = s == 0 ? Sense::kEq : (s == 1 ? Sense::kLe : Sense::kGe);
    r.rhs = rhsd(rng);
    lp.rows.push_back(r);
  }
  return lp;
}

}  // namespace

TEST_CASE("variable indexing") {
  CHECK(var_index(3, 1, 0) == 0);
  CHECK(var_index(3, 2, mask_of({1, 3})) == 8 + 5);
  CHECK(var_of(3, 13) == std::pair<int, NodeMask>{2, 5});
  CHECK(load_var_index(3, 9) == 72);
  CHECK(var_name(3, var_index(3, 1, mask_of({2}))) == "y[1,{2}]");
}

TEST_CASE("genie rows of the worked examples") {
  auto ds = build_demand_structure(inst(3, 2, 1));
  auto row = genie_inequality(ds, make_demand(ds, {1, 6, 7}), {1, 3, 2});
  std::set<std::uint32_t> expected{var_index(3, 1, 0),          var_index(3, 1, mask_of({2})),
                                   var_index(3, 1, mask_of({3})), var_index(3, 7, 0),
                                   var_index(3, 7, mask_of({2})), var_index(3, 6, 0)};
  CHECK(support(row) == expected);
  CHECK(row.r_coefficient == 1);

  auto full = genie_inequality(ds, make_demand(ds, {1, 6, 7}), {1, 3, 2}, GenieForm::kFull);
  expected.insert(var_index(3, 1, mask_of({2, 3})));
  CHECK(support(full) == expected);

  auto row2 = genie_inequality(ds, make_demand(ds, {1, 4, 7}), {1, 3, 2});
  CHECK(support(row2) == std::set<std::uint32_t>{var_index(3, 1, 0), var_index(3, 1, mask_of({2})),
                                                  var_index(3, 1, mask_of({3})), var_index(3, 7, 0),
                                                  var_index(3, 7, mask_of({2})), var_index(3, 4, 0)});

  auto d2 = build_demand_structure(inst(2, 1, 1));
  auto small = genie_inequality(d2, make_demand(d2, {2, 4}), {1, 2});
  CHECK(support(small) == std::set<std::uint32_t>{var_index(2, 2, 0), var_index(2, 2, mask_of({2})),
                                                   var_index(2, 4, 0)});

  CHECK_THROWS_AS(genie_inequality(ds, make_demand(ds, {4, 4, 7}), {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(genie_inequality(ds, make_demand(ds, {1, 6, 7}), {1, 1, 2}), std::invalid_argument);
}

TEST_CASE("genie rows match the definition for every demand and permutation") {
  for (auto [K, a, b] : {std::tuple{2, 1, 1}, std::tuple{3, 2, 1}, std::tuple{4, 1, 1}}) {
    auto ds = build_demand_structure(inst(K, a, b));
    auto demands = enumerate_demands(ds, true);
    auto perm = identity(K);
    do {
      for (std::size_t i = 0; i < demands.size(); i += 3) {
        const auto& d = demands[i];
        CHECK(support(genie_inequality(ds, d, perm)) == genie_oracle(K, d.files, perm, true));
        CHECK(support(genie_inequality(ds, d, perm, GenieForm::kFull)) == genie_oracle(K, d.files, perm, false));
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("full family sizes and dedup soundness") {
  auto ds = build_demand_structure(inst(3, 2, 1));
  CHECK(full_family_raw_count(ds) == 95 * 6);
  auto fam = full_family(ds);
  std::size_t tags = 0;
  std::set<std::set<std::uint32_t>> patterns;
  for (const auto& row : fam) {
    tags += row.tags.size();
    auto s = support(row);
    CHECK(patterns.insert(s).second);
    // Re-expanding every merged tag reproduces the row.
    for (const auto& t : row.tags) CHECK(genie_oracle(3, t.demand, t.perm, true) == s);
  }
  CHECK(tags == 570);

  auto d2 = build_demand_structure(inst(2, 1, 1));
  CHECK(full_family_raw_count(d2) == 14);
  std::size_t t2 = 0;
  for (const auto& row : full_family(d2)) t2 += row.tags.size();
  CHECK(t2 == 14);

  CHECK_THROWS_AS(full_family(ds, GenieForm::kTruncated, 100), BudgetExceeded);
}

TEST_CASE("selected families") {
  auto ds = build_demand_structure(inst(3, 2, 1));
  auto rows_for = [](const std::vector<LinearInequality>& fam, const std::vector<int>& perm) {
    std::set<std::vector<int>> demands;
    for (const auto& row : fam) {
      for (const auto& t : row.tags) {
        if (t.perm == perm) demands.insert(t.demand);
      }
    }
    return demands;
  };
  CHECK(left_permutation(3, 1) == std::vector<int>{1, 3, 2});
  CHECK(right_permutation(3, 2) == std::vector<int>{2, 3, 1});

  auto high = selected_family(ds, Regime::kHighM);
  CHECK(rows_for(high, {1, 3, 2}) ==
        std::set<std::vector<int>>{{1, 6, 7}, {1, 6, 8}, {2, 6, 7}, {2, 6, 8}});

  auto low = selected_family(ds, Regime::kLowM);
  auto low_rows = rows_for(low, {1, 3, 2});
  CHECK(low_rows.size() == 8);
  for (const auto& d : low_rows) {
    CHECK((d[0] == 1 || d[0] == 2));
    CHECK((d[1] == 4 || d[1] == 5));
    CHECK((d[2] == 7 || d[2] == 8));
  }

  auto large = selected_family(ds, Regime::kLargeB);
  REQUIRE(large.size() == 1);
  CHECK(support(large[0]) == std::set<std::uint32_t>{var_index(3, 3, 0), var_index(3, 6, 0), var_index(3, 9, 0)});

  auto dz = build_demand_structure(inst(3, 0, 2));
  CHECK_THROWS_AS(selected_family(dz, Regime::kLowM), std::invalid_argument);
  auto db = build_demand_structure(inst(3, 2, 0));
  CHECK_THROWS_AS(selected_family(db, Regime::kLargeB), std::invalid_argument);
}

TEST_CASE("simplex on hand-solved programs") {
  // min x + y  s.t. x + 2y >= 4, 3x + y >= 6.
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {{0, 1}, {1, 1}};
  lp.rows.push_back({{{0, 1}, {1, 2}}, Sense::kGe, 4});
  lp.rows.push_back({{{0, 3}, {1, 1}}, Sense::kGe, 6});
  auto s = solve_simplex(lp);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.objective == q("14/5"));
  CHECK(s.x[0] == q("8/5"));
  CHECK(s.x[1] == q("6/5"));

  LinearProgram inf;
  inf.num_vars = 1;
  inf.objective = {{0, 1}};
  inf.rows.push_back({{{0, 1}}, Sense::kLe, 1});
  inf.rows.push_back({{{0, 1}}, Sense::kGe, 2});
  CHECK(solve_simplex(inf).status == LpStatus::kInfeasible);

  LinearProgram unb;
  unb.num_vars = 2;
  unb.objective = {{0, -1}};
  unb.rows.push_back({{{0, 1}, {1, -1}}, Sense::kLe, 1});
  CHECK(solve_simplex(unb).status == LpStatus::kUnbounded);

  // Redundant equalities and a negative right-hand side.
  LinearProgram red;
  red.num_vars = 2;
  red.objective = {{0, 2}, {1, 1}};
  red.rows.push_back({{{0, 1}, {1, 1}}, Sense::kEq, 3});
  red.rows.push_back({{{0, 2}, {1, 2}}, Sense::kEq, 6});
  red.rows.push_back({{{0, -1}}, Sense::kLe, -1});
  auto r = solve_simplex(red);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.objective == 4);
}

TEST_CASE("simplex agrees with vertex enumeration on random programs") {
  std::mt19937 rng(2024);
  int optimal = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto lp = random_lp(rng, 3, 3);
    auto oracle_value = vertex_enumeration(lp);
    auto s = solve_simplex(lp);
    if (!oracle_value) {
      CHECK(s.status == LpStatus::kInfeasible);
      continue;
    }
    // Non-negative costs keep every feasible program bounded.
    REQUIRE(s.status == LpStatus::kOptimal);
    CHECK(s.objective == *oracle_value);
    for (const auto& row : lp.rows) CHECK(row.satisfied_by(s.x));
    auto lazy = lp;
    for (auto& row : lazy.rows) row.lazy = row.sense == Sense::kGe;
    auto l = solve_lp(lazy, LazyOptions{1, {}});
    REQUIRE(l.status == LpStatus::kOptimal);
    CHECK(l.objective == *oracle_value);
    ++optimal;
  }
  CHECK(optimal > 50);
}

TEST_CASE("lp text round trip") {
  auto p = inst(2, 1, 1, 1, 1);
  auto ds = build_demand_structure(p);
  auto lp = build_lp(p, ds, full_family(ds));
  auto text = lp_to_string(lp);
  auto back = lp_from_string(text);
  CHECK(back.num_vars == lp.num_vars);
  CHECK(back.var_names == lp.var_names);
  REQUIRE(back.rows.size() == lp.rows.size());
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    CHECK(back.rows[i].coeffs == lp.rows[i].coeffs);
    CHECK(back.rows[i].sense == lp.rows[i].sense);
    CHECK(back.rows[i].rhs == lp.rows[i].rhs);
  }
  CHECK(lp_to_string(back) == text);
  CHECK(solve_simplex(back).objective == solve_lp(lp).objective);
  CHECK_THROWS_AS(lp_from_string("ge 1 0:1\n"), std::invalid_argument);
  CHECK_THROWS_AS(lp_from_string("vars 1\nge 1 3:1\n"), std::invalid_argument);
  CHECK(lp_from_string("# comment\nvars 2\nmin 1:1\nle 5/2 0:1 1:-1/3\n").rows[0].rhs == q("5/2"));
}

TEST_CASE("converse LP values") {
  auto value = [](int K, int a, int b, const char* M) {
    auto p = inst(K, a, b, 1, q(M));
    auto ds = build_demand_structure(p);
    return solve_converse(p, ds, full_family(ds)).optimum;
  };
  CHECK(value(3, 2, 1, "3") == 1);
  CHECK(value(2, 0, 1, "0") == 2);
  CHECK(value(3, 2, 1, "5") == 0);
  CHECK(value(4, 1, 1, "2") == q("4/3"));

  auto p = inst(3, 2, 1, 1, 3);
  auto ds = build_demand_structure(p);
  auto sol = solve_converse(p, ds, full_family(ds));
  CHECK_NOTHROW(sol.witness.validate(Rational(3) * 3));
  CHECK_THROWS_AS(build_lp(p.with_access(2), ds, full_family(ds)), std::invalid_argument);
}

TEST_CASE("converse LP equals the closed form at corner and midpoints") {
  for (auto [K, a, b] : {std::tuple{2, 1, 1}, std::tuple{3, 1, 1}, std::tuple{3, 2, 1}, std::tuple{4, 1, 1}}) {
    auto base = inst(K, a, b);
    auto ds = build_demand_structure(base);
    auto fam = full_family(ds);
    std::vector<Rational> Ms{0, Rational(a + b) / 2, Rational(a + b), base.max_memory()};
    if (base.coded_regime()) Ms.push_back(Rational(3 * a + 2 * b) / 2);
    for (const auto& M : Ms) {
      auto p = base.with_memory(M);
      CHECK(solve_converse(p, ds, fam).optimum == oracle::uncoded_optimum(K, a, b, M));
    }
  }
}

TEST_CASE("genie rows are satisfied by the achievable schemes") {
  for (auto [K, a, b] : {std::tuple{2, 1, 1}, std::tuple{3, 2, 1}, std::tuple{3, 1, 2}, std::tuple{4, 1, 1}}) {
    auto base = inst(K, a, b);
    auto ds = build_demand_structure(base);
    auto fam = full_family(ds, GenieForm::kFull);
    for (const auto& M : regime_grid(base, 5)) {
      auto p = base.with_memory(M);
      auto s = make_scheme(p, ds);
      auto y = scheme_placement(p, ds, s);
      const auto R = worst_case_load(p, ds, s);
      for (const auto& row : fam) CHECK(row.holds(R, y));
    }
  }
}

TEST_CASE("per-node memory rows never lower the optimum") {
  for (auto [K, a, b] : {std::tuple{3, 2, 1}, std::tuple{3, 1, 1}, std::tuple{2, 1, 1}}) {
    auto base = inst(K, a, b);
    auto ds = build_demand_structure(base);
    auto fam = full_family(ds);
    for (const auto& M : memory_grid(0, base.max_memory(), 5)) {
      auto p = base.with_memory(M);
      auto agg = solve_converse(p, ds, fam, MemoryMode::kAggregate).optimum;
      auto node = solve_converse(p, ds, fam, MemoryMode::kPerNode).optimum;
      CHECK(node >= agg);
      if (M == 0 || M == base.max_memory() || (base.coded_regime() && M == a + b)) CHECK(node == agg);
    }
  }
}

TEST_CASE("selected families suffice at their corners") {
  // The low-memory argument mixes the HIGH_M and LOW_M rows, so its family is their union.
  for (auto [K, a, b] : {std::tuple{3, 2, 1}, std::tuple{3, 3, 1}, std::tuple{4, 1, 2}, std::tuple{2, 1, 1}}) {
    auto base = inst(K, a, b);
    auto ds = build_demand_structure(base);
    std::vector<std::pair<std::vector<LinearInequality>, Rational>> corners;
    if (base.coded_regime()) {
      auto high = selected_family(ds, Regime::kHighM);
      auto low = high;
      for (auto& row : selected_family(ds, Regime::kLowM)) low.push_back(row);
      corners = {{low, Rational(0)}, {low, Rational(a + b)}, {high, Rational(a + b)}, {high, base.max_memory()}};
    } else {
      auto large = selected_family(ds, Regime::kLargeB);
      corners = {{large, Rational(0)}, {large, base.max_memory()}};
    }
    auto full = full_family(ds);
    for (const auto& [rows, M] : corners) {
      auto p = base.with_memory(M);
      auto sel = solve_converse(p, ds, rows).optimum;
      CHECK(sel == rstar_u(p));
      CHECK(sel == solve_converse(p, ds, full).optimum);
    }
  }
}

TEST_CASE("summed family gives the loose bound 54/95") {
  auto p = inst(3, 2, 1, 1, 3);
  auto ds = build_demand_structure(p);
  auto loose = sum_all_bound(p, ds);
  CHECK(loose == q("54/95"));
  CHECK(sum_all_bound(p, ds, GenieForm::kFull) == q("54/95"));
  CHECK(loose <= solve_converse(p, ds, full_family(ds)).optimum);
  CHECK(sum_all_bound(p.with_memory(5), ds) == 0);
}

TEST_CASE("symmetrized totals of scheme placements") {
  auto p = inst(3, 2, 1, 1, 4);
  auto ds = build_demand_structure(p);
  auto y = scheme_placement(p, ds, make_scheme(p, ds));
  auto t = symmetrized_totals(ds, y);
  REQUIRE(t.x.size() == 4);
  Rational files(0), memory(0);
  for (int s = 0; s <= 3; ++s) {
    CHECK(t.x[static_cast<std::size_t>(s)] >= 0);
    files += t.x[static_cast<std::size_t>(s)];
    memory += s * t.x[static_cast<std::size_t>(s)];
  }
  CHECK(files == 9);
  CHECK(memory <= 3 * 4);
  // Half MAN t=1, half local: shared files are half on pairs, unique files fully on singletons.
  CHECK(t.alpha0 == 0);
  CHECK(t.beta0 == 0);
  CHECK(t.alpha1 == 3);
  CHECK(t.x[1] == 6);
  CHECK(t.x[2] == 3);
}
