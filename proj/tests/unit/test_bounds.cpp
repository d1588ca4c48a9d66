#include <doctest.h>

#include "loccache/bounds.hpp"
#include "oracles.hpp"

using namespace loccache;

namespace {

ProblemInstance inst(int K, int a, int b, int L = 1, Rational M = 0) {
  return ProblemInstance::create(K, a, b, L, M);
}

Rational q(const char* s) { return parse_rational(s); }

}  // namespace

TEST_CASE("rational helpers") {
  CHECK(to_string(q("6/4")) == "3/2");
  CHECK(to_string(Rational(3)) == "3/1");
  CHECK(to_string(Rational(0)) == "0/1");
  CHECK(q("2.5") == q("5/2"));
  CHECK(q("-3") == -3);
  CHECK(make_rational(2, -4) == q("-1/2"));
  CHECK(to_decimal(q("2/3"), 4) == "0.6667");
  CHECK(to_decimal(q("-1/8"), 2) == "-0.13");
  CHECK(to_decimal(Rational(3), 0) == "3");
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(3, 4) == 0);
  CHECK(lcm_u64(4, 6) == 12);
}

TEST_CASE("rstar_u examples") {
  CHECK(rstar_u(inst(3, 2, 1, 1, 3)) == 1);
  CHECK(rstar_u(inst(3, 2, 1, 1, 0)) == 3);
  CHECK(rstar_u(inst(4, 1, 2, 1, 2)) == 2);
  CHECK(rstar_u(inst(4, 1, 1, 1, 2)) == q("4/3"));
  CHECK(rstar_u(inst(4, 4, 2, 1, 6)) == q("3/2"));
  CHECK(rstar_u(inst(4, 10, 2, 1, 12)) == q("3/2"));
  CHECK(rstar_u(inst(4, 10, 2, 1, 22)) == 0);
  for (const auto& M : memory_grid(3, 5, 11)) CHECK(rstar_u(inst(3, 2, 1, 1, M)) == q("5/2") - M / 2);
}

TEST_CASE("man_load") {
  CHECK(man_load(3, 1) == 1);
  for (int K = 1; K <= 6; ++K) {
    CHECK(man_load(K, 0) == K);
    CHECK(man_load(K, K) == 0);
  }
  CHECK(man_load(4, 2) == q("2/3"));
  CHECK_THROWS_AS(man_load(3, 4), std::invalid_argument);
}

TEST_CASE("cutset bound examples") {
  CHECK(cutset_bound(inst(4, 4, 2, 1, 0)) == 2);
  CHECK(cutset_bound(inst(3, 2, 1, 1, 5)) == 0);
  CHECK(cutset_bound(inst(3, 2, 1, 1, 0)) == 1);
  CHECK(cutset_bound(inst(4, 1, 1, 1, 3)) == 0);
}

TEST_CASE("multiaccess optimum") {
  CHECK(rstar_multiaccess(inst(4, 1, 1, 2, 2)) == 0);
  CHECK(rstar_multiaccess(inst(4, 1, 1, 3, 0)) == 4);
  CHECK(rstar_multiaccess(inst(3, 2, 1, 2, q("3/2"))) == q("3/2"));
  CHECK_THROWS_AS(rstar_multiaccess(inst(4, 1, 1)), std::invalid_argument);
}

TEST_CASE("closed forms agree with independent oracles over a sweep") {
  for (int K = 2; K <= 8; ++K) {
    for (int a = 0; a <= 5; ++a) {
      for (int b = 0; b <= 5; ++b) {
        if (a + b == 0) continue;
        auto base = inst(K, a, b);
        for (const auto& M : memory_grid(0, base.max_memory(), 13)) {
          auto p = base.with_memory(M);
          CHECK(rstar_u(p) == oracle::uncoded_optimum(K, a, b, M));
          CHECK(cutset_bound(p) == oracle::cutset(K, a, b, M));
        }
      }
    }
  }
}

TEST_CASE("rstar_u continuity, ordering, monotonicity and convexity") {
  for (int K = 2; K <= 8; ++K) {
    for (int a = 0; a <= 5; ++a) {
      for (int b = 0; b <= 5; ++b) {
        if (a + b == 0) continue;
        auto base = inst(K, a, b);
        if (base.coded_regime()) {
          // Both pieces meet at (K-1)/2.
          const Rational mid(a + b);
          CHECK(rstar_u(base.with_memory(mid)) == Rational(K - 1) / 2);
          const Rational lower = K - (K + 1) * mid / (2 * (a + b));
          const Rational upper = Rational((K - 1) * (2 * a + b)) / (2 * a) - (K - 1) * mid / (2 * a);
          CHECK(lower == upper);
        }
        auto grid = memory_grid(0, base.max_memory(), 21);
        std::vector<Rational> r;
        for (const auto& M : grid) {
          auto p = base.with_memory(M);
          r.push_back(rstar_u(p));
          CHECK(cutset_bound(p) <= r.back());
          if (K >= 2) {
            auto pm = p.with_access(2);
            CHECK(rstar_multiaccess(pm) <= r.back());
          }
        }
        for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] <= r[i - 1]);
        for (std::size_t i = 1; i + 1 < r.size(); ++i) CHECK(2 * r[i] <= r[i - 1] + r[i + 1]);
      }
    }
  }
}

TEST_CASE("gap check") {
  for (int K = 2; K <= 8; ++K) {
    for (int a = 0; a <= 4; ++a) {
      for (int b = 1; b <= 3; ++b) {
        auto g = gap_check(inst(K, a, b));
        CHECK(g.pass);
        CHECK(g.bound == (K % 2 == 0 ? 2 : 3));
        CHECK(g.ratio <= g.bound);
        if (K % 2 == 0) {
          CHECK(g.ratio_at_zero == 2);
        } else {
          CHECK(g.ratio_at_zero == Rational(2 * K) / (K - 1));
        }
      }
    }
  }
  CHECK(gap_check(inst(3, 2, 1)).ratio_at_zero == 3);
  // 21 distinct grid points on [0,3] and [3,5]; M = 5 has both bounds at 0 and is skipped.
  auto g = gap_check(inst(3, 2, 1));
  CHECK(g.points == 20);
  CHECK(g.ratio == 3);
}

TEST_CASE("grids and breakpoints") {
  auto g = memory_grid(0, 5, 11);
  REQUIRE(g.size() == 11);
  CHECK(g[1] == q("1/2"));
  CHECK(g.back() == 5);
  CHECK_THROWS_AS(memory_grid(0, 1, 1), std::invalid_argument);
  CHECK(breakpoints(inst(3, 2, 1)) == std::vector<Rational>{0, 3, 5});
  CHECK(breakpoints(inst(4, 1, 2)) == std::vector<Rational>{0, 4});
  CHECK(regime_grid(inst(3, 2, 1)).size() == 21);
  CHECK(regime_grid(inst(4, 1, 2)).size() == 11);
}
