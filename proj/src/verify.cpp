#include "loccache/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include "json.hpp"
#include "loccache/bounds.hpp"
#include "loccache/certificate.hpp"
#include "loccache/converse.hpp"
#include "loccache/errors.hpp"
#include "loccache/schemes.hpp"

namespace loccache {

bool VerifyReport::pass() const {
  return !criteria.empty() &&
         std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.pass; });
}

std::string VerifyReport::to_json() const {
  nlohmann::ordered_json j;
  j["pass"] = pass();
  auto& arr = j["criteria"] = nlohmann::ordered_json::array();
  for (const auto& c : criteria) {
    arr.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail},
                   {"seconds", std::round(c.seconds * 1000) / 1000}});
  }
  return j.dump(2);
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << ": " << r.detail << " ("
     << std::fixed << std::setprecision(2) << r.seconds << " s)";
  return os.str();
}

DemandStructure structure_for(const ProblemInstance& inst, const std::string& fault) {
  if (fault.empty()) return build_demand_structure(inst);
  if (fault != "d3-off-by-one") throw std::invalid_argument("unknown fault '" + fault + "'");
  const int K = inst.K(), a = inst.a(), b = inst.b(), N = inst.N();
  std::vector<std::vector<int>> d1(static_cast<std::size_t>(K)), d2(d1.size()), d3(d1.size());
  for (int k = 1; k <= K; ++k) {
    auto i = static_cast<std::size_t>(k - 1);
    for (int f = (k - 1) * (a + b) + 1; f <= k * a + (k - 1) * b; ++f) d1[i].push_back(f);
    for (int f = k * a + (k - 1) * b + 1; f <= k * (a + b); ++f) d2[i].push_back(f);
    for (int j = 0; j < a; ++j) d3[i].push_back(static_cast<int>(cyclic_mod(k * (a + b) + 2 + j, N)));
  }
  return DemandStructure::from_parts(inst, std::move(d1), std::move(d2), std::move(d3));
}

namespace {

class Battery {
 public:
  explicit Battery(const VerifyOptions& o) : opt_(o) {}

  std::vector<ProblemInstance> sweep() const {
    std::vector<ProblemInstance> out;
    for (int K : opt_.K_values) {
      for (int a : opt_.a_values) {
        for (int b : opt_.b_values) {
          if (K >= 2 && a >= 0 && b >= 0 && a + b >= 1) out.push_back(ProblemInstance::create(K, a, b));
        }
      }
    }
    return out;
  }

  DemandStructure structure(const ProblemInstance& inst) const { return structure_for(inst, opt_.fault); }

  // 1: worst-case load of the memory-sharing scheme equals the closed form.
  std::string achievability(bool& ok) const {
    std::size_t points = 0, instances = 0;
    for (const auto& base : sweep()) {
      auto ds = structure(base);
      ++instances;
      for (const auto& M : regime_grid(base)) {
        auto inst = base.with_memory(M);
        auto got = worst_case_load(inst, ds, make_scheme(inst, ds));
        ++points;
        if (got != rstar_u(inst)) {
          ok = false;
          return "mismatch at " + inst.describe() + ": scheme " + to_string(got) + " vs rstar_u " +
                 to_string(rstar_u(inst));
        }
      }
    }
    ok = true;
    return std::to_string(instances) + " instances, " + std::to_string(points) +
           " memory points, exact equality";
  }

  // 2: the (3,2,1) instance on M in [3,5] and its LP at M = 3.
  std::string example_321(bool& ok) const {
    auto base = ProblemInstance::create(3, 2, 1);
    auto ds = structure(base);
    for (const auto& M : memory_grid(Rational(3), Rational(5), 11)) {
      auto inst = base.with_memory(M);
      Rational expect = Rational(5, 2) - M / 2;
      if (rstar_u(inst) != expect || worst_case_load(inst, ds, make_scheme(inst, ds)) != expect) {
        ok = false;
        return "load differs from 5/2 - M/2 at M = " + to_string(M);
      }
    }
    auto inst = base.with_memory(Rational(3));
    auto fam = full_family(ds);
    auto lp = solve_converse(inst, ds, fam);
    ok = lp.optimum == 1;
    return "R = 5/2 - M/2 on 11 points of [3,5]; full-family LP at M=3 = " + to_string(lp.optimum) +
           " (" + std::to_string(fam.size()) + " rows, expected 1/1)";
  }

  // 3: full-family LP equals the closed form at every corner memory.
  std::string lp_corners(bool& ok) const {
    const int cases[5][3] = {{2, 1, 1}, {3, 1, 1}, {3, 2, 1}, {4, 1, 1}, {4, 1, 2}};
    std::size_t solved = 0;
    for (const auto& c : cases) {
      auto base = ProblemInstance::create(c[0], c[1], c[2]);
      auto ds = structure(base);
      auto fam = full_family(ds);
      for (const auto& M : breakpoints(base)) {
        auto inst = base.with_memory(M);
        auto lp = solve_converse(inst, ds, fam);
        ++solved;
        if (lp.optimum != rstar_u(inst)) {
          ok = false;
          return "LP " + to_string(lp.optimum) + " != rstar_u " + to_string(rstar_u(inst)) + " at " +
                 inst.describe();
        }
      }
    }
    ok = true;
    return std::to_string(solved) + " corner LPs over 5 instances, exact equality";
  }

  // 4: certificates pass on matching regimes and are rejected otherwise.
  std::string certificates(bool& ok) const {
    std::size_t passed = 0, rejected = 0;
    for (const auto& inst : sweep()) {
      auto ds = structure(inst);
      for (Regime r : {Regime::kHighM, Regime::kLowM, Regime::kLargeB}) {
        const bool matching = r == Regime::kLargeB ? !inst.coded_regime() : inst.coded_regime();
        try {
          auto rep = certificate_check(inst, ds, r);
          if (!matching || !rep.pass) {
            ok = false;
            return regime_name(r) + " on " + inst.describe() +
                   (matching ? " failed its residual check" : " was accepted on a mismatched regime");
          }
          ++passed;
        } catch (const RegimeMismatch& e) {
          if (matching) {
            ok = false;
            return regime_name(r) + " on matching " + inst.describe() + " raised: " + e.what();
          }
          ++rejected;
        }
      }
    }
    ok = true;
    return std::to_string(passed) + " certificates verified, " + std::to_string(rejected) +
           " mismatched regimes rejected";
  }

  // 5: order-optimality gap against the cut-set bound.
  std::string gap(bool& ok) const {
    std::size_t n = 0;
    Rational worst_even(0), worst_odd(0);
    for (const auto& inst : sweep()) {
      structure(inst);
      auto g = gap_check(inst);
      const int K = inst.K();
      Rational at_zero = K % 2 == 0 ? Rational(2) : Rational(2 * K, K - 1);
      at_zero.canonicalize();
      if (!g.pass || g.ratio_at_zero != at_zero) {
        ok = false;
        return inst.describe() + ": ratio " + to_string(g.ratio) + ", at M=0 " + to_string(g.ratio_at_zero);
      }
      (K % 2 == 0 ? worst_even : worst_odd) = rational_max(K % 2 == 0 ? worst_even : worst_odd, g.ratio);
      ++n;
    }
    ok = true;
    return std::to_string(n) + " instances; max ratio even K " + to_string(worst_even) + " (<= 2), odd K " +
           to_string(worst_odd) + " (<= 3); M=0 ratio exactly 2 / 2K/(K-1)";
  }

  // 6: multiaccess load and L-independence.
  std::string multiaccess(bool& ok) const {
    std::size_t points = 0, compared = 0;
    std::mt19937_64 rng(opt_.seed);
    for (const auto& base : sweep()) {
      auto ds = structure(base);
      const Rational ab(base.a() + base.b());
      std::vector<DemandVector> probe;
      if (demand_count(ds) <= 5000) {
        probe = enumerate_demands(ds, false);
      } else {
        for (int s = 0; s < 200; ++s) probe.push_back(random_demand(ds, rng));
      }
      std::vector<BroadcastTranscript> reference;
      for (int L = 2; L <= base.K(); ++L) {
        auto inst = base.with_access(L).with_memory(ab);
        auto scheme = make_scheme(inst, ds);
        if (worst_case_load(inst, ds, scheme) != 0) {
          ok = false;
          return "non-zero load at M = a+b for " + inst.describe();
        }
        for (std::size_t i = 0; i < probe.size(); ++i) {
          auto tr = deliver(inst, ds, scheme, probe[i]);
          if (L == 2) {
            reference.push_back(std::move(tr));
          } else if (!tr.same_structure(reference[i])) {
            ok = false;
            return "transcript depends on L for " + inst.describe();
          }
          ++compared;
        }
        auto grid = memory_grid(Rational(0), ab, 11);
        for (const auto& M : memory_grid(Rational(0), base.max_memory(), 11)) grid.push_back(M);
        for (const auto& M : grid) {
          auto at = inst.with_memory(M);
          auto got = worst_case_load(at, ds, make_scheme(at, ds));
          ++points;
          if (got != rstar_multiaccess(at)) {
            ok = false;
            return "scheme " + to_string(got) + " != " + to_string(rstar_multiaccess(at)) + " at " + at.describe();
          }
        }
      }
    }
    ok = true;
    return std::to_string(points) + " (instance, L, M) points match K - KM/(a+b); " + std::to_string(compared) +
           " transcripts at M=a+b empty and identical across L";
  }

  // 7: bit-exact decoding.
  std::string round_trip(bool& ok) const {
    std::mt19937_64 rng(opt_.seed);
    std::size_t sims = 0, trials = 0;
    for (const auto& base : sweep()) {
      auto ds = structure(base);
      std::vector<ProblemInstance> configs;
      auto bp = breakpoints(base);
      for (std::size_t i = 0; i < bp.size(); ++i) {
        configs.push_back(base.with_memory(bp[i]));
        if (i + 1 < bp.size()) configs.push_back(base.with_memory((bp[i] + bp[i + 1]) / 3));
      }
      for (int L = 2; L <= std::min(base.K(), 3); ++L) {
        configs.push_back(base.with_access(L).with_memory(Rational(base.a() + base.b(), 2)));
        configs.push_back(base.with_access(L).with_memory(Rational(base.a() + base.b())));
      }
      auto check = [&](const ProblemInstance& inst, const SchemeSpec& scheme, const DemandVector& d,
                       const Library& lib, const std::vector<CacheNode>& caches) -> std::string {
        auto tr = deliver_bits(inst, ds, scheme, d, lib);
        const auto B = 8 * static_cast<std::uint64_t>(lib.front().size());
        Rational bits(static_cast<unsigned long>(tr.total_bits));
        if (bits != Rational(static_cast<unsigned long>(B)) * delivery_load(inst, ds, scheme, d)) {
          return "bits != B x load for " + d.to_string() + " at " + inst.describe();
        }
        for (int k = 1; k <= inst.K(); ++k) {
          if (decode(inst, ds, scheme, d, k, caches, tr) != lib[static_cast<std::size_t>(d[k] - 1)]) {
            return "user " + std::to_string(k) + " decoded wrong bytes for " + d.to_string() + " at " +
                   inst.describe();
          }
        }
        ++sims;
        return {};
      };
      for (int t = 0; t < opt_.trials; ++t) {
        const auto& inst = configs[static_cast<std::size_t>(t) % configs.size()];
        auto scheme = make_scheme(inst, ds);
        const auto sub = subpacketization(inst, scheme);
        auto lib = random_library(inst.N(), static_cast<std::size_t>(sub * (1 + rng() % 3)), rng());
        auto caches = fill_caches(inst, ds, scheme, lib);
        auto err = check(inst, scheme, random_demand(ds, rng), lib, caches);
        ++trials;
        if (!err.empty()) {
          ok = false;
          return err;
        }
      }
      if (base.K() <= 3) {
        for (const auto& inst : configs) {
          auto scheme = make_scheme(inst, ds);
          auto lib = random_library(inst.N(), static_cast<std::size_t>(subpacketization(inst, scheme)), rng());
          auto caches = fill_caches(inst, ds, scheme, lib);
          std::string err;
          for_each_demand(ds, false, [&](const DemandVector& d) {
            if (err.empty()) err = check(inst, scheme, d, lib, caches);
          });
          if (!err.empty()) {
            ok = false;
            return err;
          }
        }
      }
    }
    ok = true;
    return std::to_string(trials) + " random trials + exhaustive K<=3 demands: " + std::to_string(sims) +
           " deliveries decoded byte-identically, bits = B x load";
  }

  // 8: the loose sum-of-all-rows bound.
  std::string sum_all(bool& ok) const {
    auto inst = ProblemInstance::create(3, 2, 1, 1, Rational(3));
    auto ds = structure(inst);
    auto loose = sum_all_bound(inst, ds);
    auto lp = solve_converse(inst, ds, full_family(ds));
    ok = loose <= lp.optimum && lp.optimum == 1 && loose == Rational(54, 95);
    return "sum_all_bound(3,2,1,M=3) = " + to_string(loose) + " (reference 54/95), <= LP optimum " +
           to_string(lp.optimum);
  }

  static DemandVector random_demand(const DemandStructure& ds, std::mt19937_64& rng) {
    std::vector<int> files;
    for (int k = 1; k <= ds.K(); ++k) {
      const auto& set = ds.demand_set(k);
      files.push_back(set[rng() % set.size()]);
    }
    return make_demand(ds, std::move(files));
  }

 private:
  VerifyOptions opt_;
};

}  // namespace

VerifyReport run_acceptance(const VerifyOptions& options) {
  Battery battery(options);
  using Fn = std::string (Battery::*)(bool&) const;
  const std::vector<std::tuple<int, std::string, Fn>> plan = {
      {1, "achievability: worst-case load = rstar_u over the sweep", &Battery::achievability},
      {2, "(3,2,1) example: R = 5/2 - M/2 on [3,5], LP(M=3) = 1", &Battery::example_321},
      {3, "converse LP = rstar_u at corner memories", &Battery::lp_corners},
      {4, "weighted-sum certificates by regime", &Battery::certificates},
      {5, "cut-set gap within 2 (even K) / 3 (odd K)", &Battery::gap},
      {6, "multiaccess: load K - KM/(a+b), zero and L-independent at M = a+b", &Battery::multiaccess},
      {7, "bit-exact decode round trip", &Battery::round_trip},
      {8, "sum-of-all-rows loose bound", &Battery::sum_all},
  };
  VerifyReport report;
  for (const auto& [id, name, fn] : plan) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    CriterionResult r;
    r.id = id;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      bool ok = false;
      r.detail = (battery.*fn)(ok);
      r.pass = ok;
    } catch (const InvariantViolation& e) {
      r.pass = false;
      r.detail = "invariant '" + e.invariant() + "' violated: " + e.what();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.criteria.push_back(std::move(r));
  }
  return report;
}

}  // namespace loccache
