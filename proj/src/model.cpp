#include "loccache/model.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "loccache/errors.hpp"

namespace loccache {

std::int64_t cyclic_mod(std::int64_t x, std::int64_t m) {
  if (m < 1) throw std::invalid_argument("cyclic_mod requires a positive modulus");
  std::int64_t r = x % m;
  if (r <= 0) r += m;
  return r;
}

ProblemInstance ProblemInstance::create(int K, int a, int b, int L, const Rational& M) {
  if (K < 2) throw std::invalid_argument("K must be at least 2");
  if (a < 0 || b < 0) throw std::invalid_argument("a and b must be non-negative");
  if (a + b < 1) throw std::invalid_argument("a + b must be at least 1");
  if (L < 1 || L > K) throw std::invalid_argument("L must lie in [1, K]");
  if (M < 0) throw std::invalid_argument("M must be non-negative");
  Rational cap(2 * a + b);
  if (M > cap) return ProblemInstance(K, a, b, L, cap, true);
  return ProblemInstance(K, a, b, L, M, false);
}

ProblemInstance ProblemInstance::with_memory(const Rational& M) const {
  return create(K_, a_, b_, L_, M);
}

ProblemInstance ProblemInstance::with_access(int L) const {
  return create(K_, a_, b_, L, M_);
}

std::string ProblemInstance::describe() const {
  std::ostringstream os;
  os << "(K=" << K_ << ", a=" << a_ << ", b=" << b_ << ", L=" << L_
     << ", M=" << loccache::to_string(M_) << ")";
  return os.str();
}

std::string ProblemInstance::to_json() const {
  nlohmann::ordered_json j;
  j["K"] = K_;
  j["a"] = a_;
  j["b"] = b_;
  j["L"] = L_;
  j["M"] = loccache::to_string(M_);
  return j.dump();
}

ProblemInstance ProblemInstance::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  auto get_int = [&](const char* key, int fallback, bool required) {
    if (!j.contains(key)) {
      if (required) throw std::invalid_argument(std::string("missing key ") + key);
      return fallback;
    }
    return j.at(key).get<int>();
  };
  Rational M(0);
  if (j.contains("M")) {
    const auto& m = j.at("M");
    M = m.is_string() ? parse_rational(m.get<std::string>()) : Rational(m.get<long>());
  }
  return create(get_int("K", 0, true), get_int("a", 0, true), get_int("b", 0, true),
                get_int("L", 1, false), M);
}

namespace {

void require(bool ok, const char* invariant, const std::string& detail) {
  if (!ok) throw InvariantViolation(invariant, detail);
}

std::string region_label(const char* part, int k) {
  return std::string(part) + "[" + std::to_string(k) + "]";
}

}  // namespace

DemandStructure DemandStructure::from_parts(const ProblemInstance& inst,
                                            std::vector<std::vector<int>> shared_left,
                                            std::vector<std::vector<int>> unique,
                                            std::vector<std::vector<int>> shared_right) {
  const int K = inst.K(), a = inst.a(), b = inst.b(), N = inst.N();
  const auto Ks = static_cast<std::size_t>(K);
  require(shared_left.size() == Ks && unique.size() == Ks && shared_right.size() == Ks,
          "region-count", "expected one entry per region");

  DemandStructure ds;
  ds.K_ = K;
  ds.N_ = N;
  ds.a_ = a;
  ds.b_ = b;
  ds.d1_ = std::move(shared_left);
  ds.d2_ = std::move(unique);
  ds.d3_ = std::move(shared_right);

  for (int k = 1; k <= K; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    require(static_cast<int>(ds.d1_[i].size()) == a, "part-sizes", region_label("|D1|", k) + " != a");
    require(static_cast<int>(ds.d2_[i].size()) == b, "part-sizes", region_label("|D2|", k) + " != b");
    require(static_cast<int>(ds.d3_[i].size()) == a, "part-sizes", region_label("|D3|", k) + " != a");
    for (const auto* part : {&ds.d1_[i], &ds.d2_[i], &ds.d3_[i]}) {
      for (int f : *part) require(f >= 1 && f <= N, "file-range", "file index outside [1, N]");
    }
  }
  for (int k = 1; k <= K; ++k) {
    int right = static_cast<int>(cyclic_mod(k + 1, K));
    require(ds.d3_[static_cast<std::size_t>(k - 1)] == ds.d1_[static_cast<std::size_t>(right - 1)],
            "D3-equals-right-D1", region_label("D3", k) + " != " + region_label("D1", right));
  }

  ds.d_.resize(Ks);
  for (std::size_t i = 0; i < Ks; ++i) {
    std::set<int> all;
    all.insert(ds.d1_[i].begin(), ds.d1_[i].end());
    all.insert(ds.d2_[i].begin(), ds.d2_[i].end());
    all.insert(ds.d3_[i].begin(), ds.d3_[i].end());
    require(static_cast<int>(all.size()) == 2 * a + b, "demand-set-size",
            region_label("|D|", static_cast<int>(i) + 1) + " != 2a+b");
    ds.d_[i].assign(all.begin(), all.end());
  }

  for (int k1 = 1; k1 <= K; ++k1) {
    for (int k2 = 1; k2 <= K; ++k2) {
      auto gap = cyclic_mod(k1 - k2, K);
      if (gap < 2 || gap > K - 2) continue;
      const auto& x = ds.d_[static_cast<std::size_t>(k1 - 1)];
      const auto& y = ds.d_[static_cast<std::size_t>(k2 - 1)];
      std::vector<int> common;
      std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
      require(common.empty(), "non-neighbour-disjoint",
              region_label("D", k1) + " meets " + region_label("D", k2));
    }
  }

  std::set<int> c1, c2;
  for (std::size_t i = 0; i < Ks; ++i) {
    c1.insert(ds.d1_[i].begin(), ds.d1_[i].end());
    c2.insert(ds.d2_[i].begin(), ds.d2_[i].end());
  }
  require(static_cast<int>(c1.size()) == a * K, "class-partition", "|C1| != aK");
  require(static_cast<int>(c2.size()) == b * K, "class-partition", "|C2| != bK");
  for (int f : c1) require(!c2.count(f), "class-partition", "C1 and C2 intersect");
  ds.c1_.assign(c1.begin(), c1.end());
  ds.c2_.assign(c2.begin(), c2.end());
  require(static_cast<int>(c1.size() + c2.size()) == N, "covers-library", "C1 ∪ C2 != [N]");

  const auto Ns = static_cast<std::size_t>(N);
  ds.demanders_.assign(Ns, 0);
  ds.home_.assign(Ns, 0);
  ds.class_.assign(Ns, FileClass::kUnique);
  for (int k = 1; k <= K; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    for (int f : ds.d_[i]) ds.demanders_[static_cast<std::size_t>(f - 1)] |= node_bit(k);
    for (int f : ds.d1_[i]) {
      ds.home_[static_cast<std::size_t>(f - 1)] = k;
      ds.class_[static_cast<std::size_t>(f - 1)] = FileClass::kShared;
    }
    for (int f : ds.d2_[i]) ds.home_[static_cast<std::size_t>(f - 1)] = k;
  }
  for (int f = 1; f <= N; ++f) {
    require(ds.demanders_[static_cast<std::size_t>(f - 1)] != 0, "covers-library",
            "file " + std::to_string(f) + " is not demandable");
  }
  return ds;
}

bool DemandStructure::can_demand(int region, int file) const {
  if (region < 1 || region > K_ || file < 1 || file > N_) return false;
  return (demanders_[static_cast<std::size_t>(file - 1)] & node_bit(region)) != 0;
}

FileClass DemandStructure::file_class(int file) const {
  return class_.at(static_cast<std::size_t>(file - 1));
}

DemandStructure build_demand_structure(const ProblemInstance& inst) {
  const int K = inst.K(), a = inst.a(), b = inst.b(), N = inst.N();
  std::vector<std::vector<int>> d1(static_cast<std::size_t>(K)), d2(d1.size()), d3(d1.size());
  for (int k = 1; k <= K; ++k) {
    auto& left = d1[static_cast<std::size_t>(k - 1)];
    for (int f = (k - 1) * (a + b) + 1; f <= k * a + (k - 1) * b; ++f) left.push_back(f);
    auto& own = d2[static_cast<std::size_t>(k - 1)];
    for (int f = k * a + (k - 1) * b + 1; f <= k * (a + b); ++f) own.push_back(f);
    auto& right = d3[static_cast<std::size_t>(k - 1)];
    for (int j = 0; j < a; ++j) right.push_back(static_cast<int>(cyclic_mod(k * (a + b) + 1 + j, N)));
  }
  return DemandStructure::from_parts(inst, std::move(d1), std::move(d2), std::move(d3));
}

std::string DemandVector::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(files[i]);
  }
  return s + ")";
}

DemandVector make_demand(const DemandStructure& ds, std::vector<int> files) {
  if (static_cast<int>(files.size()) != ds.K()) {
    throw std::invalid_argument("demand vector must have one entry per region");
  }
  for (int k = 1; k <= ds.K(); ++k) {
    if (!ds.can_demand(k, files[static_cast<std::size_t>(k - 1)])) {
      throw std::invalid_argument("file " + std::to_string(files[static_cast<std::size_t>(k - 1)]) +
                                  " is not in D[" + std::to_string(k) + "]");
    }
  }
  DemandVector d;
  d.files = std::move(files);
  auto sorted = d.files;
  std::sort(sorted.begin(), sorted.end());
  d.distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  return d;
}

void for_each_demand(const DemandStructure& ds, bool distinct_only,
                     const std::function<void(const DemandVector&)>& visit) {
  const int K = ds.K();
  std::vector<std::size_t> pos(static_cast<std::size_t>(K), 0);
  DemandVector d;
  d.files.resize(static_cast<std::size_t>(K));
  std::vector<int> seen(static_cast<std::size_t>(ds.N()) + 1, 0);
  while (true) {
    int repeats = 0;
    for (int k = 0; k < K; ++k) {
      int f = ds.demand_set(k + 1)[pos[static_cast<std::size_t>(k)]];
      d.files[static_cast<std::size_t>(k)] = f;
      if (seen[static_cast<std::size_t>(f)]++) ++repeats;
    }
    for (int f : d.files) seen[static_cast<std::size_t>(f)] = 0;
    d.distinct = repeats == 0;
    if (!distinct_only || d.distinct) visit(d);

    int k = K - 1;
    while (k >= 0) {
      auto& p = pos[static_cast<std::size_t>(k)];
      if (++p < ds.demand_set(k + 1).size()) break;
      p = 0;
      --k;
    }
    if (k < 0) return;
  }
}

std::vector<DemandVector> enumerate_demands(const DemandStructure& ds, bool distinct_only) {
  std::vector<DemandVector> out;
  for_each_demand(ds, distinct_only, [&](const DemandVector& d) { out.push_back(d); });
  return out;
}

std::uint64_t demand_count(const DemandStructure& ds) {
  const std::uint64_t per = static_cast<std::uint64_t>(2 * ds.a() + ds.b());
  std::uint64_t total = 1;
  for (int k = 0; k < ds.K(); ++k) {
    if (per != 0 && total > std::numeric_limits<std::uint64_t>::max() / per) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= per;
  }
  return total;
}

std::string mask_to_string(NodeMask mask, int K) {
  std::string s = "{";
  bool first = true;
  for (int j = 1; j <= K; ++j) {
    if (mask & node_bit(j)) {
      if (!first) s += ",";
      s += std::to_string(j);
      first = false;
    }
  }
  return s + "}";
}

}  // namespace loccache
