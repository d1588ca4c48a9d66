#include "loccache/symmetry.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

#include "loccache/converse.hpp"
#include "loccache/errors.hpp"

namespace loccache {

namespace {

// Files grouped by demander set, each group ascending.
std::map<NodeMask, std::vector<int>> signature_classes(const DemandStructure& ds) {
  std::map<NodeMask, std::vector<int>> classes;
  for (int f = 1; f <= ds.N(); ++f) classes[ds.demanders(f)].push_back(f);
  return classes;
}

std::vector<int> identity_map(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 1);
  return v;
}

NodeMask map_mask(const std::vector<int>& node_map, NodeMask mask) {
  NodeMask out = 0;
  for (std::size_t k = 0; k < node_map.size(); ++k) {
    if (mask & (NodeMask{1} << k)) out |= node_bit(node_map[k]);
  }
  return out;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x != y) parent_[std::max(x, y)] = std::min(x, y);
  }

 private:
  std::vector<std::size_t> parent_;
};

using RowKey = std::tuple<int, Rational, std::vector<std::pair<int, Rational>>>;

RowKey row_key(const LpRow& row) {
  auto coeffs = row.coeffs;
  std::sort(coeffs.begin(), coeffs.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return {static_cast<int>(row.sense), row.rhs, std::move(coeffs)};
}

}  // namespace

NodeMask apply_to_mask(const Symmetry& g, NodeMask mask) { return map_mask(g.node_map, mask); }

std::vector<Symmetry> instance_symmetries(const DemandStructure& ds) {
  const int K = ds.K();
  const auto classes = signature_classes(ds);
  std::vector<Symmetry> gens;

  std::vector<std::vector<int>> node_perms;
  std::vector<int> rot, refl;
  for (int k = 1; k <= K; ++k) {
    rot.push_back(static_cast<int>(cyclic_mod(k + 1, K)));
    refl.push_back(static_cast<int>(cyclic_mod(1 - k, K)));
  }
  node_perms.push_back(rot);
  node_perms.push_back(refl);
  for (const auto& pi : node_perms) {
    Symmetry g{pi, std::vector<int>(static_cast<std::size_t>(ds.N()), 0)};
    bool ok = true;
    for (const auto& [sig, files] : classes) {
      auto it = classes.find(map_mask(pi, sig));
      if (it == classes.end() || it->second.size() != files.size()) {
        ok = false;
        break;
      }
      for (std::size_t j = 0; j < files.size(); ++j) {
        g.file_map[static_cast<std::size_t>(files[j] - 1)] = it->second[j];
      }
    }
    if (ok) gens.push_back(std::move(g));
  }
  for (const auto& [sig, files] : classes) {
    for (std::size_t j = 0; j + 1 < files.size(); ++j) {
      Symmetry g{identity_map(K), identity_map(ds.N())};
      std::swap(g.file_map[static_cast<std::size_t>(files[j] - 1)],
                g.file_map[static_cast<std::size_t>(files[j + 1] - 1)]);
      gens.push_back(std::move(g));
    }
  }
  return gens;
}

namespace {

std::uint32_t apply_to_var(const Symmetry& g, int K, std::uint32_t v) {
  auto [file, mask] = var_of(K, v);
  return var_index(K, g.file_map[static_cast<std::size_t>(file - 1)], map_mask(g.node_map, mask));
}

}  // namespace

std::vector<int> variable_orbits(const DemandStructure& ds) {
  const int K = ds.K();
  const std::uint32_t n = load_var_index(K, ds.N());
  UnionFind uf(n);
  for (const auto& g : instance_symmetries(ds)) {
    for (std::uint32_t v = 0; v < n; ++v) uf.unite(v, apply_to_var(g, K, v));
  }
  std::vector<int> orbit(n, -1);
  std::map<std::size_t, int> ids;
  for (std::uint32_t v = 0; v < n; ++v) {
    auto [it, inserted] = ids.try_emplace(uf.find(v), static_cast<int>(ids.size()));
    orbit[v] = it->second;
  }
  return orbit;
}

SymmetrizedLp symmetrize(const LinearProgram& lp, const DemandStructure& ds) {
  const int K = ds.K();
  const std::uint32_t n = load_var_index(K, ds.N());
  if (lp.num_vars != static_cast<int>(n) + 1) {
    throw std::invalid_argument("LP does not use the subfile variable layout");
  }
  const auto gens = instance_symmetries(ds);

  std::set<RowKey> keys;
  for (const auto& row : lp.rows) keys.insert(row_key(row));
  for (const auto& g : gens) {
    for (const auto& row : lp.rows) {
      LpRow image = row;
      for (auto& [j, c] : image.coeffs) {
        if (static_cast<std::uint32_t>(j) < n) j = static_cast<int>(apply_to_var(g, K, static_cast<std::uint32_t>(j)));
      }
      if (!keys.count(row_key(image))) {
        throw InvariantViolation("symmetry-closed", "row set is not invariant under the instance symmetries");
      }
    }
  }

  SymmetrizedLp out;
  out.orbit_of = variable_orbits(ds);
  out.orbit_count = n == 0 ? 0 : *std::max_element(out.orbit_of.begin(), out.orbit_of.end()) + 1;
  const int R = out.orbit_count;
  auto project = [&](const std::vector<std::pair<int, Rational>>& coeffs) {
    std::map<int, Rational> acc;
    for (const auto& [j, c] : coeffs) {
      int col = static_cast<std::uint32_t>(j) < n ? out.orbit_of[static_cast<std::size_t>(j)] : R;
      acc[col] += c;
    }
    std::vector<std::pair<int, Rational>> res;
    for (auto& [col, c] : acc) {
      if (c != 0) res.emplace_back(col, c);
    }
    return res;
  };

  out.lp.num_vars = R + 1;
  for (int o = 0; o < R; ++o) out.lp.var_names.push_back("z" + std::to_string(o));
  out.lp.var_names.emplace_back("R");
  out.lp.objective = project(lp.objective);
  std::map<RowKey, std::size_t> seen;
  for (const auto& row : lp.rows) {
    LpRow r;
    r.sense = row.sense;
    r.rhs = row.rhs;
    r.lazy = row.lazy;
    r.coeffs = project(row.coeffs);
    auto [it, inserted] = seen.try_emplace(row_key(r), out.lp.rows.size());
    if (inserted) {
      out.lp.rows.push_back(std::move(r));
    } else if (!r.lazy) {
      out.lp.rows[it->second].lazy = false;
    }
  }
  return out;
}

}  // namespace loccache
