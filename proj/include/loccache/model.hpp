#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "loccache/rational.hpp"

namespace loccache {

// Subsets of cache nodes are K-bit masks; bit j-1 stands for node j.
using NodeMask = std::uint32_t;

constexpr NodeMask node_bit(int node) { return NodeMask{1} << (node - 1); }

// Unique value in [1, m] congruent to x modulo m.
std::int64_t cyclic_mod(std::int64_t x, std::int64_t m);

// System parameters (K, a, b, L, M). N = K(a+b) is derived.
//
// Construction validates K >= 2, a + b >= 1, 1 <= L <= K and M >= 0. A cache
// size above 2a+b is clamped to 2a+b (the load is already 0 there) and the
// clamp is recorded.
class ProblemInstance {
 public:
  static ProblemInstance create(int K, int a, int b, int L = 1,
                                const Rational& M = Rational(0));

  int K() const { return K_; }
  int a() const { return a_; }
  int b() const { return b_; }
  int L() const { return L_; }
  int N() const { return K_ * (a_ + b_); }
  const Rational& M() const { return M_; }
  bool memory_clamped() const { return clamped_; }

  // Largest cache size of interest, 2a+b.
  Rational max_memory() const { return Rational(2 * a_ + b_); }

  ProblemInstance with_memory(const Rational& M) const;
  ProblemInstance with_access(int L) const;

  // Regime switch for the optimal uncoded load: true when b(K-1) < 2a.
  bool coded_regime() const { return b_ * (K_ - 1) < 2 * a_; }

  std::string describe() const;

  // Flat key-value document {"K","a","b","L","M":"p/q"}.
  std::string to_json() const;
  static ProblemInstance from_json(const std::string& text);

  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;

 private:
  ProblemInstance(int K, int a, int b, int L, Rational M, bool clamped)
      : K_(K), a_(a), b_(b), L_(L), M_(std::move(M)), clamped_(clamped) {}

  int K_;
  int a_;
  int b_;
  int L_;
  Rational M_;
  bool clamped_;
};

enum class FileClass { kShared, kUnique };

// Per-region demand sets D[k] = D1[k] ∪ D2[k] ∪ D3[k] and the file classes
// C1 (files shared by neighbouring regions) and C2 (region-unique files).
// Files and regions are 1-based.
class DemandStructure {
 public:
  // Validates every structural invariant and throws InvariantViolation
  // naming the first one that fails.
  static DemandStructure from_parts(const ProblemInstance& inst,
                                    std::vector<std::vector<int>> shared_left,
                                    std::vector<std::vector<int>> unique,
                                    std::vector<std::vector<int>> shared_right);

  int K() const { return K_; }
  int N() const { return N_; }
  int a() const { return a_; }
  int b() const { return b_; }

  const std::vector<int>& shared_left(int k) const { return d1_.at(k - 1); }
  const std::vector<int>& unique(int k) const { return d2_.at(k - 1); }
  const std::vector<int>& shared_right(int k) const { return d3_.at(k - 1); }
  // Sorted ascending.
  const std::vector<int>& demand_set(int k) const { return d_.at(k - 1); }

  const std::vector<int>& shared_files() const { return c1_; }
  const std::vector<int>& unique_files() const { return c2_; }

  bool can_demand(int region, int file) const;
  FileClass file_class(int file) const;
  // Mask of regions whose demand set contains the file.
  NodeMask demanders(int file) const { return demanders_.at(file - 1); }
  // The region k with file ∈ D1[k] ∪ D2[k].
  int home_region(int file) const { return home_.at(file - 1); }

 private:
  DemandStructure() = default;

  int K_ = 0;
  int N_ = 0;
  int a_ = 0;
  int b_ = 0;
  std::vector<std::vector<int>> d1_, d2_, d3_, d_;
  std::vector<int> c1_, c2_;
  std::vector<NodeMask> demanders_;
  std::vector<int> home_;
  std::vector<FileClass> class_;
};

DemandStructure build_demand_structure(const ProblemInstance& inst);

// One requested file per region.
struct DemandVector {
  std::vector<int> files;  // files[k-1] = d_k
  bool distinct = true;

  int operator[](int region) const { return files[static_cast<std::size_t>(region - 1)]; }
  std::string to_string() const;
};

// Validates d_k ∈ D[k] for every k.
DemandVector make_demand(const DemandStructure& ds, std::vector<int> files);

// Visits ∏_k D[k] in lexicographic order; the visitor sees a reused object.
void for_each_demand(const DemandStructure& ds, bool distinct_only,
                     const std::function<void(const DemandVector&)>& visit);

std::vector<DemandVector> enumerate_demands(const DemandStructure& ds, bool distinct_only);

// (2a+b)^K, saturating at UINT64_MAX.
std::uint64_t demand_count(const DemandStructure& ds);

std::string mask_to_string(NodeMask mask, int K);

}  // namespace loccache
