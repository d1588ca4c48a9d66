#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loccache/converse.hpp"

namespace loccache {

struct WeightedFamily {
  Regime family;
  Rational weight;
  std::size_t rows = 0;
};

// Per-variable slack of the weighted average row against the closed form:
// residual = coefficient - (class weight - memory weight * |T|).
struct ResidualEntry {
  std::uint32_t var = 0;
  FileClass file_class = FileClass::kShared;
  int subset_size = 0;
  Rational coefficient;
  Rational target;
  Rational residual;
};

struct CertificateReport {
  Regime regime = Regime::kHighM;
  bool pass = false;
  // θ = b(K-1)/(2a) for HIGH_M, λ = (K+1)b/(2(a+b)) for LOW_M,
  // μ = 2aK/((K-1)(2a+b)) for LARGE_B.
  Rational gate_weight;
  std::vector<WeightedFamily> components;
  Rational w_shared;  // multiplier of the C1 file-size total (= aK)
  Rational w_unique;  // multiplier of the C2 file-size total (= bK)
  Rational w_memory;  // multiplier of the aggregate memory row (<= KM)
  // Derived bound R >= constant - slope * M.
  Rational constant;
  Rational slope;
  Rational expected_constant;
  Rational expected_slope;
  bool matches_rstar = false;  // the bound agrees with rstar_u on its memory piece
  Rational min_residual;
  std::vector<ResidualEntry> residuals;

  std::string to_json(int K) const;
};

// Rebuilds the weighted-sum argument for a regime from the selected genie
// rows and checks every residual is non-negative and the resulting bound
// equals the closed form. Throws RegimeMismatch when the mixing weight leaves
// its admissible interval ([0,1) for HIGH_M and LOW_M, [0,1] for LARGE_B).
CertificateReport certificate_check(const ProblemInstance& inst, const DemandStructure& ds,
                                    Regime regime, GenieForm form = GenieForm::kTruncated);

}  // namespace loccache
