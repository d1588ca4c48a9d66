#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loccache/model.hpp"

namespace loccache {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct VerifyOptions {
  std::vector<int> K_values{2, 3, 4, 5};
  std::vector<int> a_values{0, 1, 2, 3, 4};
  std::vector<int> b_values{1, 2, 3};
  int trials = 100;
  std::uint64_t seed = 1;
  // "" or "d3-off-by-one": builds every demand structure with D3 shifted by
  // one file, which must be caught as an invariant violation.
  std::string fault;
  // Run only these criteria (1..8); empty means all.
  std::vector<int> only;
};

struct VerifyReport {
  std::vector<CriterionResult> criteria;

  bool pass() const;
  std::string to_json() const;
};

// Demand structure honouring VerifyOptions::fault.
DemandStructure structure_for(const ProblemInstance& inst, const std::string& fault);

VerifyReport run_acceptance(const VerifyOptions& options);

// One line per criterion: "PASS  [n] name: detail (t s)".
std::string format_line(const CriterionResult& r);

}  // namespace loccache
