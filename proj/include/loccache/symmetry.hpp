#pragma once

#include <vector>

#include "loccache/model.hpp"
#include "loccache/simplex.hpp"

namespace loccache {

// A joint relabelling of cache nodes and files that preserves every demand
// set: file f with demander set S maps to a file with demander set node_map(S).
struct Symmetry {
  std::vector<int> node_map;  // node_map[k-1] = image of node k
  std::vector<int> file_map;  // file_map[f-1] = image of file f
};

// Generators: rotation, reflection, and transpositions of files with equal
// demander sets.
std::vector<Symmetry> instance_symmetries(const DemandStructure& ds);

NodeMask apply_to_mask(const Symmetry& g, NodeMask mask);

// Orbit id of every subfile variable (file, mask) under the generated group,
// numbered 0.. in order of first appearance by variable index.
std::vector<int> variable_orbits(const DemandStructure& ds);

struct SymmetrizedLp {
  LinearProgram lp;           // orbit variables, then R
  std::vector<int> orbit_of;  // per original subfile variable
  int orbit_count = 0;
};

// Substitutes y_{i,T} = z_{orbit(i,T)} into an LP built by build_lp and
// merges identical rows. Throws InvariantViolation ("symmetry-closed") when
// the row set is not mapped onto itself by every generator.
SymmetrizedLp symmetrize(const LinearProgram& lp, const DemandStructure& ds);

}  // namespace loccache
