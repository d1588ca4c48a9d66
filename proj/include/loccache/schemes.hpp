#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "loccache/model.hpp"
#include "loccache/placement.hpp"
#include "loccache/rational.hpp"

namespace loccache {

enum class SegmentKind { kUncodedDirect, kMan, kLocalFull, kMultiaccessLocal };

// One memory-sharing component: a contiguous fraction of every file served
// by one basic scheme. `t` only matters for kMan.
struct Segment {
  SegmentKind kind = SegmentKind::kUncodedDirect;
  Rational fraction = 1;
  int t = 1;

  // "UNCODED_DIRECT", "MAN_T<t>", "LOCAL_FULL", "MULTIACCESS_LOCAL".
  std::string name() const;
};

struct SchemeSpec {
  std::vector<Segment> segments;

  // Total fraction over segments of this kind (0 when absent).
  Rational fraction_of(SegmentKind kind) const;
  std::string describe() const;
};

// Per-node memory of a basic scheme run on whole files.
Rational segment_memory(const ProblemInstance& inst, const Segment& seg);
// Per-node memory of the memory-sharing mixture.
Rational scheme_memory(const ProblemInstance& inst, const SchemeSpec& scheme);

// Checks fractions are positive and sum to 1, MAN t in range, multiaccess
// only with L >= 2, and the mixture fits in M.
void validate_scheme(const ProblemInstance& inst, const SchemeSpec& scheme);

// Memory sharing between the corner points that bracket inst.M().
SchemeSpec make_scheme(const ProblemInstance& inst, const DemandStructure& ds);

// Basic placement of a segment kind, scaled to whole files.
UncodedPlacement segment_placement(const ProblemInstance& inst, const DemandStructure& ds,
                                   const Segment& seg);
// Fraction-weighted sum of the segment placements.
UncodedPlacement scheme_placement(const ProblemInstance& inst, const DemandStructure& ds,
                                  const SchemeSpec& scheme);

// Caches {k, k+1, ..., k+L-1} (cyclic) reachable from region k.
NodeMask accessible_caches(const ProblemInstance& inst, int region);

// A subfile of `file` inside segment `segment`, cached exactly at `mask`.
struct SubfileId {
  int file = 0;
  int segment = 0;
  NodeMask mask = 0;

  friend auto operator<=>(const SubfileId&, const SubfileId&) = default;
  std::string to_string(int K) const;
};

struct Message {
  std::vector<SubfileId> components;
  Rational size;                      // in file units
  std::vector<std::uint8_t> payload;  // XOR of the components; empty when symbolic
};

struct BroadcastTranscript {
  std::vector<Message> messages;
  std::uint64_t total_bits = 0;  // Σ payload bits; 0 for symbolic transcripts

  Rational load() const;
  bool same_structure(const BroadcastTranscript& other) const;
};

using Library = std::vector<std::vector<std::uint8_t>>;

// Subpacketization in bytes: file lengths must be a multiple of this so every
// subfile is a whole number of bytes.
std::uint64_t subpacketization(const ProblemInstance& inst, const SchemeSpec& scheme);

// Equal-length files filled from a seeded generator.
Library random_library(int N, std::size_t bytes, std::uint64_t seed);

// Symbolic delivery: message components and sizes, no payloads.
BroadcastTranscript deliver(const ProblemInstance& inst, const DemandStructure& ds,
                            const SchemeSpec& scheme, const DemandVector& d);
// Same messages with XOR payloads computed from the library.
BroadcastTranscript deliver_bits(const ProblemInstance& inst, const DemandStructure& ds,
                                 const SchemeSpec& scheme, const DemandVector& d,
                                 const Library& library);

// Load of deliver() without materializing messages.
Rational delivery_load(const ProblemInstance& inst, const DemandStructure& ds,
                       const SchemeSpec& scheme, const DemandVector& d);

// Contents of one cache node after placement.
struct CacheNode {
  std::vector<std::pair<SubfileId, std::vector<std::uint8_t>>> subfiles;  // sorted by id
};

std::vector<CacheNode> fill_caches(const ProblemInstance& inst, const DemandStructure& ds,
                                   const SchemeSpec& scheme, const Library& library);

// Recovers user `region`'s requested file from its reachable caches and the
// transcript by peeling. Throws DecodeFailure if any byte is missing.
std::vector<std::uint8_t> decode(const ProblemInstance& inst, const DemandStructure& ds,
                                 const SchemeSpec& scheme, const DemandVector& d, int region,
                                 const std::vector<CacheNode>& caches,
                                 const BroadcastTranscript& transcript);

// Max of delivery_load over every demand vector, evaluated in parallel.
// Throws BudgetExceeded beyond `max_demands` vectors.
Rational worst_case_load(const ProblemInstance& inst, const DemandStructure& ds,
                         const SchemeSpec& scheme, std::uint64_t max_demands = 10'000'000);

struct SimulationReport {
  BroadcastTranscript transcript;
  std::vector<bool> decoded;  // per user
  std::uint64_t file_bits = 0;
  Rational symbolic_load;
  Rational bit_load;

  bool ok() const;
};

SimulationReport simulate(const ProblemInstance& inst, const DemandStructure& ds,
                          const SchemeSpec& scheme, const DemandVector& d, const Library& library);

}  // namespace loccache
