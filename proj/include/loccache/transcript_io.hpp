#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loccache/schemes.hpp"

namespace loccache {

// Binary transcript dump, all integers little-endian:
//   u32 message_count
//   per message: u32 component_count, then per component u32 file,
//   u32 segment, u32 mask; u64 payload_length; payload bytes.
std::vector<std::uint8_t> serialize_transcript(const BroadcastTranscript& transcript);

// Inverse of serialize_transcript. Message sizes are not part of the layout
// and come back as zero; total_bits is recomputed from the payloads.
BroadcastTranscript parse_transcript(const std::vector<std::uint8_t>& bytes);

void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> read_binary_file(const std::string& path);

}  // namespace loccache
