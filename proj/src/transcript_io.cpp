#include "loccache/transcript_io.hpp"

#include <fstream>
#include <iterator>
#include <stdexcept>

namespace loccache {

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::vector<std::uint8_t> take(std::uint64_t n) {
    need(n);
    auto first = bytes_.begin() + static_cast<std::ptrdiff_t>(pos_);
    pos_ += n;
    return {first, first + static_cast<std::ptrdiff_t>(n)};
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) throw std::invalid_argument("truncated transcript");
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_transcript(const BroadcastTranscript& transcript) {
  std::vector<std::uint8_t> out;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(transcript.messages.size()));
  for (const auto& m : transcript.messages) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.components.size()));
    for (const auto& c : m.components) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(c.file));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(c.segment));
      put<std::uint32_t>(out, c.mask);
    }
    put<std::uint64_t>(out, m.payload.size());
    out.insert(out.end(), m.payload.begin(), m.payload.end());
  }
  return out;
}

BroadcastTranscript parse_transcript(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  BroadcastTranscript tr;
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    Message m;
    const auto comps = r.get<std::uint32_t>();
    for (std::uint32_t c = 0; c < comps; ++c) {
      SubfileId id;
      id.file = static_cast<int>(r.get<std::uint32_t>());
      id.segment = static_cast<int>(r.get<std::uint32_t>());
      id.mask = r.get<std::uint32_t>();
      m.components.push_back(id);
    }
    m.payload = r.take(r.get<std::uint64_t>());
    tr.total_bits += 8 * static_cast<std::uint64_t>(m.payload.size());
    tr.messages.push_back(std::move(m));
  }
  if (!r.done()) throw std::invalid_argument("trailing bytes after transcript");
  return tr;
}

void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace loccache
