#include "loccache/schemes.hpp"

#include <algorithm>
#include <bit>
#include <future>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "loccache/errors.hpp"

namespace loccache {

std::string Segment::name() const {
  switch (kind) {
    case SegmentKind::kUncodedDirect:
      return "UNCODED_DIRECT";
    case SegmentKind::kMan:
      return "MAN_T" + std::to_string(t);
    case SegmentKind::kLocalFull:
      return "LOCAL_FULL";
    case SegmentKind::kMultiaccessLocal:
      return "MULTIACCESS_LOCAL";
  }
  return "UNKNOWN";
}

Rational SchemeSpec::fraction_of(SegmentKind kind) const {
  Rational total(0);
  for (const auto& s : segments) {
    if (s.kind == kind) total += s.fraction;
  }
  return total;
}

std::string SchemeSpec::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i) os << " + ";
    os << to_string(segments[i].fraction) << "*" << segments[i].name();
  }
  return os.str();
}

Rational segment_memory(const ProblemInstance& inst, const Segment& seg) {
  switch (seg.kind) {
    case SegmentKind::kUncodedDirect:
      return Rational(0);
    case SegmentKind::kMan:
      return Rational((inst.a() + inst.b()) * seg.t);
    case SegmentKind::kLocalFull:
      return Rational(2 * inst.a() + inst.b());
    case SegmentKind::kMultiaccessLocal:
      return Rational(inst.a() + inst.b());
  }
  return Rational(0);
}

Rational scheme_memory(const ProblemInstance& inst, const SchemeSpec& scheme) {
  Rational total(0);
  for (const auto& s : scheme.segments) total += s.fraction * segment_memory(inst, s);
  return total;
}

void validate_scheme(const ProblemInstance& inst, const SchemeSpec& scheme) {
  if (scheme.segments.empty()) throw std::invalid_argument("scheme has no segments");
  Rational total(0);
  for (const auto& s : scheme.segments) {
    if (s.fraction <= 0) throw std::invalid_argument("segment fractions must be positive");
    if (s.kind == SegmentKind::kMan && (s.t < 0 || s.t > inst.K())) {
      throw std::invalid_argument("MAN segment needs t in [0, K]");
    }
    if (s.kind == SegmentKind::kMultiaccessLocal && inst.L() < 2) {
      throw std::invalid_argument("multiaccess segment requires L >= 2");
    }
    total += s.fraction;
  }
  if (total != 1) throw std::invalid_argument("segment fractions sum to " + to_string(total));
  if (scheme_memory(inst, scheme) > inst.M()) {
    throw std::invalid_argument("scheme needs memory " + to_string(scheme_memory(inst, scheme)) +
                                " > M = " + to_string(inst.M()));
  }
}

namespace {

void push_segment(SchemeSpec& s, SegmentKind kind, const Rational& fraction) {
  if (fraction > 0) s.segments.push_back(Segment{kind, fraction, 1});
}

}  // namespace

SchemeSpec make_scheme(const ProblemInstance& inst, const DemandStructure& ds) {
  (void)ds;
  const Rational& M = inst.M();
  if (M < 0 || M > inst.max_memory()) throw std::invalid_argument("M out of range");
  const Rational ab(inst.a() + inst.b());
  SchemeSpec s;
  if (inst.L() >= 2) {
    if (M >= ab) {
      push_segment(s, SegmentKind::kMultiaccessLocal, Rational(1));
    } else {
      Rational lambda = M / ab;
      push_segment(s, SegmentKind::kUncodedDirect, 1 - lambda);
      push_segment(s, SegmentKind::kMultiaccessLocal, lambda);
    }
  } else if (inst.coded_regime()) {
    if (M <= ab) {
      Rational lambda = M / ab;
      push_segment(s, SegmentKind::kUncodedDirect, 1 - lambda);
      push_segment(s, SegmentKind::kMan, lambda);
    } else {
      Rational mu = (M - ab) / Rational(inst.a());
      push_segment(s, SegmentKind::kMan, 1 - mu);
      push_segment(s, SegmentKind::kLocalFull, mu);
    }
  } else {
    Rational lambda = M / inst.max_memory();
    push_segment(s, SegmentKind::kUncodedDirect, 1 - lambda);
    push_segment(s, SegmentKind::kLocalFull, lambda);
  }
  return s;
}

UncodedPlacement segment_placement(const ProblemInstance& inst, const DemandStructure& ds,
                                   const Segment& seg) {
  switch (seg.kind) {
    case SegmentKind::kUncodedDirect:
      return place_nothing(inst);
    case SegmentKind::kMan:
      return place_man(inst, seg.t);
    case SegmentKind::kLocalFull:
      return place_local_full(inst, ds);
    case SegmentKind::kMultiaccessLocal:
      return place_multiaccess(inst, ds);
  }
  throw std::logic_error("unknown segment kind");
}

UncodedPlacement scheme_placement(const ProblemInstance& inst, const DemandStructure& ds,
                                  const SchemeSpec& scheme) {
  UncodedPlacement out(inst.K(), inst.N());
  for (const auto& seg : scheme.segments) {
    auto p = segment_placement(inst, ds, seg);
    for (int i = 1; i <= inst.N(); ++i) {
      for (const auto& [mask, v] : p.entries(i)) out.add(i, mask, seg.fraction * v);
    }
  }
  return out;
}

NodeMask accessible_caches(const ProblemInstance& inst, int region) {
  NodeMask m = 0;
  for (int j = 0; j < inst.L(); ++j) m |= node_bit(static_cast<int>(cyclic_mod(region + j, inst.K())));
  return m;
}

std::string SubfileId::to_string(int K) const {
  return "W" + std::to_string(file) + "." + std::to_string(segment) + mask_to_string(mask, K);
}

Rational BroadcastTranscript::load() const {
  Rational total(0);
  for (const auto& m : messages) total += m.size;
  return total;
}

bool BroadcastTranscript::same_structure(const BroadcastTranscript& other) const {
  if (messages.size() != other.messages.size()) return false;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (messages[i].components != other.messages[i].components) return false;
    if (messages[i].size != other.messages[i].size) return false;
  }
  return true;
}

namespace {

// r-subsets of [K] as masks, in lexicographic order of their sorted elements.
std::vector<NodeMask> lex_subsets(int K, int r) {
  std::vector<NodeMask> out;
  if (r < 0 || r > K) return out;
  std::vector<int> idx(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) idx[static_cast<std::size_t>(i)] = i + 1;
  while (true) {
    NodeMask m = 0;
    for (int v : idx) m |= node_bit(v);
    out.push_back(m);
    int i = r - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == K - r + i + 1) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < r; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

std::int64_t parts_of(const ProblemInstance& inst, const Segment& seg) {
  return seg.kind == SegmentKind::kMan ? binomial(inst.K(), seg.t) : 1;
}

// Masks of the subfiles of `file` inside one segment, in byte-layout order.
std::vector<NodeMask> segment_masks(const ProblemInstance& inst, const DemandStructure& ds,
                                    const Segment& seg, int file) {
  switch (seg.kind) {
    case SegmentKind::kUncodedDirect:
      return {0};
    case SegmentKind::kMan:
      return lex_subsets(inst.K(), seg.t);
    case SegmentKind::kLocalFull:
      return {ds.demanders(file)};
    case SegmentKind::kMultiaccessLocal:
      return {node_bit(ds.home_region(file))};
  }
  return {};
}

// Byte layout of a file of `bytes` bytes under a scheme.
struct Layout {
  std::vector<std::uint64_t> start;     // per segment
  std::vector<std::uint64_t> part_len;  // per segment
  std::vector<std::vector<NodeMask>> man_masks;

  std::uint64_t offset(const Segment& seg, std::size_t j, NodeMask mask) const {
    if (seg.kind != SegmentKind::kMan) return start[j];
    const auto& masks = man_masks[j];
    auto it = std::find(masks.begin(), masks.end(), mask);
    if (it == masks.end()) throw std::logic_error("mask is not a part of this segment");
    return start[j] + static_cast<std::uint64_t>(it - masks.begin()) * part_len[j];
  }
};

std::uint64_t to_u64(const Rational& r) {
  if (r.get_den() != 1 || r < 0) throw std::invalid_argument("value is not a whole byte count");
  return r.get_num().get_ui();
}

Layout make_layout(const ProblemInstance& inst, const SchemeSpec& scheme, std::uint64_t bytes) {
  if (bytes % subpacketization(inst, scheme) != 0) {
    throw std::invalid_argument("file length " + std::to_string(bytes) +
                                " is not a multiple of the subpacketization " +
                                std::to_string(subpacketization(inst, scheme)));
  }
  Layout L;
  Rational cum(0);
  const Rational B(static_cast<unsigned long>(bytes));
  for (const auto& seg : scheme.segments) {
    L.start.push_back(to_u64(cum * B));
    L.part_len.push_back(to_u64(seg.fraction * B / Rational(parts_of(inst, seg))));
    L.man_masks.push_back(seg.kind == SegmentKind::kMan ? lex_subsets(inst.K(), seg.t)
                                                        : std::vector<NodeMask>{});
    cum += seg.fraction;
  }
  return L;
}

std::vector<std::uint8_t> subfile_bytes(const Layout& L, const SchemeSpec& scheme,
                                        const Library& library, const SubfileId& id) {
  const auto j = static_cast<std::size_t>(id.segment);
  const auto& file = library.at(static_cast<std::size_t>(id.file - 1));
  auto off = L.offset(scheme.segments[j], j, id.mask);
  return {file.begin() + static_cast<std::ptrdiff_t>(off),
          file.begin() + static_cast<std::ptrdiff_t>(off + L.part_len[j])};
}

std::uint64_t check_library(const ProblemInstance& inst, const Library& library) {
  if (static_cast<int>(library.size()) != inst.N()) {
    throw std::invalid_argument("library must hold exactly N files");
  }
  const auto bytes = library.front().size();
  for (const auto& f : library) {
    if (f.size() != bytes) throw std::invalid_argument("library files must have equal length");
  }
  return bytes;
}

void check_demand(const DemandStructure& ds, const DemandVector& d) {
  if (static_cast<int>(d.files.size()) != ds.K()) {
    throw std::invalid_argument("demand vector must have one entry per region");
  }
  for (int k = 1; k <= ds.K(); ++k) {
    if (!ds.can_demand(k, d[k])) {
      throw std::invalid_argument("demand " + d.to_string() + " leaves D[" + std::to_string(k) + "]");
    }
  }
}

BroadcastTranscript build_messages(const ProblemInstance& inst, const DemandStructure& ds,
                                   const SchemeSpec& scheme, const DemandVector& d) {
  validate_scheme(inst, scheme);
  check_demand(ds, d);
  const int K = inst.K();
  BroadcastTranscript tr;
  for (std::size_t j = 0; j < scheme.segments.size(); ++j) {
    const auto& seg = scheme.segments[j];
    const int sj = static_cast<int>(j);
    switch (seg.kind) {
      case SegmentKind::kUncodedDirect:
        for (int k = 1; k <= K; ++k) tr.messages.push_back({{{d[k], sj, 0}}, seg.fraction, {}});
        break;
      case SegmentKind::kMan: {
        Rational size = seg.fraction / Rational(binomial(K, seg.t));
        for (NodeMask S : lex_subsets(K, seg.t + 1)) {
          Message m;
          m.size = size;
          for (int k = 1; k <= K; ++k) {
            if (S & node_bit(k)) m.components.push_back({d[k], sj, S & ~node_bit(k)});
          }
          tr.messages.push_back(std::move(m));
        }
        break;
      }
      case SegmentKind::kLocalFull:
      case SegmentKind::kMultiaccessLocal:
        for (int k = 1; k <= K; ++k) {
          NodeMask mask = segment_masks(inst, ds, seg, d[k]).front();
          if (!(mask & accessible_caches(inst, k))) {
            tr.messages.push_back({{{d[k], sj, mask}}, seg.fraction, {}});
          }
        }
        break;
    }
  }
  return tr;
}

}  // namespace

std::uint64_t subpacketization(const ProblemInstance& inst, const SchemeSpec& scheme) {
  std::uint64_t L = 1;
  for (const auto& seg : scheme.segments) {
    Rational w = seg.fraction / Rational(parts_of(inst, seg));
    L = lcm_u64(L, w.get_den().get_ui());
  }
  return L;
}

Library random_library(int N, std::size_t bytes, std::uint64_t seed) {
  if (N < 1 || bytes < 1) throw std::invalid_argument("library needs N >= 1 files of >= 1 byte");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> byte(0, 255);
  Library lib(static_cast<std::size_t>(N), std::vector<std::uint8_t>(bytes));
  for (auto& f : lib) {
    for (auto& x : f) x = static_cast<std::uint8_t>(byte(rng));
  }
  return lib;
}

BroadcastTranscript deliver(const ProblemInstance& inst, const DemandStructure& ds,
                            const SchemeSpec& scheme, const DemandVector& d) {
  return build_messages(inst, ds, scheme, d);
}

BroadcastTranscript deliver_bits(const ProblemInstance& inst, const DemandStructure& ds,
                                 const SchemeSpec& scheme, const DemandVector& d,
                                 const Library& library) {
  auto bytes = check_library(inst, library);
  auto layout = make_layout(inst, scheme, bytes);
  auto tr = build_messages(inst, ds, scheme, d);
  for (auto& m : tr.messages) {
    const auto len = layout.part_len[static_cast<std::size_t>(m.components.front().segment)];
    m.payload.assign(len, 0);
    for (const auto& c : m.components) {
      auto part = subfile_bytes(layout, scheme, library, c);
      for (std::size_t i = 0; i < len; ++i) m.payload[i] ^= part[i];
    }
    tr.total_bits += 8 * static_cast<std::uint64_t>(len);
  }
  return tr;
}

namespace {

// Integer form of the load: load = Σ_j weight[j] * count_j(d) / denom.
struct LoadCounter {
  const ProblemInstance* inst;
  std::vector<Segment> segs;
  std::vector<std::uint64_t> weight;
  std::uint64_t denom = 1;
  std::vector<std::uint64_t> fixed_count;  // DIRECT and MAN message counts
  // covered[j][(k-1)*(N+1)+file] for local segments
  std::vector<std::vector<char>> covered;

  LoadCounter(const ProblemInstance& in, const DemandStructure& ds, const SchemeSpec& scheme)
      : inst(&in), segs(scheme.segments) {
    const int K = in.K(), N = in.N();
    std::vector<Rational> w;
    for (const auto& seg : segs) {
      Rational size = seg.kind == SegmentKind::kMan ? seg.fraction / Rational(binomial(K, seg.t))
                                                    : seg.fraction;
      w.push_back(size);
      denom = lcm_u64(denom, size.get_den().get_ui());
    }
    for (std::size_t j = 0; j < segs.size(); ++j) {
      Rational scaled = w[j] * Rational(static_cast<unsigned long>(denom));
      weight.push_back(scaled.get_num().get_ui());
      const auto& seg = segs[j];
      covered.emplace_back();
      if (seg.kind == SegmentKind::kUncodedDirect) {
        fixed_count.push_back(static_cast<std::uint64_t>(K));
      } else if (seg.kind == SegmentKind::kMan) {
        fixed_count.push_back(static_cast<std::uint64_t>(binomial(K, seg.t + 1)));
      } else {
        fixed_count.push_back(0);
        auto& cov = covered.back();
        cov.assign(static_cast<std::size_t>(K) * static_cast<std::size_t>(N + 1), 0);
        for (int k = 1; k <= K; ++k) {
          for (int f : ds.demand_set(k)) {
            NodeMask mask = segment_masks(in, ds, seg, f).front();
            cov[static_cast<std::size_t>((k - 1) * (N + 1) + f)] =
                (mask & accessible_caches(in, k)) != 0;
          }
        }
      }
    }
  }

  std::uint64_t scaled_load(const std::vector<int>& files) const {
    const int N = inst->N();
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < segs.size(); ++j) {
      std::uint64_t count = fixed_count[j];
      if (!covered[j].empty()) {
        for (std::size_t k = 0; k < files.size(); ++k) {
          if (!covered[j][k * static_cast<std::size_t>(N + 1) + static_cast<std::size_t>(files[k])]) ++count;
        }
      }
      total += weight[j] * count;
    }
    return total;
  }

  Rational to_load(std::uint64_t scaled) const {
    Rational r(static_cast<unsigned long>(scaled), static_cast<unsigned long>(denom));
    r.canonicalize();
    return r;
  }
};

}  // namespace

Rational delivery_load(const ProblemInstance& inst, const DemandStructure& ds,
                       const SchemeSpec& scheme, const DemandVector& d) {
  validate_scheme(inst, scheme);
  check_demand(ds, d);
  LoadCounter counter(inst, ds, scheme);
  return counter.to_load(counter.scaled_load(d.files));
}

Rational worst_case_load(const ProblemInstance& inst, const DemandStructure& ds,
                         const SchemeSpec& scheme, std::uint64_t max_demands) {
  validate_scheme(inst, scheme);
  if (demand_count(ds) > max_demands) {
    throw BudgetExceeded("demand enumeration of " + std::to_string(demand_count(ds)) +
                         " vectors exceeds the budget of " + std::to_string(max_demands));
  }
  const LoadCounter counter(inst, ds, scheme);
  const int K = inst.K();
  const auto& first = ds.demand_set(1);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<std::size_t>(
      std::min<std::uint64_t>(hw, demand_count(ds) < 4096 ? 1 : first.size()));

  auto scan = [&](std::size_t tid) {
    std::uint64_t best = 0;
    std::vector<int> files(static_cast<std::size_t>(K));
    std::vector<std::size_t> pos(static_cast<std::size_t>(K), 0);
    for (std::size_t i0 = tid; i0 < first.size(); i0 += workers) {
      files[0] = first[i0];
      std::fill(pos.begin() + 1, pos.end(), 0);
      while (true) {
        for (int k = 1; k < K; ++k) {
          files[static_cast<std::size_t>(k)] = ds.demand_set(k + 1)[pos[static_cast<std::size_t>(k)]];
        }
        best = std::max(best, counter.scaled_load(files));
        int k = K - 1;
        while (k >= 1) {
          auto& p = pos[static_cast<std::size_t>(k)];
          if (++p < ds.demand_set(k + 1).size()) break;
          p = 0;
          --k;
        }
        if (k < 1) break;
      }
    }
    return best;
  };

  std::uint64_t best = 0;
  if (workers <= 1) {
    best = scan(0);
  } else {
    std::vector<std::future<std::uint64_t>> jobs;
    for (std::size_t t = 0; t < workers; ++t) jobs.push_back(std::async(std::launch::async, scan, t));
    for (auto& j : jobs) best = std::max(best, j.get());
  }
  return counter.to_load(best);
}

std::vector<CacheNode> fill_caches(const ProblemInstance& inst, const DemandStructure& ds,
                                   const SchemeSpec& scheme, const Library& library) {
  validate_scheme(inst, scheme);
  auto layout = make_layout(inst, scheme, check_library(inst, library));
  std::vector<CacheNode> nodes(static_cast<std::size_t>(inst.K()));
  for (std::size_t j = 0; j < scheme.segments.size(); ++j) {
    for (int i = 1; i <= inst.N(); ++i) {
      for (NodeMask mask : segment_masks(inst, ds, scheme.segments[j], i)) {
        SubfileId id{i, static_cast<int>(j), mask};
        for (int k = 1; k <= inst.K(); ++k) {
          if (mask & node_bit(k)) {
            nodes[static_cast<std::size_t>(k - 1)].subfiles.emplace_back(
                id, subfile_bytes(layout, scheme, library, id));
          }
        }
      }
    }
  }
  for (auto& n : nodes) {
    std::sort(n.subfiles.begin(), n.subfiles.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
  }
  return nodes;
}

std::vector<std::uint8_t> decode(const ProblemInstance& inst, const DemandStructure& ds,
                                 const SchemeSpec& scheme, const DemandVector& d, int region,
                                 const std::vector<CacheNode>& caches,
                                 const BroadcastTranscript& transcript) {
  if (region < 1 || region > inst.K()) throw std::invalid_argument("region out of range");
  if (static_cast<int>(caches.size()) != inst.K()) throw std::invalid_argument("need one cache per node");
  std::map<SubfileId, std::vector<std::uint8_t>> known;
  const NodeMask reach = accessible_caches(inst, region);
  for (int k = 1; k <= inst.K(); ++k) {
    if (!(reach & node_bit(k))) continue;
    for (const auto& [id, bytes] : caches[static_cast<std::size_t>(k - 1)].subfiles) known.emplace(id, bytes);
  }

  std::vector<bool> used(transcript.messages.size(), false);
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t m = 0; m < transcript.messages.size(); ++m) {
      if (used[m]) continue;
      const auto& msg = transcript.messages[m];
      const SubfileId* missing = nullptr;
      int unknown = 0;
      for (const auto& c : msg.components) {
        if (!known.count(c)) {
          ++unknown;
          missing = &c;
        }
      }
      if (unknown > 1) continue;
      used[m] = true;
      if (unknown == 0) continue;
      std::vector<std::uint8_t> value = msg.payload;
      for (const auto& c : msg.components) {
        if (&c == missing) continue;
        const auto& part = known.at(c);
        if (part.size() != value.size()) throw DecodeFailure("component length mismatch");
        for (std::size_t i = 0; i < value.size(); ++i) value[i] ^= part[i];
      }
      known.emplace(*missing, std::move(value));
      progress = true;
    }
  }

  const int file = d[region];
  std::vector<std::uint8_t> out;
  for (std::size_t j = 0; j < scheme.segments.size(); ++j) {
    for (NodeMask mask : segment_masks(inst, ds, scheme.segments[j], file)) {
      SubfileId id{file, static_cast<int>(j), mask};
      auto it = known.find(id);
      if (it == known.end()) {
        throw DecodeFailure("user " + std::to_string(region) + " cannot recover " +
                            id.to_string(inst.K()));
      }
      out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }
  return out;
}

bool SimulationReport::ok() const {
  return std::all_of(decoded.begin(), decoded.end(), [](bool b) { return b; }) &&
         symbolic_load == bit_load;
}

SimulationReport simulate(const ProblemInstance& inst, const DemandStructure& ds,
                          const SchemeSpec& scheme, const DemandVector& d, const Library& library) {
  SimulationReport r;
  r.transcript = deliver_bits(inst, ds, scheme, d, library);
  r.file_bits = 8 * static_cast<std::uint64_t>(library.front().size());
  r.symbolic_load = r.transcript.load();
  r.bit_load = Rational(static_cast<unsigned long>(r.transcript.total_bits),
                        static_cast<unsigned long>(r.file_bits));
  r.bit_load.canonicalize();
  auto caches = fill_caches(inst, ds, scheme, library);
  for (int k = 1; k <= inst.K(); ++k) {
    auto got = decode(inst, ds, scheme, d, k, caches, r.transcript);
    r.decoded.push_back(got == library[static_cast<std::size_t>(d[k] - 1)]);
  }
  return r;
}

}  // namespace loccache
