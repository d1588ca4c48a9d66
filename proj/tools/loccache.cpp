#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "loccache/bounds.hpp"
#include "loccache/certificate.hpp"
#include "loccache/converse.hpp"
#include "loccache/errors.hpp"
#include "loccache/lp_io.hpp"
#include "loccache/schemes.hpp"
#include "loccache/symmetry.hpp"
#include "loccache/transcript_io.hpp"
#include "loccache/verify.hpp"

using namespace loccache;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  int K = 0;
  int a = 0;
  int b = 0;
  int L = 1;
  std::string M;
  std::string m_min;
  std::string m_max;
  int m_steps = 11;
  std::uint64_t seed = 1;
  std::string out;
  std::string format;
  int decimal = -1;
  std::string config;

  // tradeoff
  bool with_lp = false;
  // simulate
  std::string demand;
  int scale = 1;
  std::string transcript;
  // lp
  std::string family = "full";
  std::string memory = "aggregate";
  std::string genie = "truncated";
  bool sum_all = false;
  bool symmetrized = false;
  std::string export_path;
  std::string certificate_path;
  // verify
  int trials = 100;
  std::string fault;
  std::vector<int> only;
};

// A flag that may also be supplied by the config document; flags win.
struct Binding {
  const CLI::App* owner;
  CLI::Option* option;
  std::string key;
  std::function<void(const nlohmann::json&)> apply;
};

class Bindings {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& flag, T& var, const std::string& key,
                   const std::string& help) {
    auto* opt = app->add_option(flag, var, help);
    items_.push_back({app, opt, key, [&var](const nlohmann::json& j) { var = j.get<T>(); }});
    return opt;
  }

  CLI::Option* add_rational(CLI::App* app, const std::string& flag, std::string& var, const std::string& key,
                            const std::string& help) {
    auto* opt = app->add_option(flag, var, help);
    items_.push_back({app, opt, key, [&var](const nlohmann::json& j) {
                        var = j.is_string() ? j.get<std::string>() : j.dump();
                      }});
    return opt;
  }

  CLI::Option* add_flag(CLI::App* app, const std::string& flag, bool& var, const std::string& key,
                        const std::string& help) {
    auto* opt = app->add_flag(flag, var, help);
    items_.push_back({app, opt, key, [&var](const nlohmann::json& j) { var = j.get<bool>(); }});
    return opt;
  }

  // Fills options of the active subcommand that were not given as flags.
  void apply_config(const std::string& path, const CLI::App* active) const {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config " + path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& b : items_) {
      if (b.owner != active || b.option->count() > 0 || !doc.contains(b.key)) continue;
      try {
        b.apply(doc.at(b.key));
      } catch (const nlohmann::json::exception&) {
        throw UsageError("config key '" + b.key + "' has the wrong type");
      }
    }
  }

 private:
  std::vector<Binding> items_;
};

void add_common(CLI::App* app, RunConfig& cfg, Bindings& bind, bool grid) {
  bind.add(app, "--K", cfg.K, "K", "number of regions / cache nodes (>= 2)");
  bind.add(app, "--a", cfg.a, "a", "files shared with each neighbour");
  bind.add(app, "--b", cfg.b, "b", "files unique to each region");
  bind.add(app, "--L", cfg.L, "L", "caches reachable per user");
  bind.add_rational(app, "--M", cfg.M, "M", "cache size per node, exact (e.g. 5/2)");
  if (grid) {
    bind.add_rational(app, "--m-min", cfg.m_min, "m_min", "grid start (default 0)");
    bind.add_rational(app, "--m-max", cfg.m_max, "m_max", "grid end (default 2a+b)");
    bind.add(app, "--m-steps", cfg.m_steps, "m_steps", "grid points (>= 2)");
  }
  bind.add(app, "--seed", cfg.seed, "seed", "random seed");
  bind.add(app, "--out", cfg.out, "out", "output path (default stdout)");
  bind.add(app, "--format", cfg.format, "format", "output format");
  bind.add(app, "--decimal", cfg.decimal, "decimal", "render numbers as decimals with this many digits");
  app->add_option("--config", cfg.config, "JSON config document; flags take precedence");
}

ProblemInstance instance_from(const RunConfig& cfg, bool need_memory) {
  if (cfg.K == 0 && cfg.a == 0 && cfg.b == 0) throw UsageError("--K, --a and --b are required");
  Rational M(0);
  if (!cfg.M.empty()) {
    M = parse_rational(cfg.M);
  } else if (need_memory) {
    throw UsageError("--M is required");
  }
  if (M > Rational(2 * cfg.a + cfg.b)) throw UsageError("M must lie in [0, 2a+b]");
  return ProblemInstance::create(cfg.K, cfg.a, cfg.b, cfg.L, M);
}

std::string render(const Rational& r, const RunConfig& cfg) {
  return cfg.decimal >= 0 ? to_decimal(r, cfg.decimal) : to_string(r);
}

std::string rendering(const RunConfig& cfg) {
  return cfg.decimal >= 0 ? "decimal(" + std::to_string(cfg.decimal) + ")" : "exact";
}

void check_format(const RunConfig& cfg, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed) {
    if (cfg.format == f) return;
  }
  throw UsageError("unsupported --format '" + cfg.format + "'");
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + cfg.out);
  out << text;
}

std::vector<Rational> grid_for(const ProblemInstance& inst, const RunConfig& cfg) {
  if (!cfg.M.empty()) return {inst.M()};
  Rational lo = cfg.m_min.empty() ? Rational(0) : parse_rational(cfg.m_min);
  Rational hi = cfg.m_max.empty() ? inst.max_memory() : parse_rational(cfg.m_max);
  if (cfg.m_steps < 2) throw UsageError("--m-steps must be at least 2");
  if (lo < 0 || hi > inst.max_memory() || lo > hi) throw UsageError("grid endpoints must satisfy 0 <= min <= max <= 2a+b");
  return memory_grid(lo, hi, cfg.m_steps);
}

int cmd_tradeoff(RunConfig cfg) {
  if (cfg.format.empty()) cfg.format = "csv";
  check_format(cfg, {"csv", "json"});
  auto base = instance_from(cfg, false);
  if (cfg.with_lp && base.L() != 1) throw UsageError("--lp needs L = 1");
  auto ds = build_demand_structure(base);
  auto grid = grid_for(base, cfg);
  std::optional<std::vector<LinearInequality>> family;
  if (cfg.with_lp) family = full_family(ds);

  std::vector<std::string> cols{"M", "R_ach", "R_star_u", "R_cutset"};
  if (base.L() >= 2) cols.emplace_back("R_multi");
  if (cfg.with_lp) cols.emplace_back("R_lp");
  std::vector<std::vector<std::string>> rows;
  for (const auto& M : grid) {
    auto inst = base.with_memory(M);
    auto single = inst.with_access(1);
    std::vector<std::string> row{render(M, cfg), render(worst_case_load(inst, ds, make_scheme(inst, ds)), cfg),
                                 render(rstar_u(single), cfg), render(cutset_bound(single), cfg)};
    if (base.L() >= 2) row.push_back(render(rstar_multiaccess(inst), cfg));
    if (family) row.push_back(render(solve_converse(inst, ds, *family).optimum, cfg));
    rows.push_back(std::move(row));
  }

  std::ostringstream os;
  if (cfg.format == "csv") {
    if (cfg.decimal >= 0) os << "# rendered: " << rendering(cfg) << '\n';
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << '\n';
    }
  } else {
    json j;
    j["instance"] = json::parse(base.to_json());
    j["rendering"] = rendering(cfg);
    j["columns"] = cols;
    auto& arr = j["rows"] = json::array();
    for (const auto& r : rows) {
      json o;
      for (std::size_t i = 0; i < r.size(); ++i) o[cols[i]] = r[i];
      arr.push_back(o);
    }
    os << j.dump(2) << '\n';
  }
  emit(cfg, os.str());
  return kExitOk;
}

DemandVector demand_from(const DemandStructure& ds, const RunConfig& cfg) {
  if (cfg.demand.empty()) {
    std::mt19937_64 rng(cfg.seed);
    std::vector<int> files;
    for (int k = 1; k <= ds.K(); ++k) {
      const auto& set = ds.demand_set(k);
      files.push_back(set[rng() % set.size()]);
    }
    return make_demand(ds, files);
  }
  std::vector<int> files;
  std::stringstream ss(cfg.demand);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      files.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw UsageError("--demand must be a comma-separated list of file indices");
    }
  }
  try {
    return make_demand(ds, files);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int cmd_simulate(RunConfig cfg) {
  if (cfg.format.empty()) cfg.format = "text";
  check_format(cfg, {"text", "json"});
  if (cfg.scale < 1) throw UsageError("--scale must be positive");
  auto inst = instance_from(cfg, true);
  auto ds = build_demand_structure(inst);
  auto scheme = make_scheme(inst, ds);
  auto d = demand_from(ds, cfg);
  const auto sub = subpacketization(inst, scheme);
  auto lib = random_library(inst.N(), static_cast<std::size_t>(sub * static_cast<std::uint64_t>(cfg.scale)),
                            cfg.seed);
  auto rep = simulate(inst, ds, scheme, d, lib);
  auto symbolic = delivery_load(inst, ds, scheme, d);
  const bool agree = rep.bit_load == symbolic && rep.symbolic_load == symbolic;
  const bool ok = rep.ok() && agree;
  if (!cfg.transcript.empty()) write_binary_file(cfg.transcript, serialize_transcript(rep.transcript));

  std::ostringstream os;
  if (cfg.format == "json") {
    json j;
    j["instance"] = json::parse(inst.to_json());
    j["scheme"] = scheme.describe();
    j["demand"] = d.files;
    j["subpacketization_bytes"] = sub;
    j["file_bits"] = rep.file_bits;
    j["messages"] = rep.transcript.messages.size();
    j["total_bits"] = rep.transcript.total_bits;
    j["load"] = render(rep.bit_load, cfg);
    j["symbolic_load"] = render(symbolic, cfg);
    j["loads_agree"] = agree;
    j["decoded"] = rep.decoded;
    j["pass"] = ok;
    os << j.dump(2) << '\n';
  } else {
    os << "instance: " << inst.describe() << '\n'
       << "scheme: " << scheme.describe() << '\n'
       << "demand: " << d.to_string() << '\n'
       << "file bits: " << rep.file_bits << '\n'
       << "messages: " << rep.transcript.messages.size() << '\n'
       << "total bits: " << rep.transcript.total_bits << '\n'
       << "load: " << render(rep.bit_load, cfg) << '\n'
       << "symbolic load: " << render(symbolic, cfg) << '\n'
       << "loads agree: " << (agree ? "yes" : "no") << '\n';
    for (std::size_t k = 0; k < rep.decoded.size(); ++k) {
      os << "user " << k + 1 << ": " << (rep.decoded[k] ? "decoded" : "FAILED") << '\n';
    }
  }
  emit(cfg, os.str());
  return ok ? kExitOk : kExitFail;
}

int cmd_lp(RunConfig cfg) {
  if (cfg.format.empty()) cfg.format = "text";
  check_format(cfg, {"text", "json"});
  auto inst = instance_from(cfg, true);
  if (inst.L() != 1) throw UsageError("the converse LP is defined for L = 1");
  auto ds = build_demand_structure(inst);
  GenieForm form;
  if (cfg.genie == "truncated") {
    form = GenieForm::kTruncated;
  } else if (cfg.genie == "full") {
    form = GenieForm::kFull;
  } else {
    throw UsageError("--genie must be truncated or full");
  }
  MemoryMode mode;
  if (cfg.memory == "aggregate") {
    mode = MemoryMode::kAggregate;
  } else if (cfg.memory == "per-node") {
    mode = MemoryMode::kPerNode;
  } else {
    throw UsageError("--memory must be aggregate or per-node");
  }
  std::vector<LinearInequality> family;
  if (cfg.family == "full") {
    family = full_family(ds, form);
  } else {
    Regime r;
    try {
      r = parse_regime(cfg.family);
    } catch (const std::invalid_argument&) {
      throw UsageError("--family must be full, HIGH_M, LOW_M or LARGE_B");
    }
    family = selected_family(ds, r, form);
  }
  auto lp = build_lp(inst, ds, family, mode);
  if (!cfg.export_path.empty()) {
    std::ofstream out(cfg.export_path);
    if (!out) throw std::runtime_error("cannot write " + cfg.export_path);
    write_lp(out, lp);
  }
  auto sol = solve_converse(inst, ds, family, mode);
  const auto closed = rstar_u(inst);
  const bool match = sol.optimum == closed;

  json certs = json::array();
  json cert_docs = json::array();
  for (Regime r : {Regime::kHighM, Regime::kLowM, Regime::kLargeB}) {
    json c{{"regime", regime_name(r)}};
    try {
      auto rep = certificate_check(inst, ds, r, form);
      c["verdict"] = rep.pass ? "pass" : "fail";
      cert_docs.push_back(json::parse(rep.to_json(inst.K())));
    } catch (const RegimeMismatch& e) {
      c["verdict"] = "rejected";
      c["reason"] = e.what();
    }
    certs.push_back(c);
  }
  if (!cfg.certificate_path.empty()) {
    std::ofstream out(cfg.certificate_path);
    if (!out) throw std::runtime_error("cannot write " + cfg.certificate_path);
    out << cert_docs.dump(2) << '\n';
  }

  std::optional<Rational> sym_opt;
  int orbits = 0;
  if (cfg.symmetrized) {
    auto s = symmetrize(lp, ds);
    orbits = s.orbit_count;
    auto ssol = solve_lp(s.lp);
    if (ssol.status == LpStatus::kOptimal) sym_opt = ssol.objective;
  }
  std::optional<Rational> loose;
  if (cfg.sum_all) loose = sum_all_bound(inst, ds, form);
  const bool reference = inst.K() == 3 && inst.a() == 2 && inst.b() == 1 && inst.M() == 3;

  std::ostringstream os;
  if (cfg.format == "json") {
    json j;
    j["instance"] = json::parse(inst.to_json());
    j["family"] = cfg.family;
    j["rows"] = family.size();
    j["memory"] = cfg.memory;
    j["genie"] = cfg.genie;
    j["optimum"] = render(sol.optimum, cfg);
    j["rstar_u"] = render(closed, cfg);
    j["matches_rstar_u"] = match;
    j["pivots"] = sol.lp.pivots;
    j["certificates"] = certs;
    if (cfg.symmetrized) {
      j["orbits"] = orbits;
      j["symmetrized_optimum"] = sym_opt ? render(*sym_opt, cfg) : "n/a";
    }
    if (loose) {
      j["sum_all_bound"] = render(*loose, cfg);
      if (reference) j["sum_all_reference"] = "54/95";
    }
    os << j.dump(2) << '\n';
  } else {
    os << "instance: " << inst.describe() << '\n'
       << "family: " << cfg.family << " (" << family.size() << " rows, " << cfg.genie << " genie rows, "
       << cfg.memory << " memory)\n"
       << "optimum: " << render(sol.optimum, cfg) << '\n'
       << "rstar_u: " << render(closed, cfg) << '\n'
       << "matches rstar_u: " << (match ? "yes" : "no") << '\n';
    for (const auto& c : certs) {
      os << "certificate " << c["regime"].get<std::string>() << ": " << c["verdict"].get<std::string>() << '\n';
    }
    if (cfg.symmetrized) {
      os << "symmetrized: " << orbits << " orbit variables, optimum "
         << (sym_opt ? render(*sym_opt, cfg) : std::string("n/a")) << '\n';
    }
    if (loose) {
      os << "sum_all_bound: " << render(*loose, cfg);
      if (reference) os << " (reference 54/95)";
      os << '\n';
    }
  }
  emit(cfg, os.str());
  return cfg.family == "full" && !match ? kExitFail : kExitOk;
}

int cmd_gap(RunConfig cfg) {
  if (cfg.format.empty()) cfg.format = "text";
  check_format(cfg, {"text", "json"});
  auto inst = instance_from(cfg, false);
  auto g = gap_check(inst);
  std::ostringstream os;
  if (cfg.format == "json") {
    json j;
    j["instance"] = json::parse(inst.to_json());
    j["ratio"] = render(g.ratio, cfg);
    j["ratio_at_zero"] = render(g.ratio_at_zero, cfg);
    j["bound"] = g.bound;
    j["points"] = g.points;
    j["pass"] = g.pass;
    os << j.dump(2) << '\n';
  } else {
    os << "instance: " << inst.describe() << '\n'
       << "max ratio rstar_u / cutset: " << render(g.ratio, cfg) << '\n'
       << "ratio at M=0: " << render(g.ratio_at_zero, cfg) << '\n'
       << "bound: " << g.bound << '\n'
       << "points: " << g.points << '\n'
       << "pass: " << (g.pass ? "yes" : "no") << '\n';
  }
  emit(cfg, os.str());
  return g.pass ? kExitOk : kExitFail;
}

int cmd_verify(RunConfig cfg, const CLI::App* sub) {
  if (cfg.format.empty()) cfg.format = "text";
  check_format(cfg, {"text", "json"});
  VerifyOptions opt;
  if (sub->get_option("--K")->count() || cfg.K != 0) opt.K_values = {cfg.K};
  if (sub->get_option("--a")->count() || cfg.a != 0) opt.a_values = {cfg.a};
  if (sub->get_option("--b")->count() || cfg.b != 0) opt.b_values = {cfg.b};
  opt.trials = cfg.trials;
  opt.seed = cfg.seed;
  opt.fault = cfg.fault;
  opt.only = cfg.only;
  if (!opt.fault.empty() && opt.fault != "d3-off-by-one") throw UsageError("unknown fault '" + opt.fault + "'");
  auto report = run_acceptance(opt);
  std::ostringstream os;
  if (cfg.format == "json") {
    os << report.to_json() << '\n';
  } else {
    for (const auto& c : report.criteria) os << format_line(c) << '\n';
    os << (report.pass() ? "ALL PASS" : "FAILED") << '\n';
  }
  emit(cfg, os.str());
  return report.pass() ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coded caching workbench for location-based content on a cyclic edge-cache network"};
  app.require_subcommand(1);
  RunConfig cfg;
  Bindings bind;

  auto* tradeoff = app.add_subcommand("tradeoff", "memory-load tradeoff table (csv or json)");
  add_common(tradeoff, cfg, bind, true);
  bind.add_flag(tradeoff, "--lp", cfg.with_lp, "lp", "add the full-family LP column");

  auto* sim = app.add_subcommand("simulate", "bit-exact placement, delivery and decoding run");
  add_common(sim, cfg, bind, false);
  bind.add(sim, "--demand", cfg.demand, "demand", "comma-separated demand vector (default: random)");
  bind.add(sim, "--scale", cfg.scale, "scale", "file length in multiples of the subpacketization");
  bind.add(sim, "--transcript", cfg.transcript, "transcript", "write the binary transcript here");

  auto* lp = app.add_subcommand("lp", "converse LP, certificates and loose bound");
  add_common(lp, cfg, bind, false);
  bind.add(lp, "--family", cfg.family, "family", "full, HIGH_M, LOW_M or LARGE_B");
  bind.add(lp, "--memory", cfg.memory, "memory", "aggregate or per-node");
  bind.add(lp, "--genie", cfg.genie, "genie", "truncated or full genie rows");
  bind.add_flag(lp, "--sum-all", cfg.sum_all, "sum_all", "also report the sum-of-all-rows bound");
  bind.add_flag(lp, "--symmetrize", cfg.symmetrized, "symmetrize", "also solve the orbit LP");
  bind.add(lp, "--export", cfg.export_path, "export", "write the LP in text form");
  bind.add(lp, "--certificate", cfg.certificate_path, "certificate", "write certificate reports (JSON)");

  auto* verify = app.add_subcommand("verify", "run the acceptance battery");
  add_common(verify, cfg, bind, false);
  bind.add(verify, "--trials", cfg.trials, "trials", "random round-trip trials per instance");
  bind.add(verify, "--inject-fault", cfg.fault, "inject_fault", "d3-off-by-one");
  bind.add(verify, "--only", cfg.only, "only", "criterion ids to run");

  auto* gap = app.add_subcommand("gap", "order-optimality gap against the cut-set bound");
  add_common(gap, cfg, bind, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (auto* sub : app.get_subcommands()) bind.apply_config(cfg.config, sub);
    if (tradeoff->parsed()) return cmd_tradeoff(cfg);
    if (sim->parsed()) return cmd_simulate(cfg);
    if (lp->parsed()) return cmd_lp(cfg);
    if (verify->parsed()) return cmd_verify(cfg, verify);
    if (gap->parsed()) return cmd_gap(cfg);
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const DecodeFailure& e) {
    std::cerr << "decode failure: " << e.what() << '\n';
    return kExitFail;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kExitFail;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
