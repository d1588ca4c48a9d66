#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "loccache/bounds.hpp"
#include "loccache/certificate.hpp"
#include "loccache/converse.hpp"
#include "loccache/errors.hpp"
#include "loccache/schemes.hpp"
#include "loccache/verify.hpp"

namespace py = pybind11;
using namespace loccache;

namespace {

ProblemInstance instance(int K, int a, int b, int L, const std::string& M) {
  return ProblemInstance::create(K, a, b, L, parse_rational(M));
}

std::vector<std::vector<int>> demand_sets(int K, int a, int b) {
  auto ds = build_demand_structure(ProblemInstance::create(K, a, b));
  std::vector<std::vector<int>> out;
  for (int k = 1; k <= K; ++k) out.push_back(ds.demand_set(k));
  return out;
}

std::string achievable_load(int K, int a, int b, int L, const std::string& M) {
  auto inst = instance(K, a, b, L, M);
  auto ds = build_demand_structure(inst);
  return to_string(worst_case_load(inst, ds, make_scheme(inst, ds)));
}

py::dict simulate_run(int K, int a, int b, int L, const std::string& M, std::vector<int> demand,
                      std::uint64_t seed) {
  auto inst = instance(K, a, b, L, M);
  auto ds = build_demand_structure(inst);
  auto scheme = make_scheme(inst, ds);
  auto d = make_demand(ds, std::move(demand));
  auto lib = random_library(inst.N(), static_cast<std::size_t>(subpacketization(inst, scheme)), seed);
  auto rep = simulate(inst, ds, scheme, d, lib);
  py::dict out;
  out["scheme"] = scheme.describe();
  out["decoded"] = rep.decoded;
  out["file_bits"] = rep.file_bits;
  out["total_bits"] = rep.transcript.total_bits;
  out["messages"] = rep.transcript.messages.size();
  out["load"] = to_string(rep.bit_load);
  out["symbolic_load"] = to_string(rep.symbolic_load);
  out["ok"] = rep.ok();
  return out;
}

std::string lp_optimum(int K, int a, int b, const std::string& M, const std::string& family,
                       const std::string& memory) {
  auto inst = instance(K, a, b, 1, M);
  auto ds = build_demand_structure(inst);
  auto rows = family == "full" ? full_family(ds) : selected_family(ds, parse_regime(family));
  MemoryMode mode;
  if (memory == "aggregate") {
    mode = MemoryMode::kAggregate;
  } else if (memory == "per-node") {
    mode = MemoryMode::kPerNode;
  } else {
    throw std::invalid_argument("memory must be 'aggregate' or 'per-node'");
  }
  return to_string(solve_converse(inst, ds, rows, mode).optimum);
}

std::string certificate(int K, int a, int b, const std::string& regime) {
  auto inst = ProblemInstance::create(K, a, b);
  auto ds = build_demand_structure(inst);
  return certificate_check(inst, ds, parse_regime(regime)).to_json(K);
}

py::dict gap(int K, int a, int b) {
  auto g = gap_check(ProblemInstance::create(K, a, b));
  py::dict out;
  out["ratio"] = to_string(g.ratio);
  out["ratio_at_zero"] = to_string(g.ratio_at_zero);
  out["bound"] = g.bound;
  out["points"] = g.points;
  out["pass"] = g.pass;
  return out;
}

std::string verify(std::vector<int> K_values, std::vector<int> a_values, std::vector<int> b_values, int trials,
                   std::vector<int> only) {
  VerifyOptions opt;
  opt.K_values = std::move(K_values);
  opt.a_values = std::move(a_values);
  opt.b_values = std::move(b_values);
  opt.trials = trials;
  opt.only = std::move(only);
  return run_acceptance(opt).to_json();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact coded-caching workbench for location-based content";
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_AssertionError);
  py::register_exception<DecodeFailure>(m, "DecodeFailure", PyExc_RuntimeError);

  m.def("demand_sets", &demand_sets, py::arg("K"), py::arg("a"), py::arg("b"));
  m.def(
      "rstar_u", [](int K, int a, int b, const std::string& M) { return to_string(rstar_u(instance(K, a, b, 1, M))); },
      py::arg("K"), py::arg("a"), py::arg("b"), py::arg("M"));
  m.def(
      "cutset_bound",
      [](int K, int a, int b, const std::string& M) { return to_string(cutset_bound(instance(K, a, b, 1, M))); },
      py::arg("K"), py::arg("a"), py::arg("b"), py::arg("M"));
  m.def(
      "rstar_multiaccess",
      [](int K, int a, int b, int L, const std::string& M) {
        return to_string(rstar_multiaccess(instance(K, a, b, L, M)));
      },
      py::arg("K"), py::arg("a"), py::arg("b"), py::arg("L"), py::arg("M"));
  m.def("achievable_load", &achievable_load, py::call_guard<py::gil_scoped_release>(), py::arg("K"), py::arg("a"), py::arg("b"), py::arg("L"), py::arg("M"));
  m.def("simulate", &simulate_run, py::arg("K"), py::arg("a"), py::arg("b"), py::arg("L"), py::arg("M"),
        py::arg("demand"), py::arg("seed"));
  m.def("lp_optimum", &lp_optimum, py::call_guard<py::gil_scoped_release>(), py::arg("K"), py::arg("a"), py::arg("b"), py::arg("M"), py::arg("family"),
        py::arg("memory"));
  m.def(
      "sum_all_bound",
      [](int K, int a, int b, const std::string& M) {
        auto inst = instance(K, a, b, 1, M);
        return to_string(sum_all_bound(inst, build_demand_structure(inst)));
      },
      py::arg("K"), py::arg("a"), py::arg("b"), py::arg("M"));
  m.def("certificate", &certificate, py::call_guard<py::gil_scoped_release>(), py::arg("K"), py::arg("a"), py::arg("b"), py::arg("regime"));
  m.def("gap_check", &gap, py::arg("K"), py::arg("a"), py::arg("b"));
  m.def("verify", &verify, py::call_guard<py::gil_scoped_release>(), py::arg("K_values"), py::arg("a_values"), py::arg("b_values"), py::arg("trials"),
        py::arg("only"));
}
