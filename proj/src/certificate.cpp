#include "loccache/certificate.hpp"

#include <bit>
#include <map>

#include "json.hpp"
#include "loccache/bounds.hpp"
#include "loccache/errors.hpp"

namespace loccache {

namespace {

// Tag-weighted average coefficient of every variable over a family.
std::map<std::uint32_t, Rational> average_row(const std::vector<LinearInequality>& family) {
  std::uint64_t total = 0;
  for (const auto& row : family) total += row.tags.size();
  std::map<std::uint32_t, Rational> avg;
  for (const auto& row : family) {
    Rational w(static_cast<unsigned long>(row.tags.size()), static_cast<unsigned long>(total));
    w.canonicalize();
    for (const auto& [v, c] : row.coeffs) avg[v] += w * c;
  }
  return avg;
}

void require_weight(bool ok, Regime regime, const Rational& w, const char* interval) {
  if (!ok) {
    throw RegimeMismatch(regime_name(regime) + " mixing weight " + to_string(w) + " is outside " +
                         interval);
  }
}

}  // namespace

CertificateReport certificate_check(const ProblemInstance& inst, const DemandStructure& ds,
                                    Regime regime, GenieForm form) {
  if (inst.L() != 1) throw std::invalid_argument("certificates are defined for L = 1");
  const int K = inst.K();
  const Rational Kq(K), a(inst.a()), b(inst.b());
  CertificateReport rep;
  rep.regime = regime;

  std::vector<std::pair<Regime, Rational>> mix;
  switch (regime) {
    case Regime::kHighM: {
      if (inst.a() == 0) throw RegimeMismatch("HIGH_M needs a >= 1");
      rep.gate_weight = b * (Kq - 1) / (2 * a);
      require_weight(rep.gate_weight >= 0 && rep.gate_weight < 1, regime, rep.gate_weight, "[0, 1)");
      if (inst.b() == 0) throw RegimeMismatch("HIGH_M family is empty when b = 0");
      mix = {{Regime::kHighM, Rational(1)}};
      rep.w_shared = (Kq - 1) / (a * Kq);
      rep.w_unique = rep.w_memory = (Kq - 1) / (2 * a * Kq);
      rep.expected_constant = (Kq - 1) * (2 * a + b) / (2 * a);
      rep.expected_slope = (Kq - 1) / (2 * a);
      break;
    }
    case Regime::kLowM: {
      rep.gate_weight = (Kq + 1) * b / (2 * (a + b));
      require_weight(rep.gate_weight >= 0 && rep.gate_weight < 1, regime, rep.gate_weight, "[0, 1)");
      if (rep.gate_weight > 0) mix.emplace_back(Regime::kHighM, rep.gate_weight);
      mix.emplace_back(Regime::kLowM, 1 - rep.gate_weight);
      rep.w_shared = (2 * a * Kq + b * (Kq - 1)) / (2 * (a + b) * a * Kq);
      rep.w_unique = rep.w_memory = (Kq + 1) / (2 * (a + b) * Kq);
      rep.expected_constant = Kq;
      rep.expected_slope = (Kq + 1) / (2 * (a + b));
      break;
    }
    case Regime::kLargeB: {
      rep.gate_weight = 2 * a * Kq / ((Kq - 1) * (2 * a + b));
      require_weight(rep.gate_weight >= 0 && rep.gate_weight <= 1, regime, rep.gate_weight, "[0, 1]");
      if (inst.b() == 0) throw RegimeMismatch("LARGE_B family is empty when b = 0");
      if (rep.gate_weight > 0) mix.emplace_back(Regime::kHighM, rep.gate_weight);
      if (rep.gate_weight < 1) mix.emplace_back(Regime::kLargeB, 1 - rep.gate_weight);
      rep.w_shared = 2 / (2 * a + b);
      rep.w_unique = rep.w_memory = 1 / (2 * a + b);
      rep.expected_constant = Kq;
      rep.expected_slope = Kq / (2 * a + b);
      break;
    }
  }

  std::map<std::uint32_t, Rational> coeff;
  for (const auto& [fam, w] : mix) {
    auto rows = selected_family(ds, fam, form);
    rep.components.push_back({fam, w, rows.size()});
    for (const auto& [v, c] : average_row(rows)) coeff[v] += w * c;
  }

  bool residuals_ok = true;
  const std::uint32_t n = load_var_index(K, inst.N());
  for (std::uint32_t v = 0; v < n; ++v) {
    auto [file, mask] = var_of(K, v);
    ResidualEntry e;
    e.var = v;
    e.file_class = ds.file_class(file);
    e.subset_size = std::popcount(mask);
    auto it = coeff.find(v);
    e.coefficient = it == coeff.end() ? Rational(0) : it->second;
    e.target = (e.file_class == FileClass::kShared ? rep.w_shared : rep.w_unique) -
               rep.w_memory * Rational(e.subset_size);
    e.residual = e.coefficient - e.target;
    if (v == 0 || e.residual < rep.min_residual) rep.min_residual = e.residual;
    if (e.residual < 0) residuals_ok = false;
    rep.residuals.push_back(std::move(e));
  }

  rep.constant = rep.w_shared * a * Kq + rep.w_unique * b * Kq;
  rep.slope = rep.w_memory * Kq;

  // Memory piece on which the regime's bound is the optimal load.
  std::vector<Rational> piece;
  const Rational ab = a + b, top = inst.max_memory();
  if (regime == Regime::kHighM) piece = {ab, top};
  if (regime == Regime::kLowM) piece = {Rational(0), ab};
  if (regime == Regime::kLargeB) piece = {Rational(0), top};
  rep.matches_rstar = true;
  for (const auto& M : piece) {
    if (rep.constant - rep.slope * M != rstar_u(inst.with_memory(M))) rep.matches_rstar = false;
  }

  rep.pass = residuals_ok && rep.constant == rep.expected_constant && rep.slope == rep.expected_slope &&
             rep.matches_rstar;
  return rep;
}

std::string CertificateReport::to_json(int K) const {
  nlohmann::ordered_json j;
  j["regime"] = regime_name(regime);
  j["pass"] = pass;
  j["gate_weight"] = to_string(gate_weight);
  auto& comps = j["weighted_rows"] = nlohmann::ordered_json::array();
  for (const auto& c : components) {
    comps.push_back({{"family", regime_name(c.family)}, {"weight", to_string(c.weight)}, {"rows", c.rows}});
  }
  j["multipliers"] = {{"shared_file_size", to_string(w_shared)},
                      {"unique_file_size", to_string(w_unique)},
                      {"memory", to_string(w_memory)}};
  j["bound"] = {{"constant", to_string(constant)}, {"slope", to_string(slope)}};
  j["expected"] = {{"constant", to_string(expected_constant)}, {"slope", to_string(expected_slope)}};
  j["matches_rstar_u"] = matches_rstar;
  j["min_residual"] = to_string(min_residual);
  auto& res = j["residuals"] = nlohmann::ordered_json::array();
  for (const auto& e : residuals) {
    res.push_back({{"var", var_name(K, e.var)},
                   {"class", e.file_class == FileClass::kShared ? "C1" : "C2"},
                   {"size", e.subset_size},
                   {"coefficient", to_string(e.coefficient)},
                   {"target", to_string(e.target)},
                   {"residual", to_string(e.residual)}});
  }
  return j.dump(2);
}

}  // namespace loccache
