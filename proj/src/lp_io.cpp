#include "loccache/lp_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace loccache {

namespace {

const char* sense_token(Sense s) {
  switch (s) {
    case Sense::kGe:
      return "ge";
    case Sense::kLe:
      return "le";
    case Sense::kEq:
      return "eq";
  }
  return "ge";
}

void write_terms(std::ostream& out, const std::vector<std::pair<int, Rational>>& terms) {
  for (const auto& [j, v] : terms) out << ' ' << j << ':' << to_string(v);
}

std::pair<int, Rational> parse_term(const std::string& tok, int num_vars) {
  auto colon = tok.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("bad LP term '" + tok + "'");
  int col = std::stoi(tok.substr(0, colon));
  if (col < 0 || col >= num_vars) throw std::invalid_argument("LP column out of range: " + tok);
  return {col, parse_rational(tok.substr(colon + 1))};
}

}  // namespace

void write_lp(std::ostream& out, const LinearProgram& lp) {
  out << "vars " << lp.num_vars << '\n';
  for (std::size_t j = 0; j < lp.var_names.size(); ++j) out << "var " << j << ' ' << lp.var_names[j] << '\n';
  out << "min";
  write_terms(out, lp.objective);
  out << '\n';
  for (const auto& row : lp.rows) {
    out << sense_token(row.sense) << ' ' << to_string(row.rhs);
    write_terms(out, row.coeffs);
    out << '\n';
  }
}

std::string lp_to_string(const LinearProgram& lp) {
  std::ostringstream os;
  write_lp(os, lp);
  return os.str();
}

LinearProgram read_lp(std::istream& in) {
  LinearProgram lp;
  bool have_vars = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "vars") {
      ls >> lp.num_vars;
      if (!ls || lp.num_vars < 0) throw std::invalid_argument("bad vars line");
      have_vars = true;
      continue;
    }
    if (!have_vars) throw std::invalid_argument("LP text must start with a vars line");
    std::string tok;
    if (head == "var") {
      int j = -1;
      std::string name;
      ls >> j >> name;
      if (j < 0 || j >= lp.num_vars) throw std::invalid_argument("bad var line");
      if (lp.var_names.empty()) lp.var_names.resize(static_cast<std::size_t>(lp.num_vars));
      lp.var_names[static_cast<std::size_t>(j)] = name;
    } else if (head == "min") {
      while (ls >> tok) lp.objective.push_back(parse_term(tok, lp.num_vars));
    } else if (head == "ge" || head == "le" || head == "eq") {
      LpRow row;
      row.sense = head == "ge" ? Sense::kGe : head == "le" ? Sense::kLe : Sense::kEq;
      if (!(ls >> tok)) throw std::invalid_argument("row without rhs");
      row.rhs = parse_rational(tok);
      while (ls >> tok) row.coeffs.push_back(parse_term(tok, lp.num_vars));
      lp.rows.push_back(std::move(row));
    } else {
      throw std::invalid_argument("unknown LP line '" + head + "'");
    }
  }
  if (!have_vars) throw std::invalid_argument("empty LP text");
  return lp;
}

LinearProgram lp_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_lp(is);
}

}  // namespace loccache
