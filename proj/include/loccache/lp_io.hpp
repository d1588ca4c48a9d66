#pragma once

#include <iosfwd>
#include <string>

#include "loccache/simplex.hpp"

namespace loccache {

// Plain-text exact LP:
//   vars <n>
//   var <index> <name>          (optional, one per named variable)
//   min <col>:<p/q> ...
//   <ge|le|eq> <rhs p/q> <col>:<p/q> ...   (one line per row)
// Lines starting with '#' are comments. Rows are written in stored order.
void write_lp(std::ostream& out, const LinearProgram& lp);
std::string lp_to_string(const LinearProgram& lp);

LinearProgram read_lp(std::istream& in);
LinearProgram lp_from_string(const std::string& text);

}  // namespace loccache
