#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace loccache {

// Exact rational backed by GMP. Values are kept canonical.
using Rational = mpq_class;

Rational make_rational(std::int64_t num, std::int64_t den = 1);

// Accepts "p/q", "p" and terminating decimals such as "2.5".
Rational parse_rational(std::string_view text);

// Always "p/q", including integers ("3/1") and zero ("0/1").
std::string to_string(const Rational& value);

// Fixed-point rendering for plotting; rounds half away from zero.
std::string to_decimal(const Rational& value, int precision);

Rational rational_min(const Rational& x, const Rational& y);
Rational rational_max(const Rational& x, const Rational& y);

std::uint64_t lcm_u64(std::uint64_t x, std::uint64_t y);

// Binomial coefficient with the convention C(x, y) = 0 outside 0 <= y <= x.
std::int64_t binomial(int n, int k);

}  // namespace loccache
