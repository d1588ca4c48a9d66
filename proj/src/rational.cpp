#include "loccache/rational.hpp"

#include <numeric>
#include <stdexcept>

namespace loccache {

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational r(std::to_string(num) + "/" + std::to_string(den));
  r.canonicalize();
  return r;
}

namespace {

bool is_integer_text(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!is_integer_text(num) || !is_integer_text(den)) {
      throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    }
    mpz_class n{std::string(num)}, d{std::string(den)};
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r(n, d);
    r.canonicalize();
    return r;
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string digits(text.substr(0, dot));
    auto frac = text.substr(dot + 1);
    if (digits.empty() || digits == "-" || digits == "+") digits += "0";
    if (!is_integer_text(digits) || (!frac.empty() && !is_integer_text(frac)) ||
        (!frac.empty() && (frac[0] == '-' || frac[0] == '+'))) {
      throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
    }
    mpz_class scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    bool negative = digits[0] == '-';
    mpz_class whole(digits);
    mpz_class part = frac.empty() ? mpz_class(0) : mpz_class(std::string(frac));
    mpz_class num = abs(whole) * scale + part;
    if (negative) num = -num;
    Rational r(num, scale);
    r.canonicalize();
    return r;
  }
  if (!is_integer_text(text)) {
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  }
  return Rational(mpz_class(std::string(text)));
}

std::string to_string(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string to_decimal(const Rational& value, int precision) {
  if (precision < 0) precision = 0;
  mpz_class scale = 1;
  for (int i = 0; i < precision; ++i) scale *= 10;
  mpz_class num = abs(value.get_num()) * scale * 2 + value.get_den();
  mpz_class den = value.get_den() * 2;
  mpz_class q = num / den;  // round half up on the magnitude
  std::string digits = q.get_str();
  if (static_cast<int>(digits.size()) <= precision) {
    digits.insert(0, static_cast<std::size_t>(precision) + 1 - digits.size(), '0');
  }
  std::string out;
  if (value < 0 && q != 0) out += '-';
  out += digits.substr(0, digits.size() - static_cast<std::size_t>(precision));
  if (precision > 0) {
    out += '.';
    out += digits.substr(digits.size() - static_cast<std::size_t>(precision));
  }
  return out;
}

Rational rational_min(const Rational& x, const Rational& y) { return x < y ? x : y; }
Rational rational_max(const Rational& x, const Rational& y) { return x < y ? y : x; }

std::uint64_t lcm_u64(std::uint64_t x, std::uint64_t y) {
  if (x == 0 || y == 0) return 0;
  return x / std::gcd(x, y) * y;
}

std::int64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace loccache
