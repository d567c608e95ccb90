#include "taxarb/rational.hpp"

#include <stdexcept>

namespace taxarb {

Rational rat(long num, long den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::optional<Rational> try_parse_rational(const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  std::size_t num_begin = i;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
  std::size_t num_len = i - num_begin;
  if (num_len == 0) return std::nullopt;

  std::string den_digits = "1";
  if (i < text.size()) {
    if (text[i] != '/') return std::nullopt;
    ++i;
    std::size_t den_begin = i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
    if (i != text.size() || i == den_begin) return std::nullopt;
    den_digits = text.substr(den_begin);
  }

  Integer num(text.substr(num_begin, num_len), 10);
  Integer den(den_digits, 10);
  if (den == 0) return std::nullopt;

  Rational q(num, den);
  q.canonicalize();
  if (negative) q = -q;
  return q;
}

Rational parse_rational(const std::string& text) {
  auto parsed = try_parse_rational(text);
  if (!parsed) {
    throw std::invalid_argument("not a rational literal: \"" + text +
                                "\" (expected \"p/q\" or an integer)");
  }
  return *parsed;
}

std::string format_rational(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Rational rational_pow(const Rational& value, long exponent) {
  if (exponent == 0) return rat(1);
  Rational base = value;
  if (exponent < 0) {
    if (base == 0) throw std::domain_error("zero raised to a negative power");
    base = Rational(1) / base;
    exponent = -exponent;
  }
  Rational out;
  const auto e = static_cast<unsigned long>(exponent);
  mpz_pow_ui(mpq_numref(out.get_mpq_t()), mpq_numref(base.get_mpq_t()), e);
  mpz_pow_ui(mpq_denref(out.get_mpq_t()), mpq_denref(base.get_mpq_t()), e);
  return out;
}

}  // namespace taxarb
