#include "taxarb/rational.hpp"

#include "doctest.h"

#include <stdexcept>

using namespace taxarb;

TEST_CASE("parses integers and fractions in lowest terms") {
  CHECK(parse_rational("3/4") == rat(3, 4));
  CHECK(parse_rational("-2/8") == rat(-1, 4));
  CHECK(parse_rational("7") == rat(7));
  CHECK(parse_rational("+5/10") == rat(1, 2));
  CHECK(parse_rational("-0") == rat(0));
  CHECK(parse_rational("0/5") == rat(0));
  CHECK(parse_rational("123456789012345678901234567890/3") ==
        Rational("41152263004115226300411522630"));
}

TEST_CASE("rejects floating point and malformed literals") {
  const char* bad[] = {"",     "0.75", "1.0",  "1e3",  " 1",  "1 ",  "1/",
                       "/2",   "1//2", "3/0",  "0x10", "--1", "1/-2", "+",
                       "-",    "1/+2", "2.5/3", "nan"};
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK(!try_parse_rational(text).has_value());
    CHECK_THROWS_AS(parse_rational(text), std::invalid_argument);
  }
}

TEST_CASE("formats without a denominator of one") {
  CHECK(format_rational(rat(1, 2)) == "1/2");
  CHECK(format_rational(rat(-3)) == "-3");
  CHECK(format_rational(rat(0)) == "0");
  CHECK(format_rational(rat(-7, 14)) == "-1/2");
}

TEST_CASE("format and parse round trip") {
  const Rational values[] = {rat(0), rat(5), rat(-5), rat(22, 7), rat(-9, 121)};
  for (const Rational& value : values) {
    CHECK(parse_rational(format_rational(value)) == value);
  }
}

TEST_CASE("integer powers cover negative exponents") {
  CHECK(rational_pow(rat(2, 3), 3) == rat(8, 27));
  CHECK(rational_pow(rat(2, 3), 0) == rat(1));
  CHECK(rational_pow(rat(2, 3), -2) == rat(9, 4));
  CHECK(rational_pow(rat(0), 0) == rat(1));
  CHECK(rational_pow(rat(-1, 2), 2) == rat(1, 4));
  CHECK(rational_pow(rat(-1, 2), 3) == rat(-1, 8));
  CHECK_THROWS_AS(rational_pow(rat(0), -1), std::domain_error);
}
