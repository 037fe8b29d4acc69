#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "mot/errors.hpp"

namespace mot {

/// Exact arbitrary-precision fraction, always kept in canonical form
/// (positive denominator, coprime parts).
using Rational = mpq_class;

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

inline mpz_class pow10(unsigned long exponent) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), 10, exponent);
  return out;
}

}  // namespace detail

/// Parses "p/q", an integer, or a decimal such as "-0.125" or "2.5e-3".
/// Throws ParseError on anything else, including a zero denominator.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> ParseError {
    return ParseError("not an exact number: \"" + std::string(text) + "\"");
  };
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw fail();

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  Rational value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    if (!detail::all_digits(num) || !detail::all_digits(den)) throw fail();
    mpz_class d(std::string(den), 10);
    if (d == 0) throw fail();
    value = Rational(mpz_class(std::string(num), 10), d);
    value.canonicalize();
  } else {
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      std::string_view exp_text = s.substr(e + 1);
      bool exp_negative = false;
      if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
        exp_negative = exp_text.front() == '-';
        exp_text.remove_prefix(1);
      }
      if (!detail::all_digits(exp_text) || exp_text.size() > 6) throw fail();
      exponent = std::stol(std::string(exp_text));
      if (exp_negative) exponent = -exponent;
      s = s.substr(0, e);
    }
    std::string_view int_part = s;
    std::string_view frac_part;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      int_part = s.substr(0, dot);
      frac_part = s.substr(dot + 1);
      if (!frac_part.empty() && !detail::all_digits(frac_part)) throw fail();
    }
    if (!int_part.empty() && !detail::all_digits(int_part)) throw fail();
    if (int_part.empty() && frac_part.empty()) throw fail();

    std::string digits = std::string(int_part) + std::string(frac_part);
    mpz_class num(digits, 10);
    exponent -= static_cast<long>(frac_part.size());
    if (exponent >= 0) {
      value = Rational(num * detail::pow10(static_cast<unsigned long>(exponent)));
    } else {
      value = Rational(num, detail::pow10(static_cast<unsigned long>(-exponent)));
      value.canonicalize();
    }
  }
  if (negative) value = -value;
  return value;
}

/// Canonical exact rendering: "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& r) { return r.get_str(); }

/// Decimal rendering rounded half away from zero to `digits` fractional
/// places, trailing zeros trimmed. Display only.
inline std::string to_decimal(const Rational& r, unsigned digits = 12) {
  const mpz_class scale = detail::pow10(digits);
  Rational scaled = abs(r) * scale + Rational(1, 2);
  mpz_class rounded;
  mpz_fdiv_q(rounded.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());

  std::string body = rounded.get_str();
  if (body.size() <= digits) body.insert(0, digits + 1 - body.size(), '0');
  std::string int_part = body.substr(0, body.size() - digits);
  std::string frac_part = body.substr(body.size() - digits);
  while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();

  std::string out;
  if (sgn(r) < 0 && (rounded != 0)) out.push_back('-');
  out += int_part;
  if (!frac_part.empty()) out += "." + frac_part;
  return out;
}

}  // namespace mot
