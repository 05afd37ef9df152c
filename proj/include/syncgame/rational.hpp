#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "syncgame/error.hpp"

namespace syncgame {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// "23/25", or "2" when the denominator is one.
inline std::string to_string(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Accepts "p/q", plain integers, and finite decimals such as "0.04".
inline Rational parse_rational(const std::string& text) {
  using boost::multiprecision::cpp_int;
  try {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
      cpp_int num(text.substr(0, slash));
      cpp_int den(text.substr(slash + 1));
      if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + text + "'");
      return Rational(num, den);
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(cpp_int(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    cpp_int den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    if (digits.empty() || digits == "-") digits += "0";
    return Rational(cpp_int(digits), den);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "not a rational number: '" + text + "'");
  }
}

}  // namespace syncgame
