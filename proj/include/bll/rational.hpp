#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <stdexcept>
#include <string>

namespace bll {

// Exact arithmetic for all bound formulas; floats only at the presentation
// boundary. Strict inequalities between thresholds must not depend on
// rounding.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt ipow(BigInt base, unsigned exp) {
  BigInt r = 1;
  while (exp != 0) {
    if (exp & 1u) r *= base;
    base *= base;
    exp >>= 1u;
  }
  return r;
}

inline Rational rpow(const Rational& base, unsigned exp) {
  return {ipow(numerator(base), exp), ipow(denominator(base), exp)};
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// "p/q" when the denominator is nontrivial, plain integer otherwise.
inline std::string to_fraction_string(const Rational& q) {
  const BigInt num = numerator(q);
  const BigInt den = denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

// Accepts "p/q", integers, and plain decimals ("0.125" -> 1/8), all exact.
inline Rational parse_rational(const std::string& text) {
  const auto bad = [&]() -> Rational {
    throw std::invalid_argument("cannot parse rational: '" + text + "'");
  };
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) return bad();

  const auto parse_int = [&](const std::string& part) -> BigInt {
    if (part.empty()) return bad(), BigInt{};
    std::size_t i = (part[0] == '+' || part[0] == '-') ? 1 : 0;
    if (i == part.size()) return bad(), BigInt{};
    for (; i < part.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(part[i]))) {
        return bad(), BigInt{};
      }
    }
    return BigInt(part);
  };

  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const BigInt num = parse_int(s.substr(0, slash));
    const BigInt den = parse_int(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
    return {num, den};
  }

  const auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(parse_int(s));

  std::string head = s.substr(0, dot);
  const std::string frac = s.substr(dot + 1);
  bool negative = false;
  if (!head.empty() && (head[0] == '+' || head[0] == '-')) {
    negative = head[0] == '-';
    head.erase(head.begin());
  }
  if (head.empty() && frac.empty()) return bad();
  for (char c : head + frac) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return bad();
  }
  BigInt num = head.empty() ? BigInt(0) : BigInt(head);
  BigInt den = 1;
  for (char c : frac) {
    num = num * 10 + (c - '0');
    den *= 10;
  }
  Rational q(num, den);
  return negative ? -q : q;
}

}  // namespace bll
