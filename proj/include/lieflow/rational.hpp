#pragma once
#include <gmpxx.h>

#include <string>

#include "lieflow/errors.hpp"

namespace lieflow {

/// Exact rational scalar used wherever identities are certified exactly.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

/// q^e for integer e (e may be negative; q must be nonzero then).
inline Rational pow_int(const Rational& q, long e) {
  if (e == 0) return 1;
  bool inv = e < 0;
  unsigned long a = inv ? -e : e;
  Rational base = q, out = 1;
  while (a) {
    if (a & 1) out *= base;
    base *= base;
    a >>= 1;
  }
  if (inv) {
    if (out == 0) throw NumericalBreakdown("zero raised to negative power");
    out = Rational(1) / out;
  }
  return out;
}

inline double pow_int(double q, long e) {
  double out = 1.0, base = e < 0 ? 1.0 / q : q;
  unsigned long a = e < 0 ? -e : e;
  while (a) {
    if (a & 1) out *= base;
    base *= base;
    a >>= 1;
  }
  return out;
}

/// Parses "3", "-2/7" or "0.25" (decimal with finite expansion) exactly.
inline Rational parse_rational(const std::string& text) {
  std::string s = text;
  auto dot = s.find('.');
  try {
    if (dot == std::string::npos) {
      Rational q(s);
      q.canonicalize();
      return q;
    }
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac_len = s.size() - dot - 1;
    Rational q(digits);
    for (std::size_t i = 0; i < frac_len; ++i) q /= 10;
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw ConfigError("not a rational number: '" + text + "'");
  }
}

}  // namespace lieflow
