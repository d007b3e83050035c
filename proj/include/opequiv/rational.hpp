#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "opequiv/error.hpp"

namespace opequiv {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(const Integer& num, const Integer& den) { return Rational(num, den); }

// Accepts "p/q", an integer "p", or a plain decimal "0.125" (converted exactly).
inline Rational parse_rational(std::string_view text) {
  auto bad = [&] { return Error(ErrorCode::SchemaViolation, "not a rational: '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  auto parse_int = [&](std::string_view s) -> Integer {
    if (s.empty()) throw bad();
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw bad();
    for (std::size_t k = i; k < s.size(); ++k)
      if (s[k] < '0' || s[k] > '9') throw bad();
    Integer v(std::string(s.substr(i)));
    return s[0] == '-' ? Integer(-v) : v;
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer den = parse_int(text.substr(slash + 1));
    if (den == 0) throw bad();
    return Rational(parse_int(text.substr(0, slash)), den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string digits = std::string(text.substr(0, dot)) + std::string(text.substr(dot + 1));
    std::size_t frac = text.size() - dot - 1;
    Integer den = 1;
    for (std::size_t k = 0; k < frac; ++k) den *= 10;
    return Rational(parse_int(digits), den);
  }
  return Rational(parse_int(text));
}

inline std::string to_string(const Rational& r) {
  const Integer& d = boost::multiprecision::denominator(r);
  if (d == 1) return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" + d.str();
}

inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidSpec, "non-finite matrix entry");
  int exp = 0;
  double mant = std::frexp(x, &exp);
  // 53 bits of mantissa fit exactly into an int64 after scaling.
  auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r{Integer(scaled)};
  Integer p2 = Integer(1) << (exp >= 0 ? exp : -exp);
  return exp >= 0 ? Rational(r * p2) : Rational(r / p2);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational pow(const Rational& base, long long exponent) {
  // numerator and denominator stay coprime, so power them as integers
  Integer num = boost::multiprecision::numerator(base), den = boost::multiprecision::denominator(base);
  if (exponent < 0) {
    if (num == 0) throw Error(ErrorCode::InternalInconsistency, "zero to a negative power");
    std::swap(num, den);
    if (den < 0) {
      num = -num;
      den = -den;
    }
  }
  const auto e = static_cast<unsigned long long>(exponent >= 0 ? exponent : -exponent);
  return Rational(boost::multiprecision::pow(num, static_cast<unsigned>(e)),
                  boost::multiprecision::pow(den, static_cast<unsigned>(e)));
}

inline Integer pow(const Integer& base, unsigned long long exponent) {
  Integer result = 1;
  Integer b = base;
  while (exponent) {
    if (exponent & 1ULL) result *= b;
    b *= b;
    exponent >>= 1ULL;
  }
  return result;
}

inline Integer floor(const Rational& r) {
  Integer n = boost::multiprecision::numerator(r);
  const Integer& d = boost::multiprecision::denominator(r);
  Integer q = n / d;
  if (n < 0 && q * d != n) q -= 1;
  return q;
}

inline double log_abs(const Rational& r) {
  // log of huge rationals without overflowing double.
  Integer n = boost::multiprecision::abs(boost::multiprecision::numerator(r));
  const Integer& d = boost::multiprecision::denominator(r);
  auto log_int = [](const Integer& v) {
    std::size_t bits = boost::multiprecision::msb(v) + 1;
    if (bits <= 1000) return std::log(v.convert_to<double>());
    Integer shifted = v >> (bits - 64);
    return std::log(shifted.convert_to<double>()) + static_cast<double>(bits - 64) * std::log(2.0);
  };
  return log_int(n) - log_int(d);
}

// Largest integer n >= 0 with n^k <= x, for x >= 0.
inline Integer root_floor(const Rational& x, unsigned k) {
  if (x < 1) return 0;
  // floor(x^(1/k)) == floor(floor(x)^(1/k))
  const Integer n = floor(x);
  if (k == 1) return n;
  if (k == 2) return boost::multiprecision::sqrt(n);
  // Newton's method from above, starting at a power of two past the root
  const auto bits = static_cast<unsigned>(boost::multiprecision::msb(n)) / k + 1;
  Integer r = Integer(1) << bits;
  while (true) {
    Integer next = ((k - 1) * r + n / pow(r, static_cast<unsigned long long>(k - 1))) / k;
    if (next >= r) break;
    r = next;
  }
  while (pow(r, static_cast<unsigned long long>(k)) > n) --r;
  while (opequiv::pow(Integer(r + 1), static_cast<unsigned long long>(k)) <= n) ++r;
  return r;
}

// A rational r with 0 < r <= x^(1/k), within a relative 2^-40 of the root.
inline Rational root_lower_bound(const Rational& x, unsigned k) {
  if (k == 1) return x;
  const Integer scale = Integer(1) << 40;
  // floor(x^(1/k) * 2^40) = root_floor(x * 2^(40k), k)
  Integer n = root_floor(x * Rational(pow(scale, k)), k);
  if (n == 0) n = 1;
  Rational r(n, scale);
  while (pow(r, static_cast<long long>(k)) > x) r /= 2;
  return r;
}

// j with delta^(j+1) <= x < delta^j, for x > 0 and 0 < delta < 1.
inline long long bucket_index(const Rational& x, const Rational& delta) {
  double est = log_abs(x) / log_abs(delta);
  long long j = static_cast<long long>(std::floor(est));
  Rational lower = pow(delta, j + 1);
  while (x < lower) {
    ++j;
    lower *= delta;
  }
  Rational upper = lower / delta;
  while (x >= upper) {
    --j;
    upper /= delta;
  }
  return j;
}

inline void require_delta(const Rational& delta) {
  if (delta <= 0 || delta >= 1)
    throw Error(ErrorCode::DeltaOutOfRange, "delta must lie strictly between 0 and 1, got " + to_string(delta));
}

}  // namespace opequiv
