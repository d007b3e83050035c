#pragma once

#include <cmath>
#include <numeric>
#include <string>

#include "opequiv/error.hpp"
#include "opequiv/rational.hpp"

namespace opequiv {

// Closed-form model for the singular values of a compact diagonal operator
// beyond its explicit prefix. Terms are indexed by n = start, start + 1, ...
struct TailModel {
  enum class Kind { Zero, Geometric, PowerLaw, FactorialReciprocal };

  Kind kind = Kind::Zero;
  Rational c = 1;     // Geometric, PowerLaw
  Rational r = 0;     // Geometric ratio
  Rational p = 1;     // PowerLaw exponent
  long long start = 0;

  static TailModel zero() { return {}; }
  static TailModel geometric(Rational c, Rational r, long long start = 0) {
    return {Kind::Geometric, std::move(c), std::move(r), 1, start};
  }
  static TailModel power_law(Rational c, Rational p, long long start = 1) {
    return {Kind::PowerLaw, std::move(c), 0, std::move(p), start};
  }
  static TailModel factorial_reciprocal(long long start = 1) {
    return {Kind::FactorialReciprocal, 1, 0, 1, start};
  }

  bool is_zero() const { return kind == Kind::Zero; }

  friend bool operator==(const TailModel&, const TailModel&) = default;

  void validate() const {
    switch (kind) {
      case Kind::Zero: return;
      case Kind::Geometric:
        if (c <= 0 || r <= 0 || r >= 1 || start < 0)
          throw Error(ErrorCode::InvalidSpec, "geometric tail needs c > 0, 0 < r < 1, start >= 0");
        return;
      case Kind::PowerLaw:
        if (c <= 0 || p <= 0 || start < 1)
          throw Error(ErrorCode::InvalidSpec, "power-law tail needs c > 0, p > 0, start >= 1");
        return;
      case Kind::FactorialReciprocal:
        if (start < 0) throw Error(ErrorCode::InvalidSpec, "factorial tail needs start >= 0");
        return;
    }
  }

  // Terms are exact L-th roots of rationals; this is the smallest such L.
  unsigned root_degree() const {
    if (kind != Kind::PowerLaw) return 1;
    return boost::multiprecision::denominator(p).convert_to<unsigned>();
  }

  // term(n)^power; power must be a multiple of root_degree().
  Rational term_power(long long n, unsigned power) const {
    switch (kind) {
      case Kind::Zero: return 0;
      case Kind::Geometric: return opequiv::pow(c * opequiv::pow(r, n), static_cast<long long>(power));
      case Kind::PowerLaw: {
        Integer num = boost::multiprecision::numerator(p);
        Integer den = boost::multiprecision::denominator(p);
        long long e = (num * power / den).convert_to<long long>();
        return opequiv::pow(c, static_cast<long long>(power)) / Rational(opequiv::pow(Integer(n), static_cast<unsigned long long>(e)));
      }
      case Kind::FactorialReciprocal: {
        Integer f = 1;
        for (long long k = 2; k <= n; ++k) f *= k;
        return opequiv::pow(Rational(1, f), static_cast<long long>(power));
      }
    }
    return 0;
  }

  double term_approx(long long n) const {
    switch (kind) {
      case Kind::Zero: return 0.0;
      case Kind::Geometric: return to_double(c) * std::pow(to_double(r), static_cast<double>(n));
      case Kind::PowerLaw: return to_double(c) * std::pow(static_cast<double>(n), -to_double(p));
      case Kind::FactorialReciprocal: return std::exp(-std::lgamma(static_cast<double>(n) + 1.0));
    }
    return 0.0;
  }

  // Number of indices n >= start with term(n) >= x, for rational x > 0.
  Integer count_ge(const Rational& x) const {
    switch (kind) {
      case Kind::Zero: return 0;
      case Kind::PowerLaw: {
        // c n^(-a/b) >= x  <=>  n^a <= (c/x)^b
        unsigned a = boost::multiprecision::numerator(p).convert_to<unsigned>();
        long long b = boost::multiprecision::denominator(p).convert_to<long long>();
        Integer n_max = root_floor(opequiv::pow(c / x, b), a);
        Integer count = n_max - start + 1;
        return count > 0 ? count : Integer(0);
      }
      case Kind::Geometric: {
        if (c < x) return 0;
        double est = (log_abs(c) - log_abs(x)) / -log_abs(r);
        long long n = std::max<long long>(0, static_cast<long long>(std::floor(est)));
        Rational v = c * opequiv::pow(r, n);
        while (v < x && n > 0) {
          --n;
          v /= r;
        }
        while (v * r >= x) {
          ++n;
          v *= r;
        }
        // n is the largest index with c r^n >= x.
        long long count = n - start + 1;
        return count > 0 ? Integer(count) : Integer(0);
      }
      case Kind::FactorialReciprocal: {
        Integer f = 1;
        long long n = 0;
        // 1/n! is nonincreasing in n; find the largest n with n! num(x) <= den(x).
        const Integer num = boost::multiprecision::numerator(x), den = boost::multiprecision::denominator(x);
        if (num > den) return 0;
        while (f * (n + 1) * num <= den) {
          ++n;
          f *= n;
        }
        long long count = n - start + 1;
        return count > 0 ? Integer(count) : Integer(0);
      }
    }
    return 0;
  }

  // Number of tail terms in [delta^(j+1), delta^j).
  Integer count_in_bucket(long long j, const Rational& delta) const {
    return count_ge(opequiv::pow(delta, j + 1)) - count_ge(opequiv::pow(delta, j));
  }

  std::string describe() const {
    switch (kind) {
      case Kind::Zero: return "zero";
      case Kind::Geometric: return to_string(c) + "*(" + to_string(r) + ")^n, n>=" + std::to_string(start);
      case Kind::PowerLaw: return to_string(c) + "*n^-(" + to_string(p) + "), n>=" + std::to_string(start);
      case Kind::FactorialReciprocal: return "1/n!, n>=" + std::to_string(start);
    }
    return "";
  }
};

}  // namespace opequiv
