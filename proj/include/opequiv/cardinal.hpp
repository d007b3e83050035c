#pragma once

#include <compare>
#include <ostream>
#include <string>
#include <variant>

#include "opequiv/error.hpp"
#include "opequiv/rational.hpp"

namespace opequiv {

// Dimension of a (possibly nonseparable) Hilbert space: a natural number or one
// of a few symbolic infinite levels (aleph0 = countably infinite).
class Cardinal {
 public:
  static constexpr int kMaxLevel = 2;

  Cardinal() = default;
  Cardinal(long long n) : Cardinal(Integer(n)) {}  // NOLINT(google-explicit-constructor)
  Cardinal(const Integer& n) : value_(n) {         // NOLINT(google-explicit-constructor)
    if (n < 0) throw Error(ErrorCode::InvalidSpec, "negative cardinal");
  }

  static Cardinal aleph(int level) {
    if (level < 0 || level > kMaxLevel)
      throw Error(ErrorCode::InvalidSpec, "aleph level out of range: " + std::to_string(level));
    Cardinal c;
    c.value_ = Infinite{level};
    return c;
  }

  bool is_finite() const { return std::holds_alternative<Integer>(value_); }
  bool is_zero() const { return is_finite() && finite() == 0; }

  // Precondition: is_finite().
  const Integer& finite() const { return std::get<Integer>(value_); }
  // -1 for finite cardinals.
  int level() const { return is_finite() ? -1 : std::get<Infinite>(value_).level; }

  friend Cardinal operator+(const Cardinal& a, const Cardinal& b) {
    if (a.is_finite() && b.is_finite()) return Cardinal(a.finite() + b.finite());
    return aleph(std::max(a.level(), b.level()));
  }
  Cardinal& operator+=(const Cardinal& other) { return *this = *this + other; }

  friend bool operator==(const Cardinal& a, const Cardinal& b) {
    if (a.is_finite() != b.is_finite()) return false;
    return a.is_finite() ? a.finite() == b.finite() : a.level() == b.level();
  }
  friend std::strong_ordering operator<=>(const Cardinal& a, const Cardinal& b) {
    if (a.is_finite() && b.is_finite()) {
      if (a.finite() < b.finite()) return std::strong_ordering::less;
      if (a.finite() > b.finite()) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    }
    return a.level() <=> b.level();
  }

  std::string str() const { return is_finite() ? finite().str() : "aleph" + std::to_string(level()); }

 private:
  struct Infinite {
    int level;
  };
  std::variant<Integer, Infinite> value_{Integer(0)};
};

inline std::ostream& operator<<(std::ostream& os, const Cardinal& c) { return os << c.str(); }

inline Cardinal card_add(const Cardinal& a, const Cardinal& b) { return a + b; }
inline bool card_le(const Cardinal& a, const Cardinal& b) { return a <= b; }

inline Cardinal parse_cardinal(std::string_view text) {
  if (text.starts_with("aleph")) {
    auto rest = text.substr(5);
    if (rest.size() == 1 && rest[0] >= '0' && rest[0] <= '9') return Cardinal::aleph(rest[0] - '0');
    throw Error(ErrorCode::SchemaViolation, "bad cardinal '" + std::string(text) + "'");
  }
  Rational r = parse_rational(text);
  if (boost::multiprecision::denominator(r) != 1 || r < 0)
    throw Error(ErrorCode::SchemaViolation, "cardinal must be a nonnegative integer");
  return Cardinal(boost::multiprecision::numerator(r));
}

}  // namespace opequiv
