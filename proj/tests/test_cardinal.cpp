#include <gtest/gtest.h>

#include <vector>

#include "opequiv/cardinal.hpp"

using opequiv::Cardinal;

namespace {

std::vector<Cardinal> sample_cardinals() {
  std::vector<Cardinal> out;
  for (long long n : {0LL, 1LL, 2LL, 3LL, 7LL, 1000000000LL}) out.emplace_back(n);
  for (int k = 0; k <= Cardinal::kMaxLevel; ++k) out.push_back(Cardinal::aleph(k));
  return out;
}

}  // namespace

TEST(Cardinal, AddExamples) {
  EXPECT_EQ(opequiv::card_add(2, 3), Cardinal(5));
  EXPECT_EQ(opequiv::card_add(7, Cardinal::aleph(0)), Cardinal::aleph(0));
  EXPECT_EQ(opequiv::card_add(Cardinal::aleph(0), Cardinal::aleph(1)), Cardinal::aleph(1));
}

TEST(Cardinal, CompareExamples) {
  EXPECT_TRUE(opequiv::card_le(3, Cardinal::aleph(0)));
  EXPECT_FALSE(opequiv::card_le(Cardinal::aleph(0), 1000000000LL));
  EXPECT_TRUE(opequiv::card_le(4, 4));
}

TEST(Cardinal, FiniteBelowEveryAleph) {
  EXPECT_LT(Cardinal(opequiv::Integer(1) << 400), Cardinal::aleph(0));
  EXPECT_LT(Cardinal::aleph(1), Cardinal::aleph(2));
}

TEST(Cardinal, AdditionLawsExhaustive) {
  auto xs = sample_cardinals();
  for (const auto& a : xs)
    for (const auto& b : xs) {
      EXPECT_EQ(a + b, b + a);
      for (const auto& c : xs) EXPECT_EQ(a + (b + c), (a + b) + c);
    }
}

TEST(Cardinal, OrderIsTotalAndAdditionMonotone) {
  auto xs = sample_cardinals();
  for (const auto& a : xs) {
    EXPECT_TRUE(a <= a);
    for (const auto& b : xs) {
      EXPECT_TRUE(a <= b || b <= a);
      if (a <= b && b <= a) {
        EXPECT_EQ(a, b);
      }
      for (const auto& c : xs) {
        if (a <= b && b <= c) {
          EXPECT_TRUE(a <= c);
        }
        if (a <= b) {
          EXPECT_TRUE(a + c <= b + c);
        }
      }
    }
  }
}

TEST(Cardinal, ParseAndPrint) {
  EXPECT_EQ(opequiv::parse_cardinal("aleph1"), Cardinal::aleph(1));
  EXPECT_EQ(opequiv::parse_cardinal("12"), Cardinal(12));
  EXPECT_EQ(Cardinal::aleph(2).str(), "aleph2");
  EXPECT_THROW(opequiv::parse_cardinal("aleph7"), opequiv::Error);
  EXPECT_THROW(opequiv::parse_cardinal("1/2"), opequiv::Error);
  EXPECT_THROW(opequiv::parse_cardinal("-3"), opequiv::Error);
}
