#include <gtest/gtest.h>

#include "opequiv/engine.hpp"
#include "spec_gen.hpp"

using namespace opequiv;
using namespace opequiv::testing;

namespace {

const Rational kHalf{1, 2};
const Cardinal kAleph0 = Cardinal::aleph(0);

SpecPtr harmonic() { return compact_diagonal({}, TailModel::power_law(1, 1)); }
SpecPtr inverse_factorial(long long start = 1) { return compact_diagonal({}, TailModel::factorial_reciprocal(start)); }
SpecPtr plus_identity(const SpecPtr& s, Cardinal dim) { return direct_sum(s, scaled_identity(1, std::move(dim))); }

SpecPtr matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return make_matrix(m);
}

}  // namespace

TEST(DecideStrong, InvertibleMatricesOfEqualSize) {
  auto v = decide_strong(matrix({{3, 1, 0, 0}, {0, 5, 0, 1}, {1, 0, 7, 0}, {0, 0, 1, 9}}),
                         matrix({{5, 0, 0, 0}, {0, 6, 0, 0}, {0, 0, 7, 0}, {0, 0, 0, 11}}));
  EXPECT_TRUE(v.holds);
  EXPECT_EQ(v.reason, Reason::Established);
}

TEST(DecideStrong, HarmonicAgainstShiftedHarmonic) {
  auto v = decide_strong(harmonic(), compact_diagonal({}, TailModel::power_law(1, 1, 2)));
  ASSERT_TRUE(v.holds);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness->delta_prime, kHalf);
}

TEST(DecideStrong, FactorialAgainstShiftedFactorial) {
  auto v = decide_strong(inverse_factorial(1), inverse_factorial(2));
  EXPECT_FALSE(v.holds);
  EXPECT_EQ(v.reason, Reason::NotComparable);
  EXPECT_FALSE(v.witness);
}

TEST(DecideStrong, HarmonicWithFiniteIdentity) {
  for (long long m = 0; m <= 5; ++m) {
    auto v = decide_strong(harmonic(), plus_identity(harmonic(), m));
    ASSERT_TRUE(v.holds) << m;
    ASSERT_TRUE(v.witness->shift);
    EXPECT_EQ(*v.witness->shift, m);
    const Rational& d = v.witness->delta_prime;
    for (long long n = 1; n <= 256; ++n) EXPECT_LE(d, Rational(n, n + m));
  }
}

TEST(DecideStrong, FactorialWithFiniteIdentityFails) {
  for (long long m = 1; m <= 5; ++m) {
    auto v = decide_strong(inverse_factorial(), plus_identity(inverse_factorial(), m));
    EXPECT_FALSE(v.holds);
    EXPECT_EQ(v.reason, Reason::NotComparable);
  }
  EXPECT_TRUE(decide_strong(inverse_factorial(), inverse_factorial()).holds);
}

TEST(DecideStrong, KernelMismatch) {
  auto v = decide_strong(compact_diagonal({}, TailModel::power_law(1, 1), 1), harmonic());
  EXPECT_FALSE(v.holds);
  EXPECT_EQ(v.reason, Reason::KernelMismatch);
}

TEST(DecideStrong, NoncompactUsesConditionS) {
  auto v = decide_strong(plus_identity(harmonic(), kAleph0), direct_sum(harmonic(), scaled_identity(2, kAleph0)));
  EXPECT_TRUE(v.holds);
  EXPECT_EQ(v.path, "condition-S");
  auto f = decide_strong(plus_identity(harmonic(), kAleph0), plus_identity(inverse_factorial(), kAleph0));
  EXPECT_FALSE(f.holds);
  EXPECT_EQ(f.reason, Reason::ConditionSFailed);
  ASSERT_TRUE(f.window);
}

TEST(DecideExtension, FiniteDimensionalDefects) {
  auto t = matrix({{1.5, 0, 0}, {0, 3, 0}, {0, 0, 0}});
  auto s = matrix({{5, 0}, {0, 0}});
  auto v = decide_extension_family(t, s);
  EXPECT_TRUE(v.holds);
  EXPECT_EQ(v.path, "finite-dimensional");
  auto u = decide_extension_family(t, matrix({{5, 0}, {0, 7}}));
  EXPECT_FALSE(u.holds);
  EXPECT_EQ(u.reason, Reason::KernelMismatch);
}

TEST(DecideExtension, FactorialWithFiniteIdentityHoldsByShift) {
  for (long long m = 0; m <= 5; ++m) {
    auto v = decide_extension_family(inverse_factorial(), plus_identity(inverse_factorial(), m));
    ASSERT_TRUE(v.holds) << m;
    ASSERT_TRUE(v.witness->shift);
    EXPECT_EQ(*v.witness->shift, m);
    EXPECT_EQ(v.witness->feasible_shifts, std::vector<long long>{m});
    EXPECT_EQ(v.witness->extension_side, m ? ExtensionSide::left(m) : ExtensionSide::none());
  }
}

TEST(DecideExtension, DifferentTailFamiliesAreNotComparable) {
  auto v = decide_extension_family(harmonic(), inverse_factorial());
  EXPECT_FALSE(v.holds);
  EXPECT_EQ(v.reason, Reason::NotComparable);
}

TEST(DecideExtension, CompactAgainstNoncompactUsesLowPart) {
  auto v = decide_extension_family(harmonic(), plus_identity(harmonic(), kAleph0));
  ASSERT_TRUE(v.holds);
  EXPECT_EQ(v.path, "low-part-sequences");
  EXPECT_EQ(v.witness->extension_side, ExtensionSide::left(kAleph0));
  auto f = decide_extension_family(harmonic(), plus_identity(compact_diagonal({}, TailModel::power_law(1, 2)), kAleph0));
  EXPECT_FALSE(f.holds);
  EXPECT_EQ(f.reason, Reason::NotComparable);
}

TEST(DecideExtension, NoncompactPairsUpgrade) {
  auto a = plus_identity(harmonic(), kAleph0);
  auto b = direct_sum(harmonic(), scaled_identity(3, kAleph0));
  auto v = decide_extension_family(a, b);
  ASSERT_TRUE(v.holds);
  EXPECT_EQ(v.path, "condition-S-tilde");
  EXPECT_TRUE(v.strong_upgrade);
  EXPECT_TRUE(decide_strong(a, b).holds);
  auto f = decide_extension_family(a, plus_identity(inverse_factorial(), kAleph0));
  EXPECT_FALSE(f.holds);
  EXPECT_EQ(f.reason, Reason::ConditionSTildeFailed);
}

TEST(DecideExtension, ClosedRangeShortcut) {
  auto a = direct_sum(compact_diagonal({Rational(3)}, TailModel::zero()), scaled_identity(1, kAleph0));
  auto b = scaled_identity(Rational(1, 5), kAleph0);
  auto v = decide_extension_family(a, b);
  EXPECT_TRUE(v.holds);
  EXPECT_EQ(v.path, "closed-range");
}

TEST(BuildWitness, RequestedShiftOnHarmonic) {
  auto v = decide_extension_family(harmonic(), harmonic());
  ASSERT_TRUE(v.holds);
  auto w = build_witness(harmonic(), harmonic(), v, 2);
  EXPECT_EQ(w.extension_side, ExtensionSide::left(2));
  EXPECT_EQ(w.shift, 2);
  EXPECT_EQ(w.delta_prime, Rational(1, 3));
}

TEST(BuildWitness, IdenticalFiniteBuckets) {
  BucketMeasure m;
  m.buckets = {{0, 2}, {3, 1}};
  auto spec = make_spec(Buckets{m});
  auto v = decide_extension_family(spec, spec);
  ASSERT_TRUE(v.holds);
  auto w = build_witness(spec, spec, v);
  ASSERT_TRUE(w.pairing);
  EXPECT_EQ(w.pairing->case_tag, MatchCase::I);
  EXPECT_EQ(w.pairing->padding, 0);
  EXPECT_EQ(w.pairing->delta_prime, Rational(1, 4));
  EXPECT_EQ(w.extension_side, ExtensionSide::none());
}

TEST(BuildWitness, MatricesWithEqualDefect) {
  auto t = matrix({{1.5, 0, 0}, {0, 3, 0}, {0, 0, 0}});
  auto s = matrix({{5, 0}, {0, 0}});
  auto v = decide_extension_family(t, s);
  auto w = build_witness(t, s, v);
  ASSERT_TRUE(w.pairing);
  EXPECT_EQ(w.pairing->case_tag, MatchCase::III);
  EXPECT_EQ(w.pairing->padding, 1);
  EXPECT_EQ(w.extension_side, ExtensionSide::right(1));
  EXPECT_EQ(w.pairing->pairing.size(), 2u);
}

TEST(BuildWitness, StrongPairingOnMatrices) {
  auto t = matrix({{2, 1}, {0, 3}});
  auto s = matrix({{5, 0}, {0, 7}});
  auto v = decide_strong(t, s);
  ASSERT_TRUE(v.holds);
  auto w = build_witness(t, s, v);
  ASSERT_TRUE(w.pairing);
  EXPECT_EQ(w.pairing->padding, 0);
}

TEST(BuildWitness, RefusesFailedVerdict) {
  auto v = decide_strong(inverse_factorial(1), inverse_factorial(2));
  EXPECT_THROW(build_witness(inverse_factorial(1), inverse_factorial(2), v), Error);
}

TEST(EngineProperties, ImplicationChainAndSymmetry) {
  Rng rng(41);
  std::vector<SpecPtr> pool;
  for (int i = 0; i < 24; ++i) pool.push_back(well_bucketed(rng, random_spec));
  int strong = 0;
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t k = 0; k < pool.size(); ++k) {
      auto s = decide_strong(pool[i], pool[k]);
      auto e = decide_extension_family(pool[i], pool[k]);
      if (s.holds) {
        ++strong;
        EXPECT_TRUE(e.holds) << i << "," << k;
      }
      EXPECT_EQ(s.holds, decide_strong(pool[k], pool[i]).holds) << i << "," << k;
      EXPECT_EQ(e.holds, decide_extension_family(pool[k], pool[i]).holds) << i << "," << k;
    }
  EXPECT_GE(strong, static_cast<int>(pool.size()));
}

TEST(EngineProperties, DirectSumCompatibility) {
  Rng rng(43);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto a = well_bucketed(rng, random_closed_range), a2 = well_bucketed(rng, random_closed_range);
    auto b = direct_sum(a, scaled_identity(Rational(uniform(rng, 1, 4)), 0));
    auto b2 = direct_sum(a2, compact_diagonal({}, TailModel::zero()));
    if (!decide_strong(a, b).holds || !decide_strong(a2, b2).holds) continue;
    ++checked;
    EXPECT_TRUE(decide_strong(direct_sum(a, a2), direct_sum(b, b2)).holds);
    EXPECT_TRUE(decide_extension_family(direct_sum(a, a2), direct_sum(b, b2)).holds);
  }
  EXPECT_GT(checked, 20);
}

TEST(EngineProperties, ClosedRangeShortcutAgreesWithConditionSTilde) {
  Rng rng(47);
  for (int trial = 0; trial < 60; ++trial) {
    auto a = well_bucketed(rng, random_closed_range), b = well_bucketed(rng, random_closed_range);
    auto ma = modulus_data(a, kHalf), mb = modulus_data(b, kHalf);
    auto v = decide_extension_family(a, b);
    bool general = kernel_condition(ma, mb) && check_condition_S_tilde(ma, mb).present();
    EXPECT_EQ(v.holds, general) << trial;
  }
}
