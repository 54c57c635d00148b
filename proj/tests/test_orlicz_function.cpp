#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "orlicz/counterexample.hpp"
#include "orlicz/orlicz_function.hpp"

using namespace orlicz;

namespace {

DyadicOrliczFunction identity_fixture() { return DyadicOrliczFunction(SlopeSequence::constant(LogReal::one())); }
DyadicOrliczFunction geometric_fixture() { return DyadicOrliczFunction(SlopeSequence::pow2_poly(0, 1, 0)); }
DyadicOrliczFunction square_fixture() { return DyadicOrliczFunction(SlopeSequence::pow2_poly(1, 0, 0)); }

LogReal D(double v) { return LogReal::from_double(v); }

}  // namespace

TEST(SlopeSequence, ListRepeatsLastEntry) {
  const auto s = SlopeSequence::list({D(3), D(2), D(1)});
  EXPECT_EQ(s(0), D(3));
  EXPECT_EQ(s(2), D(1));
  EXPECT_EQ(s(1000), D(1));
  EXPECT_EQ(s.declared_length_hint(), 3u);
  EXPECT_EQ(s.kind(), SlopeSequence::Kind::explicit_list);
}

TEST(SlopeSequence, IncreasingSlopeRejectedAtIndex) {
  try {
    make_dyadic_plf(SlopeSequence::list({D(1), D(2), D(1)}));
    FAIL() << "expected rejection";
  } catch (const InvalidSlopeSequence& e) {
    EXPECT_EQ(e.index(), 1u);
  }
  try {
    make_dyadic_plf(SlopeSequence::list({D(1), D(1), LogReal::zero()}));
    FAIL() << "expected rejection";
  } catch (const InvalidSlopeSequence& e) {
    EXPECT_EQ(e.index(), 2u);
  }
}

TEST(DyadicOrlicz, IdentityIsIdentity) {
  const auto M = identity_fixture();
  EXPECT_TRUE(M(LogReal::zero()).is_zero());
  EXPECT_NEAR(M(D(0.75)).to_double(), 0.75, 1e-15);
  for (const double t : {1e-9, 0.1, 0.5, 1.0, 3.0, 1234.5}) EXPECT_NEAR(M(D(t)).to_double(), t, 1e-15 * t);
  EXPECT_NEAR(M.inverse(D(0.3)).to_double(), 0.3, 1e-16);
  EXPECT_TRUE(M.inverse(LogReal::zero()).is_zero());
}

TEST(DyadicOrlicz, GeometricClosedForm) {
  const auto M = geometric_fixture();
  for (int n = 0; n <= 40; ++n) {
    const LogReal expected = D(2.0 / 3.0) * LogReal::pow2(-2 * n);
    ASSERT_LT(relative_difference(M.breakpoint(static_cast<std::size_t>(n)), expected), 1e-12) << n;
  }
  EXPECT_LT(relative_difference(M(LogReal::pow2(-2)), D(1.0 / 24.0)), 1e-14);
  EXPECT_LT(relative_difference(M.inverse(D(1.0 / 24.0)), LogReal::pow2(-2)), 1e-14);
  EXPECT_LT(relative_difference(M.inverse(LogReal::one()), D(4.0 / 3.0)), 1e-14);
}

TEST(DyadicOrlicz, NegativeArgumentRejected) {
  EXPECT_THROW(identity_fixture()(D(-1)), DomainError);
  EXPECT_THROW(identity_fixture().inverse(D(-1)), DomainError);
}

TEST(DyadicOrlicz, SegmentIndexing) {
  EXPECT_EQ(DyadicOrliczFunction::segment_of(D(0.75)), 0);
  EXPECT_EQ(DyadicOrliczFunction::segment_of(D(0.5)), 1);
  EXPECT_EQ(DyadicOrliczFunction::segment_of(D(0.3)), 1);
  EXPECT_EQ(DyadicOrliczFunction::segment_of(D(0.25)), 2);
  EXPECT_EQ(DyadicOrliczFunction::segment_of(D(7.0)), 0);
}

TEST(DyadicOrlicz, SquareFixtureInverseMatchesOracle) {
  const auto M = square_fixture();
  EXPECT_LT(relative_difference(M.inverse(LogReal::one() / D(41)), D(0.28291039257401168036)), 1e-13);
}

TEST(DyadicOrlicz, ConcurrentBreakpointReads) {
  const auto M = counterexample_function(gen_sequences(64));
  std::vector<std::thread> pool;
  std::vector<LogReal> results(4 * 64);
  for (int w = 0; w < 4; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t n = 0; n < 64; ++n) results[static_cast<std::size_t>(w) * 64 + n] = M.breakpoint(n);
    });
  }
  for (auto& t : pool) t.join();
  for (std::size_t n = 0; n < 64; ++n) {
    for (int w = 1; w < 4; ++w) ASSERT_EQ(results[n], results[static_cast<std::size_t>(w) * 64 + n]);
  }
}

TEST(RatioInf, IdentityConstantTwo) {
  const auto r = ratio_inf(identity_fixture(), 1, LogReal::pow2(-2));
  EXPECT_EQ(r.infimum, D(2));
  EXPECT_EQ(r.trend, Trend::bounded);
}

TEST(RatioInf, GeometricFour) {
  const auto r = ratio_inf(geometric_fixture(), 1, LogReal::pow2(-2));
  EXPECT_LT(relative_difference(r.infimum, D(4)), 1e-12);
  EXPECT_EQ(r.trend, Trend::bounded);
}

TEST(RatioInf, SquareFixtureIncreasesWithDepth) {
  const auto M = square_fixture();
  LogReal prev;
  for (std::int64_t n0 = 1; n0 <= 40; ++n0) {
    const auto r = ratio_inf(M, 1, LogReal::pow2(-n0), 64);
    EXPECT_EQ(r.trend, Trend::increasing);
    if (n0 > 1) {
      ASSERT_LT(prev, r.infimum) << n0;
    }
    prev = r.infimum;
  }
}

TEST(RatioInf, PreconditionsEnforced) {
  EXPECT_THROW(ratio_inf(identity_fixture(), 0, LogReal::pow2(-2)), DomainError);
  EXPECT_THROW(ratio_inf(identity_fixture(), 1, LogReal::zero()), DomainError);
}

TEST(RatioInf, SampledFallbackIsApproximate) {
  const auto r = ratio_inf_sampled(identity_fixture(), 3.0, LogReal::pow2(-2), 10);
  EXPECT_TRUE(r.approximate);
  EXPECT_LT(relative_difference(r.infimum, D(3)), 1e-12);
}

TEST(ComputeCq, ClosedFormFixtures) {
  const auto id = compute_Cq(identity_fixture(), 1.0, 10, 10);
  EXPECT_LT(relative_difference(id.supremum, LogReal::one()), 1e-12);
  const auto geo = compute_Cq(geometric_fixture(), 2.0, 10, 10);
  EXPECT_LT(relative_difference(geo.supremum, LogReal::one()), 1e-12);
  EXPECT_EQ(geo.trend, Trend::bounded);
}

TEST(ComputeCq, CounterexampleBounded) {
  const auto M = counterexample_function(gen_sequences(64));
  const auto r = compute_Cq(M, 3.0, 30, 30);
  EXPECT_EQ(r.trend, Trend::bounded);
  ASSERT_TRUE(r.slope_bound.has_value());
  EXPECT_LE(r.supremum, *r.slope_bound);
}

TEST(ComputeCq, RangesValidated) {
  EXPECT_THROW(compute_Cq(identity_fixture(), 1.0, 0, 5), DomainError);
  EXPECT_THROW(compute_Cq(identity_fixture(), 0.5, 5, 5), DomainError);
}

class AllFixtures : public ::testing::TestWithParam<int> {
 protected:
  DyadicOrliczFunction make() const {
    switch (GetParam()) {
      case 0: return identity_fixture();
      case 1: return geometric_fixture();
      case 2: return square_fixture();
      default: return counterexample_function(gen_sequences(64));
    }
  }
};

TEST_P(AllFixtures, SandwichBound) {
  const auto M = make();
  for (std::size_t n = 0; n <= 64; ++n) {
    const LogReal b = M.slope(n);
    const LogReal v = M.breakpoint(n);
    const auto k = static_cast<std::int64_t>(n);
    ASSERT_GE(log2_ratio(v, b.ldexp(-k - 1)), -1e-9) << n;
    ASSERT_GE(log2_ratio(b.ldexp(-k), v), -1e-9) << n;
  }
}

TEST_P(AllFixtures, ConvexOnRandomPoints) {
  const auto M = make();
  std::mt19937_64 rng(100 + static_cast<unsigned>(GetParam()));
  std::uniform_real_distribution<double> expo(-12.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    double t1 = std::exp2(expo(rng));
    double t2 = std::exp2(expo(rng));
    if (t1 > t2) std::swap(t1, t2);
    const double lam = unif(rng);
    const LogReal lhs = M(D(lam * t1 + (1 - lam) * t2));
    const LogReal rhs = D(lam) * M(D(t1)) + D(1 - lam) * M(D(t2));
    ASSERT_LE(lhs.to_double(), rhs.to_double() * (1 + 1e-10));
  }
}

TEST_P(AllFixtures, InverseOfEval) {
  const auto M = make();
  std::mt19937_64 rng(200 + static_cast<unsigned>(GetParam()));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const LogReal t = D(unif(rng));
    if (t.is_zero()) continue;
    ASSERT_LT(relative_difference(M.inverse(M(t)), t), 1e-10) << to_string(t);
  }
}

TEST_P(AllFixtures, RatioInfMatchesDenseSampling) {
  const auto M = make();
  for (std::int64_t m = 1; m <= 2; ++m) {
    const LogReal t_max = LogReal::pow2(-2);
    const auto r = ratio_inf(M, m, t_max, 20);
    LogReal dense_min;
    bool first = true;
    // Same range as the scan: t_max down to the deepest scanned breakpoint 2^-21.
    for (int o = 0; o < 20; ++o) {
      for (int s = 0; s < (o == 19 ? 1 : 32); ++s) {
        const LogReal t = t_max * LogReal::from_log2(Sign::positive, -(o + s / 32.0));
        const LogReal v = M(t.ldexp(m)) / M(t);
        dense_min = first ? v : min(dense_min, v);
        first = false;
      }
    }
    ASSERT_NEAR(log2_ratio(r.infimum, dense_min), 0.0, 1e-12) << m;
  }
}

INSTANTIATE_TEST_SUITE_P(Fixtures, AllFixtures, ::testing::Values(0, 1, 2, 3));
