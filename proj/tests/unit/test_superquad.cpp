#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hardy_refine/scalar_fn.hpp"
#include "hardy_refine/superquad.hpp"

using namespace hardy_refine;

namespace {

const std::vector<double> kCanonical = {0.0, 0.1, 0.5, 1.0, 2.0, 10.0};

std::vector<double> random_grid(std::mt19937_64& rng, double hi) {
  std::uniform_real_distribution<double> u(0.0, hi);
  std::vector<double> g{0.0};
  const int n = 5 + static_cast<int>(rng() % 20);
  for (int i = 0; i < n; ++i) g.push_back(u(rng));
  return g;
}

DiscreteMeasure random_measure(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  const std::size_t n = 1 + rng() % 8;
  std::vector<double> pts(n), w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = u(rng);
    w[i] = 0.1 + u(rng);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return DiscreteMeasure(pts, w);
}

// Independent brute-force check of one anchor: the largest lower bound and smallest upper
// bound on C_a over all other grid points.
std::pair<double, double> brute_bounds(const ScalarFn& f, const std::vector<double>& g, double a) {
  double lo = -INFINITY, hi = INFINITY;
  for (double b : g) {
    if (b == a) continue;
    const double c = (f(b) - f(a) - f(std::fabs(b - a))) / (b - a);
    if (b > a) hi = std::min(hi, c);
    else lo = std::max(lo, c);
  }
  return {lo, hi};
}

}  // namespace

TEST(Superquad, SquareIsConsistentWithSlopeTwoA) {
  const ScalarFn f = power_family(2.0, PowerSign::plus);
  const SuperquadWitness w = check_superquadratic(f, kCanonical);
  EXPECT_TRUE(w.consistent());
  for (const AnchorInterval& iv : w.intervals) {
    EXPECT_LE(iv.low, 2.0 * iv.a + 1e-12);
    EXPECT_GE(iv.high, 2.0 * iv.a - 1e-12);
  }
}

TEST(Superquad, CubeIsConsistent) {
  EXPECT_TRUE(check_superquadratic(power_family(3.0, PowerSign::plus), std::vector<double>{0, 0.5, 1, 2, 4}).consistent());
}

TEST(Superquad, SquareRootIsViolatedWithCertificate) {
  const ScalarFn f = make_function("sqrt(t)");
  const std::vector<double> g = {0.0, 0.25, 1.0, 4.0};
  const SuperquadWitness w = check_superquadratic(f, g);
  ASSERT_FALSE(w.consistent());
  const Violation& v = *w.violation;
  EXPECT_LT(v.b_low, v.a);
  EXPECT_GT(v.b_high, v.a);
  // the two named points really do give incompatible bounds
  const double low = (f(v.b_low) - f(v.a) - f(v.a - v.b_low)) / (v.b_low - v.a);
  const double high = (f(v.b_high) - f(v.a) - f(v.b_high - v.a)) / (v.b_high - v.a);
  EXPECT_GT(low, high + w.tol);
  EXPECT_DOUBLE_EQ(v.excess, low - high);
}

TEST(Superquad, IntervalsMatchBruteForce) {
  std::mt19937_64 rng(99);
  for (double p : {1.3, 2.0, 2.7}) {
    const ScalarFn f = power_family(p, PowerSign::plus);
    const auto g = canonical_grid(random_grid(rng, 20.0));
    const SuperquadWitness w = check_superquadratic(f, g);
    for (const AnchorInterval& iv : w.intervals) {
      const auto [lo, hi] = brute_bounds(f, g, iv.a);
      EXPECT_EQ(iv.low, lo);
      EXPECT_EQ(iv.high, hi);
    }
  }
}

TEST(Superquad, PowerFamiliesOnCanonicalGrid) {
  for (double p : {2.0, 2.5, 3.0, 4.0})
    EXPECT_TRUE(check_superquadratic(power_family(p, PowerSign::plus), kCanonical).consistent()) << "t^" << p;
  for (double p : {1.2, 1.5, 2.0})
    EXPECT_TRUE(check_superquadratic(power_family(p, PowerSign::minus), kCanonical).consistent()) << "-t^" << p;
  for (double p : {1.2, 1.5})
    EXPECT_FALSE(check_superquadratic(power_family(p, PowerSign::plus), kCanonical).consistent()) << "t^" << p;
}

TEST(Superquad, PowerFamiliesOnRandomGridsMatchExpectedShape) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> g = random_grid(rng, 100.0);
    for (double p : {2.0, 2.5, 3.0, 4.0}) {
      const ScalarFn f = power_family(p, PowerSign::plus);
      ASSERT_EQ(f.expected_shape(), ExpectedShape::consistent);
      EXPECT_TRUE(check_superquadratic(f, g).consistent()) << "t^" << p << " trial " << trial;
    }
    for (double p : {1.1, 1.5, 2.0}) {
      const ScalarFn f = power_family(p, PowerSign::minus);
      ASSERT_EQ(f.expected_shape(), ExpectedShape::consistent);
      EXPECT_TRUE(check_superquadratic(f, g).consistent()) << "-t^" << p << " trial " << trial;
    }
    // a grid containing 0.1, 1 and 10 separates t^p for 1 < p < 2
    g.insert(g.end(), {0.1, 1.0, 10.0});
    for (double p : {1.2, 1.5, 1.8}) {
      const ScalarFn f = power_family(p, PowerSign::plus);
      ASSERT_EQ(f.expected_shape(), ExpectedShape::violated);
      EXPECT_FALSE(check_superquadratic(f, g).consistent()) << "t^" << p << " trial " << trial;
    }
  }
}

TEST(Superquad, ConvexityIsReportedAsDiagnostic) {
  EXPECT_TRUE(check_superquadratic(power_family(3.0, PowerSign::plus), kCanonical).convex_on_grid);
  const SuperquadWitness neg = check_superquadratic(power_family(1.5, PowerSign::minus), kCanonical);
  EXPECT_TRUE(neg.consistent());
  EXPECT_FALSE(neg.convex_on_grid);
}

TEST(Superquad, DegenerateAndInvalidGrids) {
  const ScalarFn f = power_family(2.0, PowerSign::plus);
  EXPECT_THROW(check_superquadratic(f, std::vector<double>{1.0, 1.0, 2.0}), DegenerateGrid);
  EXPECT_THROW(check_superquadratic(f, std::vector<double>{-1.0, 1.0, 2.0}), PreconditionError);
  EXPECT_THROW(check_superquadratic(f, std::vector<double>{0.0, NAN, 2.0}), PreconditionError);
}

TEST(Jensen, SquareHasZeroGap) {
  const ScalarFn f = power_family(2.0, PowerSign::plus);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) EXPECT_LE(std::fabs(jensen_gap(f, random_measure(rng)).gap), 1e-12);
}

TEST(Jensen, CubeOnTwoPoints) {
  const JensenGap g = jensen_gap(power_family(3.0, PowerSign::plus), DiscreteMeasure({0.0, 2.0}, {0.5, 0.5}));
  EXPECT_DOUBLE_EQ(g.lhs, 1.0);
  EXPECT_DOUBLE_EQ(g.rhs, 3.0);
  EXPECT_DOUBLE_EQ(g.gap, 2.0);
}

TEST(Jensen, ZeroFunction) {
  const JensenGap g = jensen_gap(make_function("@zero"), DiscreteMeasure({1.0, 5.0}, {0.25, 0.75}));
  EXPECT_EQ(g.lhs, 0.0);
  EXPECT_EQ(g.rhs, 0.0);
  EXPECT_EQ(g.gap, 0.0);
}

TEST(Jensen, GapIsNonnegativeForGridConsistentFunctions) {
  std::mt19937_64 rng(11);
  std::vector<ScalarFn> fs;
  for (double p : {2.0, 2.5, 3.0, 4.0}) fs.push_back(power_family(p, PowerSign::plus));
  for (double p : {1.2, 1.5, 2.0}) fs.push_back(power_family(p, PowerSign::minus));
  for (const ScalarFn& f : fs) {
    ASSERT_TRUE(check_superquadratic(f, kCanonical).consistent());
    for (int i = 0; i < 100; ++i) {
      const DiscreteMeasure m = random_measure(rng);
      const JensenGap g = jensen_gap(f, m);
      EXPECT_GE(g.gap, -1e-10 * std::max(1.0, std::fabs(g.rhs))) << f.name();
    }
  }
}

TEST(Jensen, SinglePointMeasureHasGapMinusF0) {
  // mu = x, so the deviation term is f(0)
  const ScalarFn f = make_function("t^3 + 1");
  const JensenGap g = jensen_gap(f, DiscreteMeasure({2.0}, {1.0}));
  EXPECT_DOUBLE_EQ(g.gap, -1.0);
}

TEST(Jensen, MeasureValidation) {
  EXPECT_THROW(DiscreteMeasure({1.0}, {0.5}), PreconditionError);
  EXPECT_THROW(DiscreteMeasure({1.0, 2.0}, {1.0}), PreconditionError);
  EXPECT_THROW(DiscreteMeasure({-1.0}, {1.0}), PreconditionError);
  EXPECT_THROW(DiscreteMeasure({1.0, 2.0}, {1.5, -0.5}), PreconditionError);
  EXPECT_NO_THROW(DiscreteMeasure({1.0, 2.0, 3.0}, {0.1, 0.2, 0.7}));
}
