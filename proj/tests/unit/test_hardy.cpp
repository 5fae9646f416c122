#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "common/corpus.hpp"
#include "hardy_refine/hardy.hpp"
#include "oracle/tanh_sinh.hpp"

using namespace hardy_refine;
using std::numbers::pi;

namespace {

void expect_consistent(const HardyReport& r) {
  EXPECT_DOUBLE_EQ(r.refined_rhs, r.classical_rhs + r.correction_coefficient * r.correction);
  EXPECT_DOUBLE_EQ(r.classical_margin, r.classical_rhs - r.lhs);
  EXPECT_DOUBLE_EQ(r.refined_margin, r.refined_rhs - r.lhs);
  EXPECT_EQ(r.verdict, judge(r.refined_margin, r.err_budget));
  EXPECT_GE(r.err_budget, 0.0);
}

}  // namespace

TEST(Verdict, Rule) {
  EXPECT_EQ(judge(1.0, 0.1), Verdict::holds);
  EXPECT_EQ(judge(0.1, 0.1), Verdict::holds);
  EXPECT_EQ(judge(0.05, 0.1), Verdict::holds_within_error);
  EXPECT_EQ(judge(-0.05, 0.1), Verdict::holds_within_error);
  EXPECT_EQ(judge(-0.1, 0.1), Verdict::holds_within_error);
  EXPECT_EQ(judge(-0.100001, 0.1), Verdict::violated);
  EXPECT_EQ(judge(0.0, 0.0), Verdict::holds);
}

TEST(Classical, InverseOnePlusAtTwo) {
  const HardyReport r = classical_check(make_function("1/(t+1)"), 2.0, QuadConfig{});
  EXPECT_NEAR(r.lhs, pi * pi / 3.0, 1e-6);
  EXPECT_NEAR(r.classical_rhs, 4.0, 1e-9);
  EXPECT_EQ(r.verdict, Verdict::holds);
  expect_consistent(r);
}

TEST(Classical, ExponentialAtTwo) {
  const HardyReport r = classical_check(make_function("@exp"), 2.0, QuadConfig{});
  EXPECT_NEAR(r.lhs, 2.0 * std::log(2.0), 1e-9);
  EXPECT_NEAR(r.classical_rhs, 2.0, 1e-9);
  EXPECT_EQ(r.verdict, Verdict::holds);
}

TEST(Classical, ZeroFunctionGivesZeroReport) {
  const HardyReport r = classical_check(make_function("@zero"), 3.0, QuadConfig{});
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.classical_rhs, 0.0);
  EXPECT_EQ(r.refined_margin, 0.0);
  EXPECT_EQ(r.verdict, Verdict::holds);
}

TEST(Refined, InverseOnePlusAtTwo) {
  const HardyReport r = refined_check(make_function("@inv1p"), 2.0, QuadConfig{});
  EXPECT_NEAR(r.lhs, pi * pi / 3.0, 1e-9);
  EXPECT_NEAR(r.correction, 2.0 - pi * pi / 6.0, 1e-9);
  EXPECT_NEAR(r.refined_rhs, 2.0 + pi * pi / 6.0, 1e-9);
  EXPECT_NEAR(r.refined_margin, 2.0 - pi * pi / 6.0, 1e-9);
  EXPECT_EQ(r.correction_coefficient, -1.0);
  EXPECT_EQ(r.verdict, Verdict::holds);
  EXPECT_TRUE(r.converged);
  expect_consistent(r);
}

TEST(Refined, ZeroFunctionAtThree) {
  const HardyReport r = refined_check(make_function("0"), 3.0, QuadConfig{});
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.correction, 0.0);
  EXPECT_EQ(r.refined_rhs, 0.0);
  EXPECT_EQ(r.verdict, Verdict::holds);
}

TEST(Refined, ExponentialTightensTheBound) {
  const HardyReport r = refined_check(make_function("exp(-t)"), 2.0, QuadConfig{});
  EXPECT_GT(r.refined_margin, 0.0);
  EXPECT_LT(r.refined_rhs, r.classical_rhs);
  EXPECT_EQ(r.verdict, Verdict::holds);
}

TEST(Refined, DominanceAndSandwichOverCorpus) {
  for (const auto& fc : corpus::functions())
    for (double p : {2.0, 2.5, 3.0, 4.0}) {
      const HardyReport r = refined_check(make_function(fc.tag), p, QuadConfig{});
      EXPECT_GE(r.correction, -r.err_budget) << fc.tag << " p=" << p;
      EXPECT_LE(r.refined_rhs, r.classical_rhs + r.err_budget) << fc.tag << " p=" << p;
      EXPECT_GE(r.refined_margin, -r.err_budget) << fc.tag << " p=" << p;
      EXPECT_NE(r.verdict, Verdict::violated) << fc.tag << " p=" << p;
      expect_consistent(r);
    }
}

TEST(Refined, ScaleCovariance) {
  const double c = 3.0;
  for (const auto& fc : corpus::functions())
    for (double p : {2.0, 3.0}) {
      const HardyReport a = refined_check(make_function(fc.tag), p, QuadConfig{});
      const HardyReport b = refined_check(make_function(fc.tag).scaled(c), p, QuadConfig{});
      const double k = std::pow(c, p);
      EXPECT_NEAR(b.lhs, k * a.lhs, 1e-8 * k * a.lhs) << fc.tag;
      EXPECT_NEAR(b.classical_rhs, k * a.classical_rhs, 1e-8 * k * a.classical_rhs) << fc.tag;
      EXPECT_NEAR(b.correction, k * a.correction, 1e-8 * k * a.correction) << fc.tag;
    }
}

TEST(Refined, ParsedAndFamilyFormsAgree) {
  for (const auto& fc : corpus::functions()) {
    const HardyReport a = refined_check(make_function(fc.tag), 2.5, QuadConfig{});
    const HardyReport b = refined_check(make_function(fc.text), 2.5, QuadConfig{});
    EXPECT_NEAR(a.refined_margin, b.refined_margin, a.err_budget + b.err_budget) << fc.tag;
  }
}

TEST(Refined, RejectsPBelowTwo) {
  EXPECT_THROW(refined_check(make_function("@exp"), 1.5, QuadConfig{}), PreconditionError);
  EXPECT_THROW(classical_check(make_function("@exp"), 1.0, QuadConfig{}), PreconditionError);
}

TEST(LemmaWeighted, ZeroFunction) {
  const HardyReport r = lemma_weighted_check(make_function("@zero"), 2.0, QuadConfig{});
  EXPECT_EQ(r.refined_margin, 0.0);
  EXPECT_EQ(r.verdict, Verdict::holds);
}

TEST(LemmaWeighted, TExpMatchesOracleAndHolds) {
  const auto& fc = corpus::functions()[2];
  for (double p : {2.0, 3.0}) {
    const HardyReport r = lemma_weighted_check(make_function(fc.tag), p, QuadConfig{});
    const double lhs = oracle::exp_sinh([&](double x) { return std::pow(fc.average(x), p) / x; });
    const double pow_int = oracle::exp_sinh([&](double t) { return std::pow(fc.f(t), p) / t; });
    EXPECT_NEAR(r.lhs, lhs, 1e-9);
    EXPECT_NEAR(r.classical_rhs, pow_int, 1e-9);
    EXPECT_NE(r.verdict, Verdict::violated) << "p=" << p;
    expect_consistent(r);
  }
}

TEST(LemmaWeighted, IsAnIdentityAtTwo) {
  // at p = 2 the deviation integral equals the difference of the other two exactly
  for (const char* tag : {"@texp", "@trat"}) {
    const HardyReport r = lemma_weighted_check(make_function(tag), 2.0, QuadConfig{});
    EXPECT_NEAR(r.refined_margin, 0.0, r.err_budget + 1e-12) << tag;
  }
}

TEST(DifferenceCounterpart, ZeroFunction) {
  const HardyReport r = difference_counterpart_check(make_function("@zero"), 1.5, QuadConfig{});
  EXPECT_EQ(r.refined_margin, 0.0);
  EXPECT_EQ(r.verdict, Verdict::holds);
}

TEST(DifferenceCounterpart, ReportFieldsAreAssembledAsDocumented) {
  const HardyReport r = difference_counterpart_check(make_function("@inv1p"), 2.0, QuadConfig{});
  EXPECT_NEAR(r.lhs, 4.0, 1e-9);                       // (p/(p-1))^p int f^p
  EXPECT_NEAR(r.classical_rhs, pi * pi / 3.0, 1e-9);  // int H^p
  EXPECT_EQ(r.correction_coefficient, 1.0);
  EXPECT_NEAR(r.correction, 2.0 - pi * pi / 6.0, 1e-9);
  expect_consistent(r);
}

TEST(DifferenceCounterpart, DerivedCoefficientMarginVanishesAtTwo) {
  // With (p/(p-1))^{p-1} the p = 2 case is the quadratic identity, so the margin is zero.
  for (const auto& fc : corpus::functions()) {
    const HardyReport r = difference_counterpart_check(make_function(fc.tag), 2.0, QuadConfig{});
    ASSERT_TRUE(r.derived_margin.has_value());
    EXPECT_NEAR(*r.derived_margin, 0.0, 2.0 * r.err_budget + 1e-12) << fc.tag;
  }
}

TEST(DifferenceCounterpart, CorrectionAtTwoMatchesRefinedCorrection) {
  for (const auto& fc : corpus::functions()) {
    const HardyReport d = difference_counterpart_check(make_function(fc.tag), 2.0, QuadConfig{});
    const HardyReport r = refined_check(make_function(fc.tag), 2.0, QuadConfig{});
    EXPECT_NEAR(d.correction, r.correction, d.err_budget + r.err_budget) << fc.tag;
  }
}

TEST(DifferenceCounterpart, RejectsPAboveTwo) {
  EXPECT_THROW(difference_counterpart_check(make_function("@exp"), 2.5, QuadConfig{}), PreconditionError);
  EXPECT_THROW(difference_counterpart_check(make_function("@exp"), 1.0, QuadConfig{}), PreconditionError);
}
