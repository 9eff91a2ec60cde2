#include <cmath>

#include <gtest/gtest.h>

#include "fracwick/errors.hpp"
#include "fracwick/fbm.hpp"
#include "fracwick/ito.hpp"

using namespace fracwick;

namespace {

constexpr double kH = 0.7;
const std::vector<std::size_t> kLadder = {64, 128, 256, 512};

const Ensemble& fine_paths() {
  static const Ensemble e =
      generate_ensemble(Generator::Circulant, 512, 1.0, HurstParameter(kH), 777, 4000);
  return e;
}

}  // namespace

TEST(ItoCases, RegistryDerivativesAreConsistent) {
  for (const auto& name : ito_case_names()) {
    const auto c = ito_case(name);
    EXPECT_LT(c.f.finite_difference_discrepancy(), 1e-6) << name;
  }
  EXPECT_THROW(ito_case("tan"), UnsupportedCase);
  const auto txx = ito_case("t*x^2").f;
  EXPECT_DOUBLE_EQ(txx.value(0.5, 3.0), 4.5);
  EXPECT_DOUBLE_EQ(txx.dt(0.5, 3.0), 9.0);
  EXPECT_DOUBLE_EQ(txx.dx(0.5, 3.0), 3.0);
  EXPECT_DOUBLE_EQ(txx.dxx(0.5, 3.0), 1.0);
}

TEST(ItoResidual, LinearFunctionIsExactPerPath) {
  const PhiContext ctx(kH);
  const auto& e = fine_paths();
  const auto a = StepFunction(TimeGrid({0.0, 0.25, 0.625, 1.0}), {1.5, -0.5, 2.0});
  const ItoCase with_a("x", SpaceTimeFunction::spatial(SmoothFunction::identity()), a);
  for (std::size_t r = 0; r < 50; ++r) {
    EXPECT_EQ(ito_residual_path(ito_case("x"), e[r], ctx), 0.0);
    EXPECT_EQ(ito_residual_path(with_a, e[r], ctx), 0.0);
  }
}

TEST(ItoResidual, SquareHasZeroMeanAtEveryGridSize) {
  const PhiContext ctx(kH);
  const auto t = convergence_study("x^2", ito_residual_factory(ito_case("x^2"), ctx), kLadder,
                                   fine_paths());
  for (const auto& row : t.rows) {
    EXPECT_LT(std::abs(row.mean_residual), 4.0 * row.stderr_mean) << row.n;
  }
  EXPECT_TRUE(t.strictly_decreasing());
  EXPECT_LE(t.slope, -0.5);
}

TEST(ItoResidual, SquareWithStepIntegrandHasZeroMean) {
  const PhiContext ctx(kH);
  const auto a = StepFunction(TimeGrid({0.0, 0.5, 1.0}), {1.0, -2.0});
  const ItoCase c("x^2", SpaceTimeFunction::spatial(SmoothFunction::power(2)), a);
  const auto t = convergence_study("a x^2", ito_residual_factory(c, ctx), {64, 128, 256},
                                   fine_paths());
  for (const auto& row : t.rows) {
    EXPECT_LT(std::abs(row.mean_residual), 4.0 * row.stderr_mean) << row.n;
  }
}

// Calibrated on this ensemble: the RMS ratio per doubling is about 0.53.
TEST(ItoResidual, CubeConvergesAtFirstOrderRate) {
  const PhiContext ctx(kH);
  const Ensemble sub(fine_paths().begin(), fine_paths().begin() + 1000);
  const auto t = convergence_study("x^3", ito_residual_factory(ito_case("x^3"), ctx), kLadder, sub);
  EXPECT_LT(t.rows.back().rms_residual, 0.05);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    EXPECT_LT(t.rows[i].rms_residual / t.rows[i - 1].rms_residual, 0.6);
  }
}

TEST(ItoResidual, SmoothCasesDecrease) {
  const PhiContext ctx(kH);
  for (const auto& name : {"x^4", "sin", "cos", "exp", "t*x^2"}) {
    const auto t = convergence_study(name, ito_residual_factory(ito_case(name), ctx), kLadder,
                                     fine_paths());
    EXPECT_TRUE(t.strictly_decreasing()) << name;
    EXPECT_LE(t.slope, -0.4) << name;
  }
}

TEST(ItoResidual, RestrictionCoherence) {
  const PhiContext ctx(kH);
  const auto& p = fine_paths()[9];
  const auto coarse = TimeGrid::uniform(128, 1.0);
  const auto restricted = p.restrict_to(coarse);
  const SamplePath direct(coarse, restricted.values);
  EXPECT_EQ(ito_residual_path(ito_case("sin"), restricted, ctx),
            ito_residual_path(ito_case("sin"), direct, ctx));

  const Ensemble few(fine_paths().begin(), fine_paths().begin() + 10);
  const auto t = convergence_study("sin", ito_residual_factory(ito_case("sin"), ctx),
                                   {32, 128, 512}, few);
  double sq = 0.0;
  for (const auto& q : few) {
    const double v = ito_residual_path(ito_case("sin"), q.restrict_to(coarse), ctx);
    sq += v * v;
  }
  EXPECT_DOUBLE_EQ(t.rows[1].rms_residual, std::sqrt(sq / few.size()));
}

TEST(Convergence, ValidatesLadder) {
  const PhiContext ctx(kH);
  const auto f = ito_residual_factory(ito_case("x^2"), ctx);
  EXPECT_THROW(convergence_study("bad", f, {64, 128}, fine_paths()), DomainError);
  EXPECT_THROW(convergence_study("bad", f, {64, 256, 128}, fine_paths()), DomainError);
  EXPECT_THROW(convergence_study("bad", f, {64, 128, 384}, fine_paths()), GridMismatch);
}

TEST(ProductRule, Examples) {
  const PhiContext ctx(kH);
  const auto w = DriftDiffusion::constant(0.0, 0.0, 1.0, 1.0);
  const auto c = DriftDiffusion::constant(2.0, 0.0, 0.0, 1.0);
  const auto t = DriftDiffusion::constant(0.0, 1.0, 0.0, 1.0);
  const auto& e = fine_paths();
  for (std::size_t r = 0; r < 20; ++r) {
    EXPECT_EQ(product_rule_residual(w, c, e[r], ctx), 0.0);
    // X = Y = W reproduces the Ito residual of x^2.
    EXPECT_NEAR(product_rule_residual(w, w, e[r], ctx),
                ito_residual_path(ito_case("x^2"), e[r], ctx), 1e-12);
  }
  const auto ww = convergence_study("W*W", product_rule_factory(w, w, ctx), kLadder, e);
  for (const auto& row : ww.rows) EXPECT_LT(std::abs(row.mean_residual), 4.0 * row.stderr_mean);
  const auto wt = convergence_study("W*t", product_rule_factory(w, t, ctx), kLadder, e);
  EXPECT_TRUE(wt.strictly_decreasing());
  EXPECT_LE(wt.slope, -0.5);
}

TEST(Wentzell, CasesAndValidation) {
  EXPECT_EQ(wentzell_case_names().size(), 3u);
  EXPECT_THROW(wentzell_case("nope", 1.0), UnsupportedCase);
  EXPECT_THROW(WentzellCase("cubic", DriftDiffusion::constant(0, 0, 1, 1.0),
                            SmoothFunction::power(3), SmoothFunction::constant(0),
                            SmoothFunction::constant(0)),
               UnsupportedCase);
  EXPECT_THROW(WentzellCase("exp", DriftDiffusion::constant(0, 0, 1, 1.0),
                            SmoothFunction::exp(1.0), SmoothFunction::constant(0),
                            SmoothFunction::constant(0)),
               UnsupportedCase);
}

TEST(Wentzell, ConstantFieldIsExact) {
  const PhiContext ctx(kH);
  const auto c = wentzell_case("constant", 1.0);
  for (std::size_t r = 0; r < 50; ++r) {
    EXPECT_EQ(wentzell_residual(c, fine_paths()[r], ctx), 0.0);
  }
}

TEST(Wentzell, DeterministicCaseIsFirstOrder) {
  const PhiContext ctx(kH);
  const auto c = wentzell_case("deterministic", 1.0);
  for (std::size_t n : kLadder) {
    // X = 1 + t, F = x^2: only the chain-rule error sum dt^2 = 1/n remains.
    const auto p = fine_paths()[0].restrict_to(TimeGrid::uniform(n, 1.0));
    EXPECT_NEAR(wentzell_residual(c, p, ctx), 1.0 / n, 1e-13);
  }
}

TEST(Wentzell, ProductFieldMeanZeroAndDecreasing) {
  const PhiContext ctx(kH);
  const auto c = wentzell_case("xW", 1.0);
  const auto t = convergence_study("xW", wentzell_factory(c, ctx), kLadder, fine_paths());
  for (const auto& row : t.rows) EXPECT_LT(std::abs(row.mean_residual), 4.0 * row.stderr_mean);
  EXPECT_TRUE(t.strictly_decreasing());
  // X = W and F = x W: the residual is the x^2 Ito residual.
  for (std::size_t r = 0; r < 10; ++r) {
    EXPECT_NEAR(wentzell_residual(c, fine_paths()[r], ctx),
                ito_residual_path(ito_case("x^2"), fine_paths()[r], ctx), 1e-12);
  }
}

TEST(Wentzell, ConditionTable) {
  const auto rows = wentzell_conditions(wentzell_case("xW", 1.0));
  ASSERT_EQ(rows.size(), 16u);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].index, static_cast<int>(i + 1));
  const auto constant = wentzell_conditions(wentzell_case("constant", 1.0));
  EXPECT_EQ(constant[12].status, ConditionStatus::NotApplicable);
  EXPECT_EQ(rows[12].status, ConditionStatus::NotSatisfied);
}

TEST(Girsanov, Examples) {
  const PhiContext ctx(kH);
  const auto e = generate_ensemble(Generator::Circulant, 128, 1.0, HurstParameter(kH), 91, 10000);
  const auto g1 = StepFunction::constant(1.0, 1.0);
  const auto x = girsanov_check(CylinderFunctional{SmoothFunction::identity()}, g1, e, ctx);
  EXPECT_TRUE(x.pass) << x.z_score;
  EXPECT_NEAR(x.estimate, 1.0, 0.05);  // shift_T = T^{2H}
  const auto one = girsanov_check(CylinderFunctional{SmoothFunction::constant(1.0)}, g1, e, ctx);
  EXPECT_EQ(one.estimate, 1.0);
  EXPECT_TRUE(one.pass);
  const auto zero = girsanov_check(CylinderFunctional{SmoothFunction::power(2)},
                                   StepFunction::constant(1.0, 0.0), e, ctx);
  EXPECT_EQ(zero.estimate, zero.oracle);
  const auto again = girsanov_check(CylinderFunctional{SmoothFunction::identity()}, g1, e, ctx);
  EXPECT_EQ(again.z_score, x.z_score);
}

TEST(Girsanov, ShiftPath) {
  const PhiContext ctx(0.75);
  const auto grid = TimeGrid::uniform(4, 1.0);
  const auto shift = girsanov_shift(StepFunction::constant(1.0, 1.0), grid, ctx);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(shift[k], covariance(grid[k], 1.0, HurstParameter(0.75)), 1e-15);
  }
}

TEST(ExpectationIdentity, ClosedForms) {
  const PhiContext ctx(0.75);
  EXPECT_DOUBLE_EQ(expectation_identity_rhs("x^2", 1.0, ctx), 1.0);
  EXPECT_DOUBLE_EQ(expectation_identity_rhs("x^4", 1.0, ctx), 3.0);
  EXPECT_EQ(expectation_identity_rhs("x", 0.7, ctx), 0.0);
  EXPECT_NEAR(expectation_identity_rhs("cos", 0.5, ctx), std::exp(-0.5 * std::pow(0.5, 1.5)), 1e-15);
  EXPECT_NEAR(expectation_identity_rhs("exp", 2.0, ctx), std::exp(0.5 * std::pow(2.0, 1.5)), 1e-14);
  EXPECT_THROW(expectation_identity_rhs("tan", 1.0, ctx), UnsupportedCase);

  const auto e = generate_ensemble(Generator::Circulant, 64, 1.0, HurstParameter(0.75), 3, 10000);
  for (const auto& name : {"x", "x^2", "x^3", "x^4", "sin", "cos", "exp"}) {
    EXPECT_TRUE(expectation_identity_check(name, e, 1.0, ctx).pass) << name;
  }
}
