#include <cmath>
#include <functional>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "phi_quadrature.hpp"

#include "fracwick/errors.hpp"
#include "fracwick/fbm.hpp"
#include "fracwick/phi.hpp"
#include "fracwick/rng.hpp"

using namespace fracwick;
using fracwick::testing::quad_phi;

namespace {


double one(double) { return 1.0; }

}  // namespace

TEST(Phi, KernelValues) {
  const PhiContext ctx(0.75);
  EXPECT_NEAR(phi(0.0, 1.0, ctx), 0.375, 1e-15);
  EXPECT_EQ(phi(0.2, 0.9, ctx), phi(0.9, 0.2, ctx));
  EXPECT_THROW(phi(0.4, 0.4, ctx), DiagonalSingularity);
  EXPECT_NEAR(phi(0.0, 1.0, PhiContext(0.5001)), 0.5001 * 0.0002, 1e-15);
}

TEST(Phi, RectangleValues) {
  const PhiContext ctx(0.75);
  EXPECT_NEAR(phi_rect_integral(0.0, 0.5, 0.0, 1.0, ctx), 0.5, 1e-15);
  EXPECT_NEAR(phi_rect_integral(0.0, 0.5, 0.5, 1.0, ctx), 0.14644660940672624, 1e-15);
  EXPECT_NEAR(phi_rect_integral(0.3, 0.3, 0.0, 1.0, ctx), 0.0, 1e-15);
  EXPECT_THROW(phi_rect_integral(0.5, 0.3, 0.0, 1.0, ctx), DomainError);
}

TEST(Phi, RectangleMatchesQuadrature) {
  UniformStream u(SeedSpec{314, 0});
  for (int k = 0; k < 20; ++k) {
    const double h = 0.55 + 0.4 * u.next();
    double a = 2 * u.next(), b = 2 * u.next(), c = 2 * u.next(), d = 2 * u.next();
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    const PhiContext ctx(h);
    const double exact = phi_rect_integral(a, b, c, d, ctx);
    const double quad = quad_phi(a, b, c, d, h, one, one);
    EXPECT_NEAR(exact, quad, 1e-6) << "H=" << h << " [" << a << "," << b << "]x[" << c
                                   << "," << d << "]";
  }
}

TEST(Phi, KernelKValues) {
  const PhiContext ctx(0.75);
  EXPECT_NEAR(kernel_K(1.0, 1.0, ctx), 0.75, 1e-15);
  EXPECT_EQ(kernel_K(0.7, 0.0, ctx), 0.0);
  EXPECT_NEAR(kernel_K(0.5, 1.0, ctx), 1.0606601717798212, 1e-15);
  // Continuous across s = t.
  EXPECT_NEAR(kernel_K(0.5 + 1e-12, 0.5, ctx), kernel_K(0.5, 0.5, ctx), 1e-5);
}

TEST(Phi, InnerProductExamples) {
  const PhiContext ctx(0.75);
  const auto unit = StepFunction::constant(1.0, 1.0);
  EXPECT_NEAR(inner_product_pc(unit, unit, ctx), 1.0, 1e-15);
  EXPECT_NEAR(inner_product_pc(StepFunction::indicator(0.0, 0.5), StepFunction::indicator(0.5, 1.0),
                               ctx),
              0.14644660940672624, 1e-15);
  EXPECT_EQ(inner_product_pc(StepFunction::indicator(0.1, 0.6, 3.0),
                             StepFunction::constant(1.0, 0.0), ctx),
            0.0);
}

TEST(Phi, NormExamples) {
  for (double h : {0.55, 0.7, 0.95}) {
    EXPECT_NEAR(phi_norm_sq(StepFunction::constant(1.0, 1.0), PhiContext(h)), 1.0, 1e-14);
    EXPECT_NEAR(phi_norm_sq(StepFunction::constant(1.0, 2.0), PhiContext(h)), 4.0, 1e-14);
  }
  EXPECT_NEAR(phi_norm_sq(StepFunction::constant(2.0, 1.0), PhiContext(0.75)),
              2.8284271247461903, 1e-14);
}

TEST(Phi, InnerProductOfIndicatorsIsCovariance) {
  UniformStream u(SeedSpec{99, 0});
  for (int k = 0; k < 100; ++k) {
    const double h = 0.51 + 0.48 * u.next();
    const double s = 0.01 + 3.0 * u.next(), t = 0.01 + 3.0 * u.next();
    const double ip = inner_product_pc(StepFunction::indicator(0.0, s),
                                       StepFunction::indicator(0.0, t), PhiContext(h));
    const double r = covariance(s, t, HurstParameter(h));
    EXPECT_NEAR(ip / r, 1.0, 1e-12) << "H=" << h << " s=" << s << " t=" << t;
  }
}

namespace {

StepFunction random_step(UniformStream& u, std::size_t cells, double horizon) {
  std::vector<double> pts = {0.0};
  for (std::size_t i = 0; i < cells; ++i) pts.push_back(pts.back() + 0.1 + u.next());
  for (double& p : pts) p *= horizon / pts.back();
  pts.back() = horizon;
  std::vector<double> lv;
  for (std::size_t i = 0; i < cells; ++i) lv.push_back(4.0 * u.next() - 2.0);
  return StepFunction(TimeGrid(pts), lv);
}

}  // namespace

TEST(Phi, BilinearSymmetricCauchySchwarz) {
  UniformStream u(SeedSpec{7, 3});
  const PhiContext ctx(0.68);
  for (int k = 0; k < 20; ++k) {
    const auto f = random_step(u, 5, 1.5), g = random_step(u, 7, 1.5), e = random_step(u, 3, 1.5);
    const double fg = inner_product_pc(f, g, ctx);
    EXPECT_NEAR(fg, inner_product_pc(g, f, ctx), 1e-13 * std::abs(fg) + 1e-16);
    const double lhs = inner_product_pc(f * 2.5 + e, g, ctx);
    const double rhs = 2.5 * fg + inner_product_pc(e, g, ctx);
    EXPECT_NEAR(lhs, rhs, 1e-13 * (std::abs(lhs) + 1.0));
    EXPECT_LE(fg * fg, phi_norm_sq(f, ctx) * phi_norm_sq(g, ctx) * (1 + 1e-12));
  }
}

TEST(Phi, RefinementInvariance) {
  UniformStream u(SeedSpec{8, 0});
  const PhiContext ctx(0.8);
  const auto f = random_step(u, 6, 1.0), g = random_step(u, 4, 1.0);
  const auto fine = TimeGrid::merge(TimeGrid::merge(f.grid(), g.grid()), TimeGrid::uniform(50, 1.0));
  const double base = inner_product_pc(f, g, ctx);
  EXPECT_NEAR(inner_product_pc(f.refine(fine), g.refine(fine), ctx), base, 1e-12 * std::abs(base));
}

TEST(Phi, SmoothIntegrandsConvergeToQuadrature) {
  const double h = 0.7;
  const PhiContext ctx(h);
  auto f = [](double x) { return 1.0 + std::sin(3.0 * x); };
  auto g = [](double x) { return x * x; };
  const double oracle = quad_phi(0.0, 1.0, 0.0, 1.0, h, f, g);
  double prev = 1e300;
  for (std::size_t n : {16, 32, 64, 128}) {
    const auto grid = TimeGrid::uniform(n, 1.0);
    const double err = std::abs(
        inner_product_pc(StepFunction::project(f, grid), StepFunction::project(g, grid), ctx) -
        oracle);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-4);
}

// Frozen quadrature values of the two parts of E[I^2] for I = int W dW on
// [0,1]: iint R(u,v) phi(u,v) and iint K(s,t) K(t,s), which add up to 1/2.
TEST(Phi, IsometrySplitConstants) {
  boost::math::quadrature::tanh_sinh<double> ts;
  struct Case { double h, r_phi, kk; };
  for (const Case c : {Case{0.75, 0.334762, 0.165238}, Case{0.6, 0.417889, 0.082111}}) {
    const PhiContext ctx(c.h);
    const HurstParameter hp(c.h);
    double rphi = 0.0;
    // iint R phi over [0,1]^2 = 2 * int_0^1 int_0^u R(u,v) phi(u,v) dv du
    rphi = 2.0 * ts.integrate(
                     [&](double u) {
                       if (u <= 0.0) return 0.0;
                       return ts.integrate(
                           [&](double v, double vc) {
                             const double dist = vc > 0 ? vc : u - v;
                             if (dist <= 0.0) return 0.0;
                             return covariance(u, v, hp) * c.h * (2 * c.h - 1) *
                                    std::pow(dist, 2 * c.h - 2);
                           },
                           0.0, u);
                     },
                     0.0, 1.0);
    const double kk = ts.integrate(
        [&](double s) {
          auto inner = [&](double t) { return kernel_K(s, t, ctx) * kernel_K(t, s, ctx); };
          double v = 0.0;
          if (s > 0.0) v += ts.integrate(inner, 0.0, s);
          if (s < 1.0) v += ts.integrate(inner, s, 1.0);
          return v;
        },
        0.0, 1.0);
    EXPECT_NEAR(rphi, c.r_phi, 1e-6) << c.h;
    EXPECT_NEAR(kk, c.kk, 1e-6) << c.h;
    EXPECT_NEAR(rphi + kk, 0.5, 1e-8) << c.h;
  }
}

TEST(Phi, OperatorExamples) {
  const PhiContext ctx(0.72);
  for (double s : {0.3, 0.9}) {
    for (double t : {0.0, 0.2, 0.3, 0.65, 1.4}) {
      EXPECT_NEAR(phi_operator(StepFunction::indicator(0.0, s), t, ctx), kernel_K(t, s, ctx),
                  1e-14);
    }
  }
  EXPECT_EQ(phi_operator(StepFunction::constant(1.0, 0.0), 0.4, ctx), 0.0);
  UniformStream u(SeedSpec{1, 1});
  const auto f = random_step(u, 4, 1.0), g = random_step(u, 5, 1.0);
  for (double t : {0.05, 0.5, 0.99}) {
    const double sum = phi_operator(f + g, t, ctx);
    EXPECT_NEAR(sum, phi_operator(f, t, ctx) + phi_operator(g, t, ctx),
                1e-14 * std::max(1.0, std::abs(sum)));
  }
}

TEST(StepFunctionTest, EvaluationRefineAndCsv) {
  const StepFunction f(TimeGrid({0.0, 0.25, 1.0}), {2.0, -1.0});
  EXPECT_EQ(f(0.0), 2.0);
  EXPECT_EQ(f(0.25), -1.0);
  EXPECT_EQ(f(1.5), 0.0);
  EXPECT_EQ(f.levels_on(TimeGrid::uniform(4, 1.0)), (std::vector<double>{2.0, -1.0, -1.0, -1.0}));
  EXPECT_THROW(f.levels_on(TimeGrid::uniform(3, 1.0)), GridMismatch);
  EXPECT_THROW(StepFunction(TimeGrid({0.0, 1.0}), {1.0, 2.0}), DomainError);

  std::ostringstream os;
  write_step_csv(os, f);
  EXPECT_EQ(os.str(), "t_left,t_right,level\n0,0.25,2\n0.25,1,-1\n");
  std::istringstream is(os.str());
  const auto back = read_step_csv(is);
  EXPECT_EQ(back.levels(), f.levels());
  EXPECT_TRUE(back.grid() == f.grid());

  const auto p = StepFunction::project([](double x) { return x; }, TimeGrid::uniform(4, 1.0));
  EXPECT_EQ(p.levels(), (std::vector<double>{0.125, 0.375, 0.625, 0.875}));
}

TEST(PhiCellWeightsTest, UniformAndGeneralAgree) {
  const PhiContext ctx(0.66);
  const auto g = TimeGrid::uniform(12, 1.3);
  std::vector<double> pts(g.points().begin(), g.points().end());
  pts[5] += 1e-3;  // breaks uniformity
  const PhiCellWeights wu(g, ctx);
  const PhiCellWeights wn(TimeGrid(pts), ctx);
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t j = 0; j < 12; ++j) {
      EXPECT_NEAR(wu(i, j), phi_rect_integral(g[i], g[i + 1], g[j], g[j + 1], ctx), 1e-13);
      EXPECT_NEAR(wn(i, j), phi_rect_integral(pts[i], pts[i + 1], pts[j], pts[j + 1], ctx), 1e-15);
    }
  }
}
