#include "fracwick/ito.hpp"

#include <algorithm>
#include <cmath>

#include "fracwick/errors.hpp"
#include "fracwick/parallel.hpp"

namespace fracwick {

// --- SpaceTimeFunction --------------------------------------------------------

SpaceTimeFunction::SpaceTimeFunction(std::vector<SmoothFunction> by_time_power)
    : g_(std::move(by_time_power)) {
  if (g_.empty() || g_.size() > 4) {
    throw UnsupportedCase("time polynomial degree must be in [0, 3]");
  }
}

double SpaceTimeFunction::value(double s, double x) const {
  double acc = 0.0;
  for (std::size_t m = g_.size(); m-- > 0;) acc = acc * s + g_[m](x);
  return acc;
}

double SpaceTimeFunction::dt(double s, double x) const {
  double acc = 0.0;
  for (std::size_t m = g_.size(); m-- > 1;) {
    acc = acc * s + static_cast<double>(m) * g_[m](x);
  }
  return acc;
}

double SpaceTimeFunction::dx(double s, double x) const {
  double acc = 0.0;
  for (std::size_t m = g_.size(); m-- > 0;) acc = acc * s + g_[m].d1(x);
  return acc;
}

double SpaceTimeFunction::dxx(double s, double x) const {
  double acc = 0.0;
  for (std::size_t m = g_.size(); m-- > 0;) acc = acc * s + g_[m].d2(x);
  return acc;
}

double SpaceTimeFunction::finite_difference_discrepancy() const {
  static const double xs[] = {-1.7, -0.9, -0.31, 0.0, 0.23, 0.77, 1.4, 2.1};
  static const double ss[] = {0.0, 0.13, 0.5, 0.91};
  double worst = 0.0;
  auto rel = [](double fd, double exact) {
    return std::abs(fd - exact) / std::max({1.0, std::abs(fd), std::abs(exact)});
  };
  for (double s : ss) {
    for (double x : xs) {
      const double h = 1e-4;
      worst = std::max(worst, rel((value(s, x + h) - value(s, x - h)) / (2 * h), dx(s, x)));
      worst = std::max(worst, rel((dx(s, x + h) - dx(s, x - h)) / (2 * h), dxx(s, x)));
      worst = std::max(worst, rel((value(s + h, x) - value(s - h, x)) / (2 * h), dt(s, x)));
    }
  }
  return worst;
}

ItoCase::ItoCase(std::string n, SpaceTimeFunction fn,
                 std::optional<StepFunction> a)
    : name(std::move(n)), f(std::move(fn)), integrand(std::move(a)) {
  const double bad = f.finite_difference_discrepancy();
  if (bad > 1e-6) {
    throw DomainError("symbolic derivatives of '" + name +
                      "' disagree with finite differences (" +
                      std::to_string(bad) + ")");
  }
}

std::vector<std::string> ito_case_names() {
  return {"x", "x^2", "x^3", "x^4", "sin", "cos", "exp", "t*x^2"};
}

ItoCase ito_case(const std::string& name) {
  using SF = SmoothFunction;
  if (name == "x") return {name, SpaceTimeFunction::spatial(SF::power(1))};
  if (name == "x^2") return {name, SpaceTimeFunction::spatial(SF::power(2))};
  if (name == "x^3") return {name, SpaceTimeFunction::spatial(SF::power(3))};
  if (name == "x^4") return {name, SpaceTimeFunction::spatial(SF::power(4))};
  if (name == "sin") return {name, SpaceTimeFunction::spatial(SF::sin(1.0))};
  if (name == "cos") return {name, SpaceTimeFunction::spatial(SF::cos(1.0))};
  if (name == "exp") return {name, SpaceTimeFunction::spatial(SF::exp(1.0))};
  if (name == "t*x^2") {
    return {name, SpaceTimeFunction({SF::constant(0.0), SF::power(2)})};
  }
  throw UnsupportedCase("unknown Ito case '" + name + "'");
}

// --- shared cell quantities ---------------------------------------------------

namespace {

// S_i = sum_{j<i} b_j w(cell_j, cell_i) = <b 1_{[0,t_i]}, 1_{cell_i}>_phi,
// summed over maximal runs of constant b so a constant b costs one
// rectangle per cell.
std::vector<double> prefix_cell_products(const TimeGrid& grid,
                                         std::span<const double> b,
                                         const PhiContext& ctx) {
  const std::size_t n = grid.intervals();
  struct Run { double lo, hi, level; };
  std::vector<Run> runs;
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    CompensatedSum s;
    for (const auto& r : runs) {
      if (r.level != 0.0) {
        s.add(r.level * phi_rect_integral(r.lo, r.hi, grid[i], grid[i + 1], ctx));
      }
    }
    out[i] = s.value();
    if (!runs.empty() && runs.back().level == b[i]) {
      runs.back().hi = grid[i + 1];
    } else {
      runs.push_back({grid[i], grid[i + 1], b[i]});
    }
  }
  return out;
}

// Exact cell integral of b_s D_s^phi(int_0^s b dW) over cell i:
//   b_i (S_i + b_i w_ii / 2).
std::vector<double> kernel_cells(const TimeGrid& grid, std::span<const double> b,
                                 std::span<const double> prefix,
                                 const PhiContext& ctx) {
  std::vector<double> out(grid.intervals());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double wii = std::pow(grid.spacing(i), ctx.two_h());
    out[i] = b[i] * (prefix[i] + 0.5 * b[i] * wii);
  }
  return out;
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

}  // namespace

// --- Ito ------------------------------------------------------------------------

namespace {

class ItoEvaluator {
 public:
  ItoEvaluator(ItoCase c, const TimeGrid& grid, const PhiContext& ctx)
      : case_(std::move(c)), grid_(grid) {
    a_ = case_.integrand ? case_.integrand->levels_on(grid) : ones(grid.intervals());
    corr_ = prefix_cell_products(grid, a_, ctx);
    kern_ = kernel_cells(grid, a_, corr_, ctx);
  }

  double operator()(const SamplePath& path) const {
    if (!(path.grid == grid_)) throw GridMismatch("path grid differs from setup grid");
    const auto& f = case_.f;
    // With a = 1, eta is the path itself; a_i dW_i is taken as the eta
    // increment so linear f telescopes without rounding.
    std::vector<double> eta(path.values);
    if (case_.integrand) {
      eta[0] = 0.0;
      for (std::size_t i = 0; i < grid_.intervals(); ++i) {
        eta[i + 1] = eta[i] + a_[i] * path.increment(i);
      }
    }
    CompensatedSum residual;
    for (std::size_t i = 0; i < grid_.intervals(); ++i) {
      const double t0 = grid_[i], t1 = grid_[i + 1];
      const double e0 = eta[i], deta = eta[i + 1] - eta[i];
      const double lhs = f.value(t1, eta[i + 1]) - f.value(t0, e0);

      const double fx = f.dx(t0, e0);
      const double fxx = f.dxx(t0, e0);
      const double time_term = f.value(t1, e0) - f.value(t0, e0);
      const double wick_term = fx * deta - a_[i] * fxx * corr_[i];
      const double kernel_term = fxx * kern_[i];
      residual.add(lhs - (time_term + wick_term + kernel_term));
    }
    return residual.value();
  }

 private:
  ItoCase case_;
  TimeGrid grid_;
  std::vector<double> a_, corr_, kern_;
};

}  // namespace

double ito_residual_path(const ItoCase& c, const SamplePath& path,
                         const PhiContext& ctx) {
  return ItoEvaluator(c, path.grid, ctx)(path);
}

ResidualFactory ito_residual_factory(ItoCase c, const PhiContext& ctx) {
  return [c = std::move(c), ctx](const TimeGrid& grid) -> PathFunctional {
    return ItoEvaluator(c, grid, ctx);
  };
}

// --- DriftDiffusion / product rule --------------------------------------------------

DriftDiffusion DriftDiffusion::constant(double x0, double a, double b,
                                        double horizon) {
  return {x0, StepFunction::constant(horizon, a), StepFunction::constant(horizon, b)};
}

std::vector<double> DriftDiffusion::values(const SamplePath& path) const {
  const auto a = drift.levels_on(path.grid);
  const auto b = diffusion.levels_on(path.grid);
  std::vector<double> x(path.values.size());
  x[0] = x0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    x[i + 1] = x[i] + a[i] * path.grid.spacing(i) + b[i] * path.increment(i);
  }
  return x;
}

namespace {

struct ProcessCells {
  std::vector<double> a, b, prefix, kernel;

  ProcessCells(const DriftDiffusion& p, const TimeGrid& grid, const PhiContext& ctx)
      : a(p.drift.levels_on(grid)), b(p.diffusion.levels_on(grid)) {
    prefix = prefix_cell_products(grid, b, ctx);
    // integral over cell i of D_s^phi X_s ds = S_i + b_i w_ii / 2
    kernel.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      kernel[i] = prefix[i] + 0.5 * b[i] * std::pow(grid.spacing(i), ctx.two_h());
    }
  }
};

class ProductEvaluator {
 public:
  ProductEvaluator(DriftDiffusion x, DriftDiffusion y, const TimeGrid& grid,
                   const PhiContext& ctx)
      : x_(std::move(x)), y_(std::move(y)), grid_(grid),
        xc_(x_, grid, ctx), yc_(y_, grid, ctx) {}

  double operator()(const SamplePath& path) const {
    if (!(path.grid == grid_)) throw GridMismatch("path grid differs from setup grid");
    const auto xv = x_.values(path);
    const auto yv = y_.values(path);
    CompensatedSum residual;
    for (std::size_t i = 0; i < grid_.intervals(); ++i) {
      const double dx = xv[i + 1] - xv[i];
      const double dy = yv[i + 1] - yv[i];
      const double lhs = xv[i] * dy + yv[i] * dx + dx * dy;
      // X_i <> dY_i = X_i dY_i - B2_i D_{g_i} X_{t_i}, and symmetrically.
      const double x_dy = xv[i] * dy - yc_.b[i] * xc_.prefix[i];
      const double y_dx = yv[i] * dx - xc_.b[i] * yc_.prefix[i];
      const double cross = xc_.b[i] * yc_.kernel[i] + yc_.b[i] * xc_.kernel[i];
      residual.add(lhs - (x_dy + y_dx + cross));
    }
    return residual.value();
  }

 private:
  DriftDiffusion x_, y_;
  TimeGrid grid_;
  ProcessCells xc_, yc_;
};

}  // namespace

double product_rule_residual(const DriftDiffusion& x, const DriftDiffusion& y,
                             const SamplePath& path, const PhiContext& ctx) {
  return ProductEvaluator(x, y, path.grid, ctx)(path);
}

ResidualFactory product_rule_factory(DriftDiffusion x, DriftDiffusion y,
                                     const PhiContext& ctx) {
  return [x = std::move(x), y = std::move(y), ctx](const TimeGrid& grid) -> PathFunctional {
    return ProductEvaluator(x, y, grid, ctx);
  };
}

// --- Ito-Wentzell ------------------------------------------------------------------

WentzellCase::WentzellCase(std::string n, DriftDiffusion p, SmoothFunction f0_,
                           SmoothFunction g_, SmoothFunction h_)
    : name(std::move(n)), process(std::move(p)), f0(std::move(f0_)),
      g(std::move(g_)), h(std::move(h_)) {
  for (const auto* fn : {&f0, &g, &h}) {
    const int deg = fn->polynomial_degree();
    if (deg < 0 || deg > 2) {
      throw UnsupportedCase("Wentzell case '" + name +
                            "' needs F0, G, H polynomials of degree <= 2");
    }
  }
}

std::vector<std::string> wentzell_case_names() {
  return {"xW", "deterministic", "constant"};
}

WentzellCase wentzell_case(const std::string& name, double horizon) {
  using SF = SmoothFunction;
  if (name == "xW") {
    WentzellCase c(name, DriftDiffusion::constant(0.0, 0.0, 1.0, horizon),
                   SF::constant(0.0), SF::constant(0.0), SF::identity());
    c.closed_form = [](double w, double x) { return x * w; };
    return c;
  }
  if (name == "deterministic") {
    WentzellCase c(name, DriftDiffusion::constant(1.0, 1.0, 0.0, horizon),
                   SF::power(2), SF::constant(0.0), SF::constant(0.0));
    c.closed_form = [](double, double x) { return x * x; };
    return c;
  }
  if (name == "constant") {
    WentzellCase c(name, DriftDiffusion::constant(0.0, 0.0, 1.0, horizon),
                   SF::constant(3.0), SF::constant(0.0), SF::constant(0.0));
    c.closed_form = [](double, double) { return 3.0; };
    return c;
  }
  throw UnsupportedCase("unknown Wentzell case '" + name + "'");
}

std::string to_string(ConditionStatus s) {
  switch (s) {
    case ConditionStatus::Satisfied: return "satisfied";
    case ConditionStatus::NotSatisfied: return "not satisfied";
    case ConditionStatus::NotApplicable: return "not applicable";
  }
  return "?";
}

std::vector<ConditionEntry> wentzell_conditions(const WentzellCase& c) {
  using S = ConditionStatus;
  const int d0 = c.f0.polynomial_degree();
  const int dg = c.g.polynomial_degree();
  const int dh = c.h.polynomial_degree();
  auto zero = [](const SmoothFunction& f) {
    for (double x : {-1.3, 0.0, 0.7, 2.2}) {
      if (f(x) != 0.0) return false;
    }
    return true;
  };
  const bool g_zero = zero(c.g), h_zero = zero(c.h);
  const bool f_zero = zero(c.f0) && g_zero && h_zero;
  auto when = [](bool ok) { return ok ? S::Satisfied : S::NotSatisfied; };
  auto unless_zero = [&](bool is_zero, bool ok) {
    return is_zero ? S::NotApplicable : when(ok);
  };
  // X, A, B are deterministic-coefficient Gaussian processes: all moments
  // and phi-derivatives exist. Polynomials in x are never in L^2(R) unless
  // zero, and sup over x is finite only for constants.
  return {
      {1, "X in L^{1,4}", S::Satisfied},
      {2, "A in L^4", S::Satisfied},
      {3, "B in L^8", S::Satisfied},
      {4, "F in L^{1,4}(L^2(R))", unless_zero(f_zero, false)},
      {5, "F twice continuously differentiable in x", S::Satisfied},
      {6, "G in L^2([0,T]; L^2(R))", unless_zero(g_zero, false)},
      {7, "H in L^{1,4}([0,T]; L^2(R))", unless_zero(h_zero, false)},
      {8, "int E sup_x |F'_s(x)|^4 ds finite", when(std::max({d0, dg, dh}) <= 1)},
      {9, "int E sup_x |F''_s(x)|^4 ds finite", S::Satisfied},
      {10, "int E sup_x |D_s F'_s(x)|^2 ds finite", unless_zero(h_zero, dh <= 1)},
      {11, "int E sup_x |(D_s F_s)'(x)|^4 ds finite", unless_zero(h_zero, dh <= 1)},
      {12, "int E sup_x |G_s(x)|^2 ds finite", unless_zero(g_zero, dg == 0)},
      {13, "int E sup_x |H_s(x)|^4 ds finite", unless_zero(h_zero, dh == 0)},
      {14, "int E sup_x |H'_s(x)|^4 ds finite", unless_zero(h_zero, dh <= 1)},
      {15, "int E sup_x |D_s H_s(x)|^4 ds finite", unless_zero(h_zero, true)},
      {16, "int E |D_s X_s|^4 ds finite", S::Satisfied},
  };
}

namespace {

class WentzellEvaluator {
 public:
  WentzellEvaluator(WentzellCase c, const TimeGrid& grid, const PhiContext& ctx)
      : case_(std::move(c)), grid_(grid), xc_(case_.process, grid, ctx) {
    w_corr_ = prefix_cell_products(grid, ones(grid.intervals()), ctx);
    diag_kernel_.resize(grid.intervals());
    const double p = ctx.two_h();
    for (std::size_t i = 0; i < diag_kernel_.size(); ++i) {
      // int over cell of K(s,s) = H s^{2H-1}
      diag_kernel_[i] = 0.5 * (std::pow(grid[i + 1], p) - std::pow(grid[i], p));
    }
  }

  double field(double t, double w, double x) const {
    return case_.f0(x) + t * case_.g(x) + w * case_.h(x);
  }

  double operator()(const SamplePath& path) const {
    if (!(path.grid == grid_)) throw GridMismatch("path grid differs from setup grid");
    const auto xv = case_.process.values(path);
    const auto& f0 = case_.f0;
    const auto& g = case_.g;
    const auto& h = case_.h;
    CompensatedSum residual;
    for (std::size_t i = 0; i < grid_.intervals(); ++i) {
      const double t = grid_[i], dt = grid_.spacing(i);
      const double w = path.values[i], dw = path.increment(i);
      const double x = xv[i];
      const double a = xc_.a[i], b = xc_.b[i];

      const double lhs = field(grid_[i + 1], path.values[i + 1], xv[i + 1]) - field(t, w, x);

      const double fp = f0.d1(x) + t * g.d1(x) + w * h.d1(x);
      const double fpp = f0.d2(x) + t * g.d2(x) + w * h.d2(x);
      const double hp = h.d1(x);

      const double drift = fp * a * dt;
      // D_{g_i}[F'_{t_i}(X_{t_i})] = F''(X) D X + H'(X) D W
      const double stoch = fp * b * dw - b * (fpp * xc_.prefix[i] + hp * w_corr_[i]);
      const double curvature = fpp * b * xc_.kernel[i];
      const double field_drift = g(x) * dt;
      const double field_noise = h(x) * dw - hp * xc_.prefix[i];
      const double field_derivative = hp * b * diag_kernel_[i];
      const double cross = hp * xc_.kernel[i];

      residual.add(lhs - (drift + stoch + curvature + field_drift + field_noise +
                          field_derivative + cross));
    }
    return residual.value();
  }

 private:
  WentzellCase case_;
  TimeGrid grid_;
  ProcessCells xc_;
  std::vector<double> w_corr_, diag_kernel_;
};

}  // namespace

double wentzell_residual(const WentzellCase& c, const SamplePath& path,
                         const PhiContext& ctx) {
  return WentzellEvaluator(c, path.grid, ctx)(path);
}

ResidualFactory wentzell_factory(WentzellCase c, const PhiContext& ctx) {
  return [c = std::move(c), ctx](const TimeGrid& grid) -> PathFunctional {
    return WentzellEvaluator(c, grid, ctx);
  };
}

// --- Girsanov -------------------------------------------------------------------

std::vector<double> girsanov_shift(const StepFunction& g, const TimeGrid& grid,
                                   const PhiContext& ctx) {
  const auto& gg = g.grid();
  std::vector<double> shift(grid.size(), 0.0);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    CompensatedSum s;
    for (std::size_t j = 0; j < g.levels().size(); ++j) {
      if (g.levels()[j] == 0.0) continue;
      s.add(g.levels()[j] * phi_rect_integral(0.0, grid[k], gg[j], gg[j + 1], ctx));
    }
    shift[k] = s.value();
  }
  return shift;
}

MonteCarloReport girsanov_check(const CylinderFunctional& F,
                                const StepFunction& g, const Ensemble& ensemble,
                                const PhiContext& ctx, std::string name) {
  if (ensemble.size() < 2) throw DomainError("Girsanov check needs >= 2 paths");
  const TimeGrid& grid = ensemble.front().grid;
  const double norm = phi_norm_sq(g, ctx);
  if (norm > 700.0) throw DomainError("||g||^2_phi > 700 would overflow");
  const double shift_T = girsanov_shift(g, TimeGrid({0.0, grid.horizon()}), ctx)[1];
  std::vector<double> lhs(ensemble.size()), rhs(ensemble.size());
  for (std::size_t r = 0; r < ensemble.size(); ++r) {
    const auto& p = ensemble[r];
    if (!(p.grid == grid)) throw GridMismatch("ensemble paths on different grids");
    const double wT = p.terminal();
    const double eps = std::exp(wick_integral_deterministic(g, p) - 0.5 * norm);
    lhs[r] = F.value(wT + shift_T);
    rhs[r] = F.value(wT) * eps;
  }
  return paired_report(std::move(name), grid.intervals(), lhs, rhs);
}

// --- expectation identities ---------------------------------------------------------

double expectation_identity_rhs(const std::string& name, double t,
                                const PhiContext& ctx) {
  if (t < 0.0) throw DomainError("t must be non-negative");
  const double v = std::pow(t, ctx.two_h());  // Var W_t
  // f(0) + H int_0^t s^{2H-1} E f''(W_s) ds, with u = s^{2H}:
  //   H s^{2H-1} ds = du / 2.
  if (name == "x") return 0.0 + 0.0;
  if (name == "x^2") return 0.0 + v;                    // int 2 du/2
  if (name == "x^3") return 0.0 + 0.0;                  // E 6 W_s = 0
  if (name == "x^4") return 0.0 + 3.0 * v * v;          // int 12 u du/2
  if (name == "sin") return 0.0 + 0.0;                  // E sin W_s = 0
  if (name == "cos") return 1.0 + (std::exp(-0.5 * v) - 1.0);  // -int e^{-u/2} du/2
  if (name == "exp") return 1.0 + (std::exp(0.5 * v) - 1.0);   // int e^{u/2} du/2
  throw UnsupportedCase("unknown expectation identity '" + name + "'");
}

MonteCarloReport expectation_identity_check(const std::string& name,
                                            const Ensemble& ensemble, double t,
                                            const PhiContext& ctx) {
  if (ensemble.size() < 2) throw DomainError("identity check needs >= 2 paths");
  const double oracle = expectation_identity_rhs(name, t, ctx);
  const auto f = ito_case(name).f;
  const std::size_t k = ensemble.front().grid.find_node(t);
  if (k == TimeGrid::npos) throw GridMismatch("t is not a grid node");
  std::vector<double> lhs(ensemble.size());
  for (std::size_t r = 0; r < ensemble.size(); ++r) lhs[r] = f.value(t, ensemble[r].values[k]);
  return mean_report("identity_" + name, ensemble.front().grid.intervals(), lhs, oracle);
}

// --- convergence -----------------------------------------------------------------------

bool ConvergenceTable::strictly_decreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].rms_residual < rows[i - 1].rms_residual)) return false;
  }
  return true;
}

ConvergenceTable convergence_study(const std::string& name,
                                   const ResidualFactory& residual,
                                   const std::vector<std::size_t>& grid_sizes,
                                   const Ensemble& fine) {
  if (grid_sizes.size() < 3) throw DomainError("convergence ladder needs >= 3 sizes");
  for (std::size_t i = 1; i < grid_sizes.size(); ++i) {
    if (grid_sizes[i] <= grid_sizes[i - 1]) {
      throw DomainError("grid sizes must be strictly increasing");
    }
  }
  if (fine.size() < 2) throw DomainError("convergence study needs >= 2 paths");
  const TimeGrid& fine_grid = fine.front().grid;

  ConvergenceTable table;
  table.name = name;
  for (std::size_t n : grid_sizes) {
    const TimeGrid coarse = TimeGrid::uniform(n, fine_grid.horizon());
    if (!fine_grid.refines(coarse)) {
      throw GridMismatch("grid size " + std::to_string(n) +
                         " is not nested in the fine grid");
    }
    const PathFunctional eval = residual(coarse);
    const auto res = parallel_map(fine.size(), [&](std::size_t r) {
      return eval(fine[r].restrict_to(coarse));
    });
    ConvergenceRow row;
    row.n = n;
    const auto m = moments(res);
    row.mean_residual = m.mean;
    row.stderr_mean = m.stderr_mean;
    CompensatedSum sq;
    for (double v : res) {
      sq.add(v * v);
      row.max_abs_residual = std::max(row.max_abs_residual, std::abs(v));
    }
    row.rms_residual = std::sqrt(sq.value() / static_cast<double>(res.size()));
    table.rows.push_back(row);
  }
  std::vector<double> xs, ys;
  for (const auto& r : table.rows) {
    xs.push_back(static_cast<double>(r.n));
    ys.push_back(r.rms_residual);
  }
  table.slope = loglog_slope(xs, ys);
  return table;
}

ConvergenceTable convergence_study(const std::string& name,
                                   const ResidualFactory& residual,
                                   const std::vector<std::size_t>& grid_sizes,
                                   std::size_t n_paths, double horizon,
                                   const HurstParameter& h,
                                   std::uint64_t master_seed, Generator gen) {
  if (grid_sizes.empty()) throw DomainError("empty grid ladder");
  const std::size_t n_max = *std::max_element(grid_sizes.begin(), grid_sizes.end());
  const Ensemble fine = generate_ensemble(gen, n_max, horizon, h, master_seed, n_paths);
  return convergence_study(name, residual, grid_sizes, fine);
}

}  // namespace fracwick
