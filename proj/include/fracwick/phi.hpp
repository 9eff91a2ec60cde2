#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "fracwick/hurst.hpp"
#include "fracwick/time_grid.hpp"

namespace fracwick {

// Piecewise-constant function: f(u) = levels[i] on [t_i, t_{i+1}), zero
// outside [0, T).
class StepFunction {
 public:
  StepFunction(TimeGrid grid, std::vector<double> levels);

  static StepFunction constant(double horizon, double level);
  /// level * 1_{[a,b)} on the grid {0, a, b} (or {0, b} when a = 0).
  static StepFunction indicator(double a, double b, double level = 1.0);
  /// Midpoint projection of fn onto the cells of grid.
  static StepFunction project(const std::function<double(double)>& fn,
                              const TimeGrid& grid);

  const TimeGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& levels() const noexcept { return levels_; }
  double horizon() const noexcept { return grid_.horizon(); }

  double operator()(double u) const noexcept;

  /// Same function on a finer grid (every breakpoint of this grid must be a
  /// node of `finer`; cells beyond this horizon get level 0).
  StepFunction refine(const TimeGrid& finer) const;

  /// Levels sampled on the cells of `grid`, whose nodes must include every
  /// breakpoint of this function inside [0, grid.horizon()].
  std::vector<double> levels_on(const TimeGrid& grid) const;

  StepFunction operator+(const StepFunction& other) const;
  StepFunction operator*(double s) const;

 private:
  TimeGrid grid_;
  std::vector<double> levels_;
};

/// CSV `t_left,t_right,level`.
void write_step_csv(std::ostream& os, const StepFunction& f);
StepFunction read_step_csv(std::istream& is);

/// phi(s,t) = H(2H-1)|s-t|^{2H-2}; DiagonalSingularity when s == t.
double phi(double s, double t, const PhiContext& ctx);

/// Integral of phi over [a,b] x [c,d], by inclusion-exclusion of R_H. The
/// t^{2H} terms cancel, leaving
///   (|b-c|^{2H} + |a-d|^{2H} - |b-d|^{2H} - |a-c|^{2H}) / 2.
double phi_rect_integral(double a, double b, double c, double d,
                         const PhiContext& ctx);

/// K(s,t) = integral_0^t phi(s,v) dv = H (s^{2H-1} - sign(s-t)|s-t|^{2H-1}).
double kernel_K(double s, double t, const PhiContext& ctx);

/// <f,g>_phi, exact for step functions (grids merged first).
double inner_product_pc(const StepFunction& f, const StepFunction& g,
                        const PhiContext& ctx);

double phi_norm_sq(const StepFunction& f, const PhiContext& ctx);

/// (Phi g)(t) = integral phi(t,u) g(u) du.
double phi_operator(const StepFunction& g, double t, const PhiContext& ctx);

// Cell-pair weights w_ij = integral over cell_i x cell_j of phi, for a fixed
// grid. Uniform grids are stored as one Toeplitz row.
class PhiCellWeights {
 public:
  PhiCellWeights(const TimeGrid& grid, const PhiContext& ctx);

  double operator()(std::size_t i, std::size_t j) const noexcept;
  std::size_t cells() const noexcept { return n_; }

  /// sum_ij x_i y_j w_ij
  double bilinear(std::span<const double> x, std::span<const double> y) const;

 private:
  std::size_t n_;
  bool toeplitz_;
  std::vector<double> w_;
};

}  // namespace fracwick
