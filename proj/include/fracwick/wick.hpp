#pragma once

#include <variant>
#include <vector>

#include "fracwick/phi.hpp"
#include "fracwick/smooth.hpp"
#include "fracwick/stats.hpp"
#include "fracwick/time_grid.hpp"

namespace fracwick {

// F_s = h(W_s): a cylinder functional evaluated at the path's current node.
struct CylinderFunctional {
  SmoothFunction h;

  double value(double w) const { return h(w); }
  double d1(double w) const { return h.d1(w); }
  double d2(double w) const { return h.d2(w); }
};

struct WickIntegralResult {
  double value = 0.0;
  double correction_total = 0.0;
  double raw_riemann = 0.0;
};

/// sum_i f(t_i) (W_{t_{i+1}} - W_{t_i}); f's breakpoints must be path nodes.
double wick_integral_deterministic(const StepFunction& f, const SamplePath& path);

/// D_s^phi h(W_t) = h'(W_t) K(s,t). t must be a node of the path grid.
double phi_derivative_cylinder(const CylinderFunctional& F, double t, double s,
                               const SamplePath& path, const PhiContext& ctx);

/// Per-cell Wick corrections R(t_i, t_{i+1}) - t_i^{2H} for a grid. This is
/// <1_{[0,t_i]}, 1_{[t_i,t_{i+1}]}>_phi, i.e. D_{Phi g_i} W_{t_i}.
std::vector<double> wick_cell_corrections(const TimeGrid& grid,
                                          const PhiContext& ctx);

/// Left-point Wick-Riemann sum of h(W_s) dW_s:
///   raw        = sum h(W_i) dW_i
///   correction = sum h'(W_i) (R(t_i,t_{i+1}) - t_i^{2H})
///   value      = raw - correction
WickIntegralResult wick_integral_cylinder(const CylinderFunctional& F,
                                          const SamplePath& path,
                                          const PhiContext& ctx);

/// Same sum with the corrections precomputed for the path's grid.
WickIntegralResult wick_integral_cylinder(const CylinderFunctional& F,
                                          const SamplePath& path,
                                          std::span<const double> corrections);

/// exp(integral f dW - ||f||^2_phi / 2). Rejects ||f||^2_phi > 700.
double exponential_functional(const StepFunction& f, const SamplePath& path,
                              const PhiContext& ctx);

using Integrand = std::variant<StepFunction, CylinderFunctional>;

struct IsometryReport {
  MonteCarloReport report;  // estimate = E[I^2], oracle = RHS mean
  double lhs = 0.0;
  double rhs = 0.0;
  double rhs_norm_part = 0.0;    // E ||1_{[0,T]} F||^2_phi
  double rhs_trace_part = 0.0;   // E sum_ij D_{g_j}F_i D_{g_i}F_j
  double rhs_diagonal_form = 0.0;  // E (int D_t F_t dt)^2 + norm part
};

/// Second-moment identity for the Wick integral, estimated on one ensemble:
///   E[I^2] = E[ ||1_{[0,T]} F||^2_phi + iint D_s F_t D_t F_s ds dt ].
/// Both sides are evaluated per path with the grid's exact phi cell weights,
/// so the discrete identity holds exactly in expectation; the report is a
/// paired comparison.
IsometryReport isometry_check(const Integrand& F, const Ensemble& ensemble,
                              const PhiContext& ctx,
                              std::string name = "isometry");

}  // namespace fracwick
