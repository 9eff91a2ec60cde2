#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fracwick/fbm.hpp"
#include "fracwick/phi.hpp"
#include "fracwick/smooth.hpp"
#include "fracwick/stats.hpp"
#include "fracwick/wick.hpp"

namespace fracwick {

// f(s, x) = sum_m s^m g_m(x), with each g_m from the SmoothFunction family.
class SpaceTimeFunction {
 public:
  explicit SpaceTimeFunction(std::vector<SmoothFunction> by_time_power);
  static SpaceTimeFunction spatial(SmoothFunction g) {
    return SpaceTimeFunction({std::move(g)});
  }

  double value(double s, double x) const;
  double dt(double s, double x) const;
  double dx(double s, double x) const;
  double dxx(double s, double x) const;

  /// Worst relative mismatch between symbolic and central-difference
  /// derivatives over a deterministic set of probe points.
  double finite_difference_discrepancy() const;

 private:
  std::vector<SmoothFunction> g_;
};

// eta_t = int_0^t a_s dW_s with a a step function, or a = 1 when unset.
struct ItoCase {
  std::string name;
  SpaceTimeFunction f;
  std::optional<StepFunction> integrand;

  /// Throws DomainError if symbolic derivatives disagree with finite
  /// differences by more than 1e-6 relative.
  ItoCase(std::string name, SpaceTimeFunction f,
          std::optional<StepFunction> integrand = std::nullopt);
};

/// Registry: "x", "x^2", "x^3", "x^4", "sin", "cos", "exp", "t*x^2".
/// Cases with unbounded derivatives fall outside the formula's stated
/// hypotheses and are kept as numerical probes.
ItoCase ito_case(const std::string& name);
std::vector<std::string> ito_case_names();

// X_t = x0 + int A ds + int B dW with A, B step functions.
struct DriftDiffusion {
  double x0 = 0.0;
  StepFunction drift;
  StepFunction diffusion;

  static DriftDiffusion constant(double x0, double a, double b, double horizon);
  /// Node values of X along a path (A, B breakpoints must be path nodes).
  std::vector<double> values(const SamplePath& path) const;
};

// Evaluated per path, after any per-grid setup has been done.
using PathFunctional = std::function<double(const SamplePath&)>;
using ResidualFactory = std::function<PathFunctional(const TimeGrid&)>;

// Discretisation shared by every residual: left-point evaluation, Wick
// corrections from exact phi cell integrals, ds-terms carrying a kernel
// factor integrated exactly over each cell. Residuals are accumulated cell by
// cell as (LHS increment) - (RHS cell terms), which is algebraically the
// same as LHS(T) - LHS(0) - RHS.

/// f(T, eta_T) - f(0,0) - [ds + Wick dW + kernel ds terms].
double ito_residual_path(const ItoCase& c, const SamplePath& path,
                         const PhiContext& ctx);
ResidualFactory ito_residual_factory(ItoCase c, const PhiContext& ctx);

/// X_T Y_T - X_0 Y_0 - sum [X dY + Y dX + (B1 D^phi Y + B2 D^phi X) dt].
double product_rule_residual(const DriftDiffusion& x, const DriftDiffusion& y,
                             const SamplePath& path, const PhiContext& ctx);
ResidualFactory product_rule_factory(DriftDiffusion x, DriftDiffusion y,
                                     const PhiContext& ctx);

// F_t(x) = F0(x) + t G(x) + W_t Hf(x), with F0, G, Hf polynomials of degree
// <= 2 (time-constant G and Hf), composed with X.
struct WentzellCase {
  std::string name;
  DriftDiffusion process;
  SmoothFunction f0;
  SmoothFunction g;
  SmoothFunction h;
  // Closed-form F_T(X_T) when known, as a function of (W_T, X_T).
  std::optional<std::function<double(double, double)>> closed_form;

  WentzellCase(std::string name, DriftDiffusion process, SmoothFunction f0,
               SmoothFunction g, SmoothFunction h);
};

/// "xW": F_t(x) = x W_t, X = W. "deterministic": F = x^2, X_t = 1 + t.
/// "constant": F = 3, X = W.
WentzellCase wentzell_case(const std::string& name, double horizon);
std::vector<std::string> wentzell_case_names();

enum class ConditionStatus { Satisfied, NotSatisfied, NotApplicable };
std::string to_string(ConditionStatus s);

struct ConditionEntry {
  int index;
  std::string description;
  ConditionStatus status;
};

/// Static table of the sixteen regularity conditions for a case. These are
/// documented, never enforced.
std::vector<ConditionEntry> wentzell_conditions(const WentzellCase& c);

double wentzell_residual(const WentzellCase& c, const SamplePath& path,
                         const PhiContext& ctx);
ResidualFactory wentzell_factory(WentzellCase c, const PhiContext& ctx);

/// Shift path int_0^t (Phi g)(s) ds = <1_{[0,t]}, g>_phi at every node.
std::vector<double> girsanov_shift(const StepFunction& g, const TimeGrid& grid,
                                   const PhiContext& ctx);

/// Paired comparison of E[h(W_T + shift_T)] and E[h(W_T) eps(g)] on one
/// ensemble (common random numbers).
MonteCarloReport girsanov_check(const CylinderFunctional& F,
                                const StepFunction& g, const Ensemble& ensemble,
                                const PhiContext& ctx,
                                std::string name = "girsanov");

/// E[f(W_t)] = f(0) + H int_0^t s^{2H-1} E[f''(W_s)] ds, with the right side
/// in closed form. Names: "x", "x^2", "x^3", "x^4", "sin", "cos", "exp".
double expectation_identity_rhs(const std::string& name, double t,
                                const PhiContext& ctx);
MonteCarloReport expectation_identity_check(const std::string& name,
                                            const Ensemble& ensemble, double t,
                                            const PhiContext& ctx);

struct ConvergenceRow {
  std::size_t n = 0;
  double rms_residual = 0.0;
  double mean_residual = 0.0;
  double stderr_mean = 0.0;
  double max_abs_residual = 0.0;
};

struct ConvergenceTable {
  std::string name;
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;  // log rms vs log n; NaN if any rms is zero

  bool strictly_decreasing() const;
};

/// Residuals on nested restrictions of the same fine paths. Every grid size
/// must divide the largest; fine paths come from `gen` on a uniform grid.
ConvergenceTable convergence_study(const std::string& name,
                                   const ResidualFactory& residual,
                                   const std::vector<std::size_t>& grid_sizes,
                                   std::size_t n_paths, double horizon,
                                   const HurstParameter& h,
                                   std::uint64_t master_seed,
                                   Generator gen = Generator::Circulant);

/// Same, on a caller-supplied fine ensemble.
ConvergenceTable convergence_study(const std::string& name,
                                   const ResidualFactory& residual,
                                   const std::vector<std::size_t>& grid_sizes,
                                   const Ensemble& fine);

}  // namespace fracwick
