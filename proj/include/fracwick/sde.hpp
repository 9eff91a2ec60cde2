#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracwick/fbm.hpp"
#include "fracwick/hurst.hpp"
#include "fracwick/stats.hpp"
#include "fracwick/time_grid.hpp"

namespace fracwick {

// dX = b(t, X) dt + sigma dW, X_0 = x0 on [0, T]. The Lipschitz constant L
// and the growth constant C in |b(t,x)| <= C (1 + |x|) are declared by the
// caller and trusted.
struct SdeSpec {
  std::function<double(double, double)> drift;
  double lipschitz = 1.0;
  double growth = 1.0;
  double sigma = 1.0;
  double x0 = 0.0;
  double horizon = 1.0;

  /// Throws DomainError on non-finite sigma/x0 or non-positive constants.
  void validate() const;

  static SdeSpec zero(double x0, double sigma, double horizon);
  /// Fractional Ornstein-Uhlenbeck: b(t, x) = -lambda x.
  static SdeSpec ornstein_uhlenbeck(double lambda, double sigma, double x0,
                                    double horizon);
};

enum class Stepper { Euler, RK4 };
enum class Solver { FlowEuler, FlowRK4, DirectEuler, Picard };
std::string to_string(Solver s);
Solver parse_solver(const std::string& name);

struct SolverResult {
  SamplePath path;    // X
  SamplePath y_path;  // Y = X - sigma W
  std::string method;
  std::size_t steps = 0;
  std::size_t picard_iterations = 0;  // summed over slabs
  double picard_delta = 0.0;          // last sup-node change, worst slab
  std::vector<std::vector<double>> slab_deltas;
};

/// Y' = b(t, Y + sigma W) pathwise; RK4 half-node stages use the linear
/// interpolation of W between nodes. Returns X = Y + sigma W.
SolverResult solve_flow_transform(const SdeSpec& sde, const SamplePath& noise,
                                  Stepper stepper);

/// X_{i+1} = X_i + b(t_i, X_i) dt + sigma dW_i.
SolverResult solve_direct_euler(const SdeSpec& sde, const SamplePath& noise);

/// Trapezoid Picard sweeps on time slabs of length <= 0.5 / L until the sup
/// change over the slab nodes drops below tol. The first slab starts from
/// the constant iterate x0 + initial_offset.
SolverResult solve_picard(const SdeSpec& sde, const SamplePath& noise,
                          double tol, std::size_t max_iter,
                          double initial_offset = 0.0);

SolverResult solve(const SdeSpec& sde, const SamplePath& noise, Solver solver,
                   double picard_tol = 1e-10, std::size_t picard_max_iter = 200);

/// (|x0| + C T + sigma max|W|) e^{C T}: discrete Gronwall bound on max |X|.
double growth_bound(const SdeSpec& sde, const SamplePath& noise);

/// Samples (t, x, y) pairs and counts violations of the declared Lipschitz
/// and growth constants (with 1e-9 relative slack).
struct DriftConstantCheck {
  std::size_t samples = 0;
  std::size_t lipschitz_violations = 0;
  std::size_t growth_violations = 0;
};
DriftConstantCheck check_drift_constants(const SdeSpec& sde, std::size_t samples,
                                         std::uint64_t seed, double x_range = 10.0);

struct MomentCurves {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> variance;
  // Relative change of each variance between the base and doubled
  // projection resolution.
  std::vector<double> refinement_change;
};

/// Mean x0 e^{-lambda t} and variance sigma^2 ||e^{-lambda (t - .)} 1_{[0,t]}||_phi^2
/// at every checkpoint; the kernel is projected onto `cells` midpoint steps
/// and re-evaluated at 2 * cells.
MomentCurves fou_oracle(double lambda, double sigma, double x0,
                        const std::vector<double>& checkpoints,
                        const PhiContext& ctx, std::size_t cells = 2048);

/// Runs `solver` over n_paths noise paths (uniform grid of n cells) and
/// compares the mean and variance of X at each checkpoint with `oracle`.
std::vector<MonteCarloReport> sde_mc_stats(const SdeSpec& sde, std::size_t n_paths,
                                           std::size_t n, Generator gen,
                                           const HurstParameter& h,
                                           std::uint64_t seed, Solver solver,
                                           const MomentCurves& oracle);

void write_solver_csv(std::ostream& os, const SolverResult& r,
                      const SamplePath& noise);

}  // namespace fracwick
