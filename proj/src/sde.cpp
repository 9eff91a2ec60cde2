#include "fracwick/sde.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fracwick/errors.hpp"
#include "fracwick/format.hpp"
#include "fracwick/parallel.hpp"
#include "fracwick/phi.hpp"
#include "fracwick/rng.hpp"

namespace fracwick {

void SdeSpec::validate() const {
  if (!drift) throw DomainError("drift is not set");
  if (!std::isfinite(sigma) || !std::isfinite(x0)) {
    throw DomainError("sigma and x0 must be finite");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("horizon must be positive and finite");
  }
  if (!(lipschitz > 0.0) || !(growth > 0.0) || !std::isfinite(lipschitz) ||
      !std::isfinite(growth)) {
    throw DomainError("declared Lipschitz and growth constants must be positive");
  }
}

SdeSpec SdeSpec::zero(double x0, double sigma, double horizon) {
  return {[](double, double) { return 0.0; }, 1.0, 1.0, sigma, x0, horizon};
}

SdeSpec SdeSpec::ornstein_uhlenbeck(double lambda, double sigma, double x0,
                                    double horizon) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  return {[lambda](double, double x) { return -lambda * x; }, lambda, lambda,
          sigma, x0, horizon};
}

std::string to_string(Solver s) {
  switch (s) {
    case Solver::FlowEuler: return "flow-euler";
    case Solver::FlowRK4: return "flow-rk4";
    case Solver::DirectEuler: return "direct-euler";
    case Solver::Picard: return "picard";
  }
  return "?";
}

Solver parse_solver(const std::string& name) {
  if (name == "flow-euler") return Solver::FlowEuler;
  if (name == "flow-rk4") return Solver::FlowRK4;
  if (name == "direct-euler") return Solver::DirectEuler;
  if (name == "picard") return Solver::Picard;
  throw ConfigError("unknown solver '" + name + "'");
}

namespace {

double eval_drift(const SdeSpec& sde, double t, double x) {
  const double v = sde.drift(t, x);
  if (!std::isfinite(v) || !std::isfinite(x)) {
    throw DriftBlowup("drift is not finite at t=" + format_double(t) +
                          ", x=" + format_double(x),
                      t, x);
  }
  return v;
}

void check_noise(const SdeSpec& sde, const SamplePath& noise) {
  sde.validate();
  if (noise.grid.size() < 2) throw DomainError("noise path needs >= 2 nodes");
  if (std::abs(noise.grid.horizon() - sde.horizon) > 1e-12 * sde.horizon) {
    throw GridMismatch("noise horizon differs from the SDE horizon");
  }
}

// X = Y + sigma W is how X is built, so the flow identity holds to rounding.
SolverResult from_y(const SdeSpec& sde, const SamplePath& noise,
                    std::vector<double> y, std::string method) {
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] + sde.sigma * noise.values[i];
  SolverResult r{SamplePath(noise.grid, std::move(x), "X"),
                 SamplePath(noise.grid, std::move(y), "Y"), std::move(method), 0, 0, 0.0, {}};
  r.steps = noise.grid.intervals();
  return r;
}

}  // namespace

SolverResult solve_flow_transform(const SdeSpec& sde, const SamplePath& noise,
                                  Stepper stepper) {
  check_noise(sde, noise);
  const auto& g = noise.grid;
  const auto& w = noise.values;
  const double s = sde.sigma;
  std::vector<double> y(g.size());
  y[0] = sde.x0 - s * w[0];
  auto f = [&](double t, double yy, double ww) { return eval_drift(sde, t, yy + s * ww); };
  for (std::size_t i = 0; i < g.intervals(); ++i) {
    const double t = g[i], dt = g.spacing(i);
    if (stepper == Stepper::Euler) {
      y[i + 1] = y[i] + dt * f(t, y[i], w[i]);
    } else {
      const double tm = t + 0.5 * dt;
      const double wm = 0.5 * (w[i] + w[i + 1]);
      const double k1 = f(t, y[i], w[i]);
      const double k2 = f(tm, y[i] + 0.5 * dt * k1, wm);
      const double k3 = f(tm, y[i] + 0.5 * dt * k2, wm);
      const double k4 = f(g[i + 1], y[i] + dt * k3, w[i + 1]);
      y[i + 1] = y[i] + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return from_y(sde, noise, std::move(y),
                stepper == Stepper::Euler ? "flow-euler" : "flow-rk4");
}

SolverResult solve_direct_euler(const SdeSpec& sde, const SamplePath& noise) {
  check_noise(sde, noise);
  const auto& g = noise.grid;
  std::vector<double> x(g.size());
  x[0] = sde.x0;
  for (std::size_t i = 0; i < g.intervals(); ++i) {
    x[i + 1] = x[i] + eval_drift(sde, g[i], x[i]) * g.spacing(i) +
               sde.sigma * noise.increment(i);
  }
  std::vector<double> y(g.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] - sde.sigma * noise.values[i];
  SolverResult r{SamplePath(g, std::move(x), "X"), SamplePath(g, std::move(y), "Y"),
                 "direct-euler", 0, 0, 0.0, {}};
  r.steps = g.intervals();
  return r;
}

SolverResult solve_picard(const SdeSpec& sde, const SamplePath& noise, double tol,
                          std::size_t max_iter, double initial_offset) {
  check_noise(sde, noise);
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  if (max_iter == 0) throw DomainError("max_iter must be positive");
  const auto& g = noise.grid;
  const auto& w = noise.values;
  const double s = sde.sigma;
  const double slab_len = 0.5 / sde.lipschitz;

  std::vector<double> y(g.size());
  y[0] = sde.x0 - s * w[0];
  SolverResult result{SamplePath(g, std::vector<double>(g.size()), "X"),
                      SamplePath(g, std::vector<double>(g.size()), "Y"), "picard",
                      0, 0, 0.0, {}};
  std::size_t start = 0;
  while (start < g.intervals()) {
    // Largest end node with slab length <= 0.5 / L, at least one cell.
    std::size_t end = start + 1;
    while (end < g.intervals() && g[end + 1] - g[start] <= slab_len) ++end;

    std::vector<double> iter(end - start + 1,
                             y[start] + (start == 0 ? initial_offset : 0.0));
    iter[0] = y[start];
    std::vector<double> drift(iter.size());
    std::vector<double> deltas;
    double delta = 0.0;
    bool converged = false;
    for (std::size_t k = 0; k < max_iter; ++k) {
      for (std::size_t j = 0; j < iter.size(); ++j) {
        drift[j] = eval_drift(sde, g[start + j], iter[j] + s * w[start + j]);
      }
      delta = 0.0;
      double acc = y[start];
      for (std::size_t j = 1; j < iter.size(); ++j) {
        acc += 0.5 * g.spacing(start + j - 1) * (drift[j - 1] + drift[j]);
        delta = std::max(delta, std::abs(acc - iter[j]));
        iter[j] = acc;
      }
      deltas.push_back(delta);
      ++result.picard_iterations;
      if (delta < tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NonConvergence("Picard iteration did not reach tol within max_iter", delta);
    }
    for (std::size_t j = 1; j < iter.size(); ++j) y[start + j] = iter[j];
    result.picard_delta = std::max(result.picard_delta, delta);
    result.slab_deltas.push_back(std::move(deltas));
    start = end;
  }
  auto built = from_y(sde, noise, std::move(y), "picard");
  result.path = std::move(built.path);
  result.y_path = std::move(built.y_path);
  result.steps = g.intervals();
  return result;
}

SolverResult solve(const SdeSpec& sde, const SamplePath& noise, Solver solver,
                   double picard_tol, std::size_t picard_max_iter) {
  switch (solver) {
    case Solver::FlowEuler: return solve_flow_transform(sde, noise, Stepper::Euler);
    case Solver::FlowRK4: return solve_flow_transform(sde, noise, Stepper::RK4);
    case Solver::DirectEuler: return solve_direct_euler(sde, noise);
    case Solver::Picard: return solve_picard(sde, noise, picard_tol, picard_max_iter);
  }
  throw DomainError("unknown solver");
}

double growth_bound(const SdeSpec& sde, const SamplePath& noise) {
  double wmax = 0.0;
  for (double v : noise.values) wmax = std::max(wmax, std::abs(v));
  const double ct = sde.growth * sde.horizon;
  return (std::abs(sde.x0) + ct + std::abs(sde.sigma) * wmax) * std::exp(ct);
}

DriftConstantCheck check_drift_constants(const SdeSpec& sde, std::size_t samples,
                                         std::uint64_t seed, double x_range) {
  sde.validate();
  UniformStream u(SeedSpec{seed, 0});
  DriftConstantCheck out;
  out.samples = samples;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = u.next() * sde.horizon;
    const double x = (2.0 * u.next() - 1.0) * x_range;
    const double y = (2.0 * u.next() - 1.0) * x_range;
    const double bx = sde.drift(t, x), by = sde.drift(t, y);
    const double slack = 1.0 + 1e-9;
    if (std::abs(bx - by) > sde.lipschitz * std::abs(x - y) * slack + 1e-300) {
      ++out.lipschitz_violations;
    }
    if (std::abs(bx) > sde.growth * (1.0 + std::abs(x)) * slack) ++out.growth_violations;
  }
  return out;
}

MomentCurves fou_oracle(double lambda, double sigma, double x0,
                        const std::vector<double>& checkpoints,
                        const PhiContext& ctx, std::size_t cells) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (cells == 0) throw DomainError("cells must be positive");
  MomentCurves out;
  out.times = checkpoints;
  for (double t : checkpoints) {
    if (t < 0.0) throw DomainError("checkpoints must be non-negative");
    out.mean.push_back(x0 * std::exp(-lambda * t));
    if (t == 0.0) {
      out.variance.push_back(0.0);
      out.refinement_change.push_back(0.0);
      continue;
    }
    auto kernel = [lambda, t](double s) { return std::exp(-lambda * (t - s)); };
    const double base =
        phi_norm_sq(StepFunction::project(kernel, TimeGrid::uniform(cells, t)), ctx);
    const double fine =
        phi_norm_sq(StepFunction::project(kernel, TimeGrid::uniform(2 * cells, t)), ctx);
    out.variance.push_back(sigma * sigma * base);
    out.refinement_change.push_back(std::abs(fine - base) / std::abs(fine));
  }
  return out;
}

std::vector<MonteCarloReport> sde_mc_stats(const SdeSpec& sde, std::size_t n_paths,
                                           std::size_t n, Generator gen,
                                           const HurstParameter& h,
                                           std::uint64_t seed, Solver solver,
                                           const MomentCurves& oracle) {
  if (n_paths < 2) throw DomainError("need >= 2 paths");
  const TimeGrid grid = TimeGrid::uniform(n, sde.horizon);
  std::vector<std::size_t> nodes;
  for (double t : oracle.times) {
    const std::size_t k = grid.find_node(t);
    if (k == TimeGrid::npos) throw GridMismatch("checkpoint is not a grid node");
    nodes.push_back(k);
  }
  const Ensemble noise = generate_ensemble(gen, n, sde.horizon, h, seed, n_paths);
  const auto finals = parallel_map(n_paths, [&](std::size_t r) {
    const auto res = solve(sde, noise[r], solver);
    std::vector<double> at(nodes.size());
    for (std::size_t c = 0; c < nodes.size(); ++c) at[c] = res.path.values[nodes[c]];
    return at;
  });

  std::vector<MonteCarloReport> reports;
  const std::string tag = to_string(solver);
  for (std::size_t c = 0; c < nodes.size(); ++c) {
    std::vector<double> xs(n_paths);
    for (std::size_t r = 0; r < n_paths; ++r) xs[r] = finals[r][c];
    const std::string t = format_double(oracle.times[c]);
    reports.push_back(mean_report(tag + "_mean_t" + t, n, xs, oracle.mean[c]));
    const auto v = variance_with_stderr(xs);
    reports.push_back(MonteCarloReport::from_estimate(tag + "_var_t" + t, n_paths, n,
                                                      v.variance, oracle.variance[c],
                                                      v.stderr_variance));
  }
  return reports;
}

void write_solver_csv(std::ostream& os, const SolverResult& r,
                      const SamplePath& noise) {
  os << "t,X,Y,W\n";
  const auto& g = r.path.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << format_double(g[i]) << ',' << format_double(r.path.values[i]) << ','
       << format_double(r.y_path.values[i]) << ',' << format_double(noise.values[i])
       << '\n';
  }
}

}  // namespace fracwick
