#include "fracwick/wick.hpp"

#include <cmath>

#include "fracwick/errors.hpp"
#include "fracwick/fbm.hpp"

namespace fracwick {

double wick_integral_deterministic(const StepFunction& f, const SamplePath& path) {
  if (f.horizon() > path.grid.horizon() * (1.0 + 1e-12)) {
    throw GridMismatch("integrand extends beyond the path horizon");
  }
  const auto lv = f.levels_on(path.grid);
  CompensatedSum s;
  for (std::size_t i = 0; i < lv.size(); ++i) s.add(lv[i] * path.increment(i));
  return s.value();
}

double phi_derivative_cylinder(const CylinderFunctional& F, double t, double s,
                               const SamplePath& path, const PhiContext& ctx) {
  const std::size_t k = path.grid.find_node(t);
  if (k == TimeGrid::npos) throw GridMismatch("t is not a node of the path grid");
  if (s < 0.0 || s > path.grid.horizon()) throw DomainError("s outside [0, T]");
  return F.d1(path.values[k]) * kernel_K(s, t, ctx);
}

std::vector<double> wick_cell_corrections(const TimeGrid& grid,
                                          const PhiContext& ctx) {
  // <1_{[0,t_i]}, 1_{[t_i,t_{i+1}]}> = R(t_i,t_{i+1}) - R(t_i,t_i)
  std::vector<double> c(grid.intervals());
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = phi_rect_integral(0.0, grid[i], grid[i], grid[i + 1], ctx);
  }
  return c;
}

WickIntegralResult wick_integral_cylinder(const CylinderFunctional& F,
                                          const SamplePath& path,
                                          std::span<const double> corrections) {
  if (corrections.size() != path.grid.intervals()) {
    throw GridMismatch("corrections do not match the path grid");
  }
  CompensatedSum raw, corr;
  for (std::size_t i = 0; i < corrections.size(); ++i) {
    const double w = path.values[i];
    raw.add(F.value(w) * path.increment(i));
    corr.add(F.d1(w) * corrections[i]);
  }
  WickIntegralResult r;
  r.raw_riemann = raw.value();
  r.correction_total = corr.value();
  r.value = r.raw_riemann - r.correction_total;
  return r;
}

WickIntegralResult wick_integral_cylinder(const CylinderFunctional& F,
                                          const SamplePath& path,
                                          const PhiContext& ctx) {
  return wick_integral_cylinder(F, path, wick_cell_corrections(path.grid, ctx));
}

double exponential_functional(const StepFunction& f, const SamplePath& path,
                              const PhiContext& ctx) {
  const double norm = phi_norm_sq(f, ctx);
  if (norm > 700.0) {
    throw DomainError("exponential functional with ||f||^2_phi = " +
                      std::to_string(norm) + " > 700 would overflow");
  }
  return std::exp(wick_integral_deterministic(f, path) - 0.5 * norm);
}

IsometryReport isometry_check(const Integrand& F, const Ensemble& ensemble,
                              const PhiContext& ctx, std::string name) {
  if (ensemble.size() < 2) throw DomainError("isometry check needs >= 2 paths");
  const TimeGrid& grid = ensemble.front().grid;
  for (const auto& p : ensemble) {
    if (!(p.grid == grid)) throw GridMismatch("ensemble paths on different grids");
  }
  const std::size_t n = grid.intervals();
  const std::size_t np = ensemble.size();
  const PhiCellWeights w(grid, ctx);

  std::vector<double> lhs(np), rhs(np), norm_part(np), trace_part(np), diag(np);

  if (const auto* f = std::get_if<StepFunction>(&F)) {
    const auto lv = f->levels_on(grid);
    const double exact = w.bilinear(lv, lv);
    for (std::size_t r = 0; r < np; ++r) {
      const double v = wick_integral_deterministic(*f, ensemble[r]);
      lhs[r] = v * v;
      rhs[r] = norm_part[r] = diag[r] = exact;
      trace_part[r] = 0.0;
    }
  } else {
    const auto& cyl = std::get<CylinderFunctional>(F);
    const auto corr = wick_cell_corrections(grid, ctx);
    // cross[i][j] = D_{g_j} W_{t_i} * D_{g_i} W_{t_j}
    std::vector<double> m(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        m[i * n + j] = phi_rect_integral(0.0, grid[i], grid[j], grid[j + 1], ctx);
      }
    }
    std::vector<double> cross(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) cross[i * n + j] = m[i * n + j] * m[j * n + i];
    }
    std::vector<double> diag_kernel(n + 1);
    for (std::size_t k = 0; k <= n; ++k) diag_kernel[k] = kernel_K(grid[k], grid[k], ctx);

    std::vector<double> hv(n), dv(n);
    for (std::size_t r = 0; r < np; ++r) {
      const auto& path = ensemble[r];
      const double v = wick_integral_cylinder(cyl, path, corr).value;
      lhs[r] = v * v;
      for (std::size_t i = 0; i < n; ++i) {
        hv[i] = cyl.value(path.values[i]);
        dv[i] = cyl.d1(path.values[i]);
      }
      norm_part[r] = w.bilinear(hv, hv);
      CompensatedSum tr;
      for (std::size_t i = 0; i < n; ++i) {
        if (dv[i] == 0.0) continue;
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += cross[i * n + j] * dv[j];
        tr.add(dv[i] * row);
      }
      trace_part[r] = tr.value();
      rhs[r] = norm_part[r] + trace_part[r];

      // Trapezoid of D_t F_t = h'(W_t) K(t,t) over the grid.
      CompensatedSum trap;
      for (std::size_t k = 0; k < n; ++k) {
        trap.add(0.5 * grid.spacing(k) *
                 (cyl.d1(path.values[k]) * diag_kernel[k] +
                  cyl.d1(path.values[k + 1]) * diag_kernel[k + 1]));
      }
      diag[r] = trap.value() * trap.value() + norm_part[r];
    }
  }

  IsometryReport out;
  out.report = paired_report(std::move(name), n, lhs, rhs);
  out.lhs = out.report.estimate;
  out.rhs = out.report.oracle;
  const double dn = static_cast<double>(np);
  out.rhs_norm_part = compensated_total(norm_part) / dn;
  out.rhs_trace_part = compensated_total(trace_part) / dn;
  out.rhs_diagonal_form = compensated_total(diag) / dn;
  return out;
}

}  // namespace fracwick
