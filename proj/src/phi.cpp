#include "fracwick/phi.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "fracwick/errors.hpp"
#include "fracwick/format.hpp"
#include "fracwick/stats.hpp"

namespace fracwick {

StepFunction::StepFunction(TimeGrid grid, std::vector<double> levels)
    : grid_(std::move(grid)), levels_(std::move(levels)) {
  if (levels_.size() != grid_.intervals()) {
    throw DomainError("step function needs one level per grid cell");
  }
}

StepFunction StepFunction::constant(double horizon, double level) {
  return StepFunction(TimeGrid({0.0, horizon}), {level});
}

StepFunction StepFunction::indicator(double a, double b, double level) {
  if (!(a >= 0.0 && b > a)) throw DomainError("indicator needs 0 <= a < b");
  if (a == 0.0) return StepFunction(TimeGrid({0.0, b}), {level});
  return StepFunction(TimeGrid({0.0, a, b}), {0.0, level});
}

StepFunction StepFunction::project(const std::function<double(double)>& fn,
                                   const TimeGrid& grid) {
  std::vector<double> lv(grid.intervals());
  for (std::size_t i = 0; i < lv.size(); ++i) {
    lv[i] = fn(0.5 * (grid[i] + grid[i + 1]));
  }
  return StepFunction(grid, std::move(lv));
}

double StepFunction::operator()(double u) const noexcept {
  if (u < 0.0 || u >= grid_.horizon()) return 0.0;
  const auto pts = grid_.points();
  const auto it = std::upper_bound(pts.begin(), pts.end(), u);
  return levels_[static_cast<std::size_t>(it - pts.begin()) - 1];
}

std::vector<double> StepFunction::levels_on(const TimeGrid& grid) const {
  for (double t : grid_.points()) {
    if (t <= grid.horizon() && grid.find_node(t) == TimeGrid::npos) {
      throw GridMismatch("step function breakpoint " + format_double(t) +
                         " is not a node of the target grid");
    }
  }
  std::vector<double> lv(grid.intervals(), 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    const double left = grid[i];
    while (k < levels_.size() && grid_[k + 1] <= left + 1e-12 * grid.horizon()) ++k;
    lv[i] = k < levels_.size() ? levels_[k] : 0.0;
  }
  return lv;
}

StepFunction StepFunction::refine(const TimeGrid& finer) const {
  if (finer.horizon() < grid_.horizon()) {
    throw GridMismatch("refinement grid is shorter than the step function");
  }
  return StepFunction(finer, levels_on(finer));
}

StepFunction StepFunction::operator+(const StepFunction& other) const {
  const TimeGrid common = TimeGrid::merge(grid_, other.grid_);
  auto a = levels_on(common);
  const auto b = other.levels_on(common);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return StepFunction(common, std::move(a));
}

StepFunction StepFunction::operator*(double s) const {
  auto lv = levels_;
  for (double& v : lv) v *= s;
  return StepFunction(grid_, std::move(lv));
}

void write_step_csv(std::ostream& os, const StepFunction& f) {
  os << "t_left,t_right,level\n";
  const auto& g = f.grid();
  for (std::size_t i = 0; i < f.levels().size(); ++i) {
    os << format_double(g[i]) << ',' << format_double(g[i + 1]) << ','
       << format_double(f.levels()[i]) << '\n';
  }
}

StepFunction read_step_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t_left,t_right,level") {
    throw DomainError("step CSV must start with header t_left,t_right,level");
  }
  std::vector<double> pts{0.0};
  std::vector<double> lv;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    row.imbue(std::locale::classic());
    double l, r, v;
    char c1, c2;
    if (!(row >> l >> c1 >> r >> c2 >> v) || c1 != ',' || c2 != ',') {
      throw DomainError("malformed step CSV row: " + line);
    }
    if (l != pts.back()) throw DomainError("step CSV cells must be contiguous from 0");
    pts.push_back(r);
    lv.push_back(v);
  }
  return StepFunction(TimeGrid(std::move(pts)), std::move(lv));
}

double phi(double s, double t, const PhiContext& ctx) {
  if (s == t) throw DiagonalSingularity("phi(s,t) is singular at s == t");
  const double h = ctx.h();
  return h * (2.0 * h - 1.0) * std::pow(std::abs(s - t), 2.0 * h - 2.0);
}

double phi_rect_integral(double a, double b, double c, double d,
                         const PhiContext& ctx) {
  if (!(a >= 0.0 && b >= a && c >= 0.0 && d >= c)) {
    throw DomainError("rectangle needs 0 <= a <= b and 0 <= c <= d");
  }
  const double p = ctx.two_h();
  return 0.5 * (std::pow(std::abs(b - c), p) + std::pow(std::abs(a - d), p) -
                std::pow(std::abs(b - d), p) - std::pow(std::abs(a - c), p));
}

double kernel_K(double s, double t, const PhiContext& ctx) {
  if (s < 0.0 || t < 0.0) throw DomainError("kernel_K needs non-negative times");
  if (t == 0.0) return 0.0;
  const double h = ctx.h();
  const double e = 2.0 * h - 1.0;
  const double sign = s > t ? 1.0 : (s < t ? -1.0 : 0.0);
  return h * (std::pow(s, e) - sign * std::pow(std::abs(s - t), e));
}

PhiCellWeights::PhiCellWeights(const TimeGrid& grid, const PhiContext& ctx)
    : n_(grid.intervals()), toeplitz_(grid.is_uniform()) {
  if (toeplitz_) {
    // w_k = dt^{2H} ((k+1)^{2H} - 2k^{2H} + (k-1)^{2H}) / 2, w_0 = dt^{2H}
    const double dt = grid.horizon() / static_cast<double>(n_);
    const double p = ctx.two_h();
    const double scale = std::pow(dt, p);
    w_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const double kk = static_cast<double>(k);
      w_[k] = k == 0 ? scale
                     : 0.5 * scale *
                           (std::pow(kk + 1.0, p) - 2.0 * std::pow(kk, p) +
                            std::pow(kk - 1.0, p));
    }
  } else {
    w_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = phi_rect_integral(grid[i], grid[i + 1], grid[j],
                                           grid[j + 1], ctx);
        w_[i * n_ + j] = v;
        w_[j * n_ + i] = v;
      }
    }
  }
}

double PhiCellWeights::operator()(std::size_t i, std::size_t j) const noexcept {
  if (toeplitz_) return w_[i > j ? i - j : j - i];
  return w_[i * n_ + j];
}

double PhiCellWeights::bilinear(std::span<const double> x,
                                std::span<const double> y) const {
  if (x.size() != n_ || y.size() != n_) throw GridMismatch("weight size mismatch");
  CompensatedSum total;
  for (std::size_t i = 0; i < n_; ++i) {
    if (x[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < n_; ++j) row += (*this)(i, j) * y[j];
    total.add(x[i] * row);
  }
  return total.value();
}

double inner_product_pc(const StepFunction& f, const StepFunction& g,
                        const PhiContext& ctx) {
  const TimeGrid common = f.grid() == g.grid()
                              ? f.grid()
                              : TimeGrid::merge(f.grid(), g.grid());
  const auto a = f.levels_on(common);
  const auto b = g.levels_on(common);
  return PhiCellWeights(common, ctx).bilinear(a, b);
}

double phi_norm_sq(const StepFunction& f, const PhiContext& ctx) {
  return std::max(inner_product_pc(f, f, ctx), 0.0);
}

double phi_operator(const StepFunction& g, double t, const PhiContext& ctx) {
  if (t < 0.0) throw DomainError("phi_operator needs t >= 0");
  const auto& grid = g.grid();
  CompensatedSum total;
  double k_left = kernel_K(t, grid[0], ctx);
  for (std::size_t i = 0; i < g.levels().size(); ++i) {
    const double k_right = kernel_K(t, grid[i + 1], ctx);
    total.add(g.levels()[i] * (k_right - k_left));
    k_left = k_right;
  }
  return total.value();
}

}  // namespace fracwick
