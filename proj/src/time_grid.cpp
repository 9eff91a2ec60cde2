#include "fracwick/time_grid.hpp"

#include <algorithm>
#include <cmath>

#include "fracwick/errors.hpp"
#include "fracwick/hurst.hpp"

namespace fracwick {

HurstParameter::HurstParameter(double h) : h_(h) {
  if (!(h > 0.0 && h < 1.0)) {
    throw DomainError("Hurst parameter must lie in (0,1), got " +
                      std::to_string(h));
  }
}

PhiContext::PhiContext(HurstParameter h) : h_(h) {
  if (!h.requires_long_memory()) {
    throw LongMemoryRequired("phi-calculus needs H > 1/2, got H = " +
                             std::to_string(h.value()));
  }
}

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw DomainError("time grid needs at least 2 nodes");
  if (points_.front() != 0.0) throw DomainError("time grid must start at 0");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1]) || !std::isfinite(points_[i])) {
      throw DomainError("time grid must be strictly increasing and finite");
    }
  }
  const double h0 = spacing(0);
  uniform_ = std::all_of(points_.begin() + 1, points_.end(),
                         [&, prev = 0.0](double t) mutable {
                           const double d = t - prev;
                           prev = t;
                           return std::abs(d - h0) <= 1e-12 * h0;
                         });
}

TimeGrid TimeGrid::uniform(std::size_t n, double horizon) {
  if (n < 1) throw DomainError("uniform grid needs n >= 1");
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  std::vector<double> p(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    p[i] = horizon * static_cast<double>(i) / static_cast<double>(n);
  }
  p[n] = horizon;
  return TimeGrid(std::move(p));
}

std::size_t TimeGrid::find_node(double t) const noexcept {
  const double tol = 1e-12 * horizon();
  auto it = std::lower_bound(points_.begin(), points_.end(), t - tol);
  if (it != points_.end() && std::abs(*it - t) <= tol) {
    return static_cast<std::size_t>(it - points_.begin());
  }
  return npos;
}

bool TimeGrid::refines(const TimeGrid& coarse) const noexcept {
  return std::all_of(coarse.points_.begin(), coarse.points_.end(),
                     [&](double t) { return find_node(t) != npos; });
}

TimeGrid TimeGrid::merge(const TimeGrid& a, const TimeGrid& b) {
  std::vector<double> p;
  p.reserve(a.size() + b.size());
  std::merge(a.points_.begin(), a.points_.end(), b.points_.begin(),
             b.points_.end(), std::back_inserter(p));
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return TimeGrid(std::move(p));
}

SamplePath::SamplePath(TimeGrid g, std::vector<double> v, std::string tag)
    : grid(std::move(g)), values(std::move(v)), label(std::move(tag)) {
  if (values.size() != grid.size()) {
    throw GridMismatch("path has " + std::to_string(values.size()) +
                       " values for " + std::to_string(grid.size()) +
                       " grid nodes");
  }
}

SamplePath SamplePath::restrict_to(const TimeGrid& coarse) const {
  std::vector<double> v;
  v.reserve(coarse.size());
  for (double t : coarse.points()) {
    const std::size_t k = grid.find_node(t);
    if (k == TimeGrid::npos) {
      throw GridMismatch("coarse node t=" + std::to_string(t) +
                         " is not a node of the path grid");
    }
    v.push_back(values[k]);
  }
  return SamplePath(coarse, std::move(v), label);
}

}  // namespace fracwick
