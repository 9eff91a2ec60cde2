#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fracwick {

// Partition 0 = t_0 < t_1 < ... < t_n = T of a horizon.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> points);

  /// n equal cells on [0, T]; node i is exactly T * i / n.
  static TimeGrid uniform(std::size_t n, double horizon);

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t intervals() const noexcept { return points_.size() - 1; }
  double horizon() const noexcept { return points_.back(); }
  double operator[](std::size_t i) const { return points_[i]; }
  double spacing(std::size_t i) const { return points_[i + 1] - points_[i]; }
  std::span<const double> points() const noexcept { return points_; }

  /// All spacings equal within relative tolerance 1e-12.
  bool is_uniform() const noexcept { return uniform_; }

  /// Index of the node equal to t (within 1e-12 * horizon), or npos.
  std::size_t find_node(double t) const noexcept;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// True when every node of `coarse` is a node of this grid.
  bool refines(const TimeGrid& coarse) const noexcept;

  /// Sorted union of breakpoints, exact duplicates removed.
  static TimeGrid merge(const TimeGrid& a, const TimeGrid& b);

  bool operator==(const TimeGrid& other) const noexcept {
    return points_ == other.points_;
  }

 private:
  std::vector<double> points_;
  bool uniform_ = false;
};

// One trajectory sampled on a grid; values[i] = X(t_i).
struct SamplePath {
  TimeGrid grid;
  std::vector<double> values;
  std::string label;

  SamplePath(TimeGrid g, std::vector<double> v, std::string tag = {});

  double increment(std::size_t i) const { return values[i + 1] - values[i]; }
  double terminal() const { return values.back(); }

  /// Values at the nodes of `coarse`, which must be nodes of this grid.
  SamplePath restrict_to(const TimeGrid& coarse) const;
};

using Ensemble = std::vector<SamplePath>;

}  // namespace fracwick
