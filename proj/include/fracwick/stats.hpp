#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fracwick {

// Neumaier-compensated running sum. Adding the same values in the same order
// always gives the same bits.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_total(std::span<const double> xs) noexcept;

struct SampleMoments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double stderr_mean = 0.0;
};

SampleMoments moments(std::span<const double> xs);

/// Sample variance with a delta-method standard error
/// sqrt((m4 - s^4) / n).
struct VarianceEstimate {
  double variance = 0.0;
  double stderr_variance = 0.0;
};
VarianceEstimate variance_with_stderr(std::span<const double> xs);

inline constexpr double kZThreshold = 4.0;

// One Monte Carlo comparison of an estimate against an oracle value.
struct MonteCarloReport {
  std::string test_name;
  std::size_t n_paths = 0;
  std::size_t grid_n = 0;
  double estimate = 0.0;
  double oracle = 0.0;
  double standard_error = 0.0;
  double z_score = 0.0;
  bool pass = false;

  static MonteCarloReport from_estimate(std::string name, std::size_t n_paths,
                                        std::size_t grid_n, double estimate,
                                        double oracle, double standard_error);

  // Verdict by a deterministic criterion rather than a z-score (slopes,
  // exact-zero checks). z is reported as NaN.
  static MonteCarloReport from_check(std::string name, std::size_t n_paths,
                                     std::size_t grid_n, double estimate,
                                     double oracle, bool pass);
};

/// Paired comparison: mean of lhs - rhs against 0 with the stderr of the
/// differences. estimate/oracle carry the two means.
MonteCarloReport paired_report(std::string name, std::size_t grid_n,
                               std::span<const double> lhs,
                               std::span<const double> rhs);

/// Mean of samples against a known value.
MonteCarloReport mean_report(std::string name, std::size_t grid_n,
                             std::span<const double> samples, double oracle);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Two-sample energy-distance permutation test on d-dimensional points
// (row-major, `dim` columns). The statistic is the average of the exact 1-D
// energy distances over `directions` evenly spaced unit vectors (d = 1 or 2),
// which lets every permutation be scored in linear time on pre-sorted
// projections.
struct EnergyTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
EnergyTestResult energy_test(std::span<const double> a, std::span<const double> b,
                             std::size_t dim, std::size_t permutations,
                             std::uint64_t seed, std::size_t directions = 32);

/// One-sample Kolmogorov-Smirnov statistic against N(0, sd^2).
double ks_statistic_normal(std::vector<double> xs, double sd);

/// Asymptotic Kolmogorov tail P(sqrt(n) D > lambda).
double kolmogorov_pvalue(double lambda);

double normal_cdf(double x);

}  // namespace fracwick
