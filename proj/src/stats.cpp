#include "fracwick/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "fracwick/errors.hpp"
#include "fracwick/rng.hpp"

namespace fracwick {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_total(std::span<const double> xs) noexcept {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

SampleMoments moments(std::span<const double> xs) {
  SampleMoments m;
  m.n = xs.size();
  if (m.n == 0) return m;
  m.mean = compensated_total(xs) / static_cast<double>(m.n);
  if (m.n < 2) return m;
  CompensatedSum ss;
  for (double x : xs) ss.add((x - m.mean) * (x - m.mean));
  m.variance = ss.value() / static_cast<double>(m.n - 1);
  m.stderr_mean = std::sqrt(m.variance / static_cast<double>(m.n));
  return m;
}

VarianceEstimate variance_with_stderr(std::span<const double> xs) {
  const auto m = moments(xs);
  VarianceEstimate out;
  out.variance = m.variance;
  if (m.n < 2) return out;
  CompensatedSum s4;
  for (double x : xs) {
    const double d = (x - m.mean) * (x - m.mean);
    s4.add(d * d);
  }
  const double m4 = s4.value() / static_cast<double>(m.n);
  const double spread = std::max(m4 - m.variance * m.variance, 0.0);
  out.stderr_variance = std::sqrt(spread / static_cast<double>(m.n));
  return out;
}

MonteCarloReport MonteCarloReport::from_estimate(std::string name,
                                                 std::size_t n_paths,
                                                 std::size_t grid_n,
                                                 double estimate, double oracle,
                                                 double standard_error) {
  MonteCarloReport r;
  r.test_name = std::move(name);
  r.n_paths = n_paths;
  r.grid_n = grid_n;
  r.estimate = estimate;
  r.oracle = oracle;
  r.standard_error = standard_error;
  const double diff = estimate - oracle;
  if (standard_error > 0.0) {
    r.z_score = diff / standard_error;
  } else {
    // Zero spread: agreement only if the difference is exactly zero.
    r.z_score = diff == 0.0 ? 0.0 : std::copysign(
                                        std::numeric_limits<double>::infinity(),
                                        diff);
  }
  r.pass = std::abs(r.z_score) < kZThreshold;
  return r;
}

MonteCarloReport MonteCarloReport::from_check(std::string name,
                                              std::size_t n_paths,
                                              std::size_t grid_n,
                                              double estimate, double oracle,
                                              bool pass) {
  MonteCarloReport r;
  r.test_name = std::move(name);
  r.n_paths = n_paths;
  r.grid_n = grid_n;
  r.estimate = estimate;
  r.oracle = oracle;
  r.standard_error = std::numeric_limits<double>::quiet_NaN();
  r.z_score = std::numeric_limits<double>::quiet_NaN();
  r.pass = pass;
  return r;
}

MonteCarloReport paired_report(std::string name, std::size_t grid_n,
                               std::span<const double> lhs,
                               std::span<const double> rhs) {
  if (lhs.size() != rhs.size() || lhs.size() < 2) {
    throw DomainError("paired report needs two equal samples of size >= 2");
  }
  std::vector<double> diff(lhs.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) diff[i] = lhs[i] - rhs[i];
  const auto md = moments(diff);
  const double n = static_cast<double>(lhs.size());
  auto r = MonteCarloReport::from_estimate(std::move(name), lhs.size(), grid_n,
                                           md.mean, 0.0, md.stderr_mean);
  r.estimate = compensated_total(lhs) / n;
  r.oracle = compensated_total(rhs) / n;
  return r;
}

MonteCarloReport mean_report(std::string name, std::size_t grid_n,
                             std::span<const double> samples, double oracle) {
  if (samples.size() < 2) throw DomainError("mean report needs >= 2 samples");
  const auto m = moments(samples);
  return MonteCarloReport::from_estimate(std::move(name), samples.size(),
                                         grid_n, m.mean, oracle, m.stderr_mean);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("slope fit needs matching series of length >= 2");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

// Sum over pairs |z_i - z_j| restricted to one label, walking z in sorted
// order (order[] gives the sorted positions).
struct ProjectionSums {
  double within_a = 0.0;
  double within_b = 0.0;
};

ProjectionSums label_sums(std::span<const double> sorted_values,
                          std::span<const std::uint32_t> order,
                          std::span<const unsigned char> is_a, std::size_t na,
                          std::size_t nb) {
  ProjectionSums s;
  double ka = 0.0, kb = 0.0;
  const double fa = static_cast<double>(na) - 1.0;
  const double fb = static_cast<double>(nb) - 1.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double z = sorted_values[k];
    if (is_a[order[k]]) {
      s.within_a += z * (2.0 * ka - fa);
      ka += 1.0;
    } else {
      s.within_b += z * (2.0 * kb - fb);
      kb += 1.0;
    }
  }
  return s;
}

}  // namespace

EnergyTestResult energy_test(std::span<const double> a,
                             std::span<const double> b, std::size_t dim,
                             std::size_t permutations, std::uint64_t seed,
                             std::size_t directions) {
  if (dim != 1 && dim != 2) throw DomainError("energy test supports dim 1 or 2");
  if (a.size() % dim || b.size() % dim) throw DomainError("ragged sample");
  const std::size_t na = a.size() / dim, nb = b.size() / dim, n = na + nb;
  if (na < 2 || nb < 2) throw DomainError("energy test needs >= 2 points each");
  if (dim == 1) directions = 1;

  // Per direction: projections sorted, with the original point index.
  std::vector<std::vector<double>> sorted(directions);
  std::vector<std::vector<std::uint32_t>> order(directions);
  std::vector<double> total(directions);
  for (std::size_t d = 0; d < directions; ++d) {
    const double ang = std::numbers::pi * static_cast<double>(d) /
                       static_cast<double>(directions);
    const double c = std::cos(ang), s = std::sin(ang);
    std::vector<double> proj(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = i < na ? &a[i * dim] : &b[(i - na) * dim];
      proj[i] = dim == 1 ? p[0] : c * p[0] + s * p[1];
    }
    auto& ord = order[d];
    ord.resize(n);
    std::iota(ord.begin(), ord.end(), 0u);
    std::stable_sort(ord.begin(), ord.end(),
                     [&](auto i, auto j) { return proj[i] < proj[j]; });
    auto& sv = sorted[d];
    sv.resize(n);
    double all = 0.0;
    const double f = static_cast<double>(n) - 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      sv[k] = proj[ord[k]];
      all += sv[k] * (2.0 * static_cast<double>(k) - f);
    }
    total[d] = all;
  }

  const double dna = static_cast<double>(na), dnb = static_cast<double>(nb);
  auto statistic = [&](std::span<const unsigned char> is_a) {
    double e = 0.0;
    for (std::size_t d = 0; d < directions; ++d) {
      const auto s = label_sums(sorted[d], order[d], is_a, na, nb);
      const double cross = total[d] - s.within_a - s.within_b;
      e += 2.0 * cross / (dna * dnb) - 2.0 * s.within_a / (dna * dna) -
           2.0 * s.within_b / (dnb * dnb);
    }
    return e / static_cast<double>(directions);
  };

  std::vector<unsigned char> labels(n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<long>(na), 1);
  EnergyTestResult out;
  out.statistic = statistic(labels);

  UniformStream u(SeedSpec{seed, 0});
  std::size_t exceed = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(labels[i], labels[u.below(i + 1)]);
    }
    if (statistic(labels) >= out.statistic) ++exceed;
  }
  out.p_value = static_cast<double>(exceed + 1) /
                static_cast<double>(permutations + 1);
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ks_statistic_normal(std::vector<double> xs, double sd) {
  if (xs.empty()) throw DomainError("KS statistic of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i] / sd);
    d = std::max({d, f - static_cast<double>(i) / n,
                  static_cast<double>(i + 1) / n - f});
  }
  return d;
}

double kolmogorov_pvalue(double lambda) {
  if (lambda < 0.2) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace fracwick
