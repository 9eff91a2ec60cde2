#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fracwick/hurst.hpp"
#include "fracwick/rng.hpp"
#include "fracwick/time_grid.hpp"

namespace fracwick {

/// R_H(s,t) = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2. Throws DomainError for
/// negative times.
double covariance(double s, double t, const HurstParameter& h);

/// Autocovariance of unit-spacing fractional Gaussian noise at lag k.
double fgn_autocovariance(std::size_t k, const HurstParameter& h);

// Covariance of (W_{t_1}, ..., W_{t_n}); the origin is excluded because
// W_0 = 0. Construction factors the matrix, adding diagonal jitter
// 1e-12, 1e-11, ..., 1e-8 (times the largest diagonal entry) if plain
// Cholesky fails.
struct CovarianceMatrix {
  TimeGrid grid;
  HurstParameter hurst;
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd lower;  // Cholesky factor of matrix + jitter * I
  double jitter = 0.0;
};

CovarianceMatrix build_covariance_matrix(const TimeGrid& grid,
                                         const HurstParameter& h);

enum class Generator { Cholesky, Circulant, Hosking };

std::string to_string(Generator g);
Generator parse_generator(const std::string& name);

// Samplers precompute everything that does not depend on the seed so an
// ensemble pays the setup once. sample() is const and reentrant.
class CholeskySampler {
 public:
  CholeskySampler(TimeGrid grid, HurstParameter h);
  SamplePath sample(SeedSpec seed) const;
  const CovarianceMatrix& covariance_matrix() const noexcept { return cov_; }

 private:
  CovarianceMatrix cov_;
};

// Davies-Harte circulant embedding of the fGn autocovariance, padded to
// 2 * next_pow2(n). Negative eigenvalues below -1e-9 * max are an
// EmbeddingFailure; smaller ones are clamped to zero.
class CirculantSampler {
 public:
  CirculantSampler(std::size_t n, double horizon, HurstParameter h);
  ~CirculantSampler();
  CirculantSampler(CirculantSampler&&) noexcept;
  CirculantSampler& operator=(CirculantSampler&&) noexcept;

  SamplePath sample(SeedSpec seed) const;
  const TimeGrid& grid() const noexcept { return grid_; }
  std::span<const double> eigenvalues() const noexcept { return eig_; }

 private:
  struct Plan;
  TimeGrid grid_;
  HurstParameter h_;
  std::size_t m_;  // embedding size
  std::vector<double> eig_;
  std::unique_ptr<Plan> plan_;
};

// Sequential exact sampler: Durbin-Levinson prediction coefficients of fGn,
// computed once, then O(n^2) per path.
class HoskingSampler {
 public:
  HoskingSampler(std::size_t n, double horizon, HurstParameter h);
  SamplePath sample(SeedSpec seed) const;
  const TimeGrid& grid() const noexcept { return grid_; }

 private:
  TimeGrid grid_;
  HurstParameter h_;
  std::vector<double> coeffs_;  // row k (k = 1..n-1) holds phi_{k,1..k}
  std::vector<double> sd_;      // innovation standard deviations
};

SamplePath generate_path_cholesky(const TimeGrid& grid, const HurstParameter& h,
                                  SeedSpec seed);
SamplePath generate_path_circulant(std::size_t n, double horizon,
                                   const HurstParameter& h, SeedSpec seed);
SamplePath generate_path_hosking(std::size_t n, double horizon,
                                 const HurstParameter& h, SeedSpec seed);

struct EmpiricalCovariance {
  Eigen::MatrixXd mean;    // entry (i,j) ~ E[W_{t_{i+1}} W_{t_{j+1}}]
  Eigen::MatrixXd standard_error;  // jackknife
};

/// Entrywise sample mean of W_{t_i} W_{t_j}, i,j >= 1, over paths on a
/// common grid. For a sample mean the jackknife standard error reduces to
/// s / sqrt(N), which is what is computed.
EmpiricalCovariance empirical_covariance(const Ensemble& paths);

/// Largest |empirical - R_H| / stderr over all entries, with its location.
struct CovarianceAgreement {
  double max_abs_z = 0.0;
  std::size_t row = 0;
  std::size_t col = 0;
  double empirical = 0.0;
  double exact = 0.0;
  double standard_error = 0.0;
};
CovarianceAgreement compare_covariance(const EmpiricalCovariance& emp,
                                       const TimeGrid& grid,
                                       const HurstParameter& h);

/// Ensemble of n_paths paths, replication r seeded with stream index r.
Ensemble generate_ensemble(Generator gen, std::size_t n, double horizon,
                           const HurstParameter& h, std::uint64_t master_seed,
                           std::size_t n_paths);
Ensemble generate_ensemble(const TimeGrid& grid, const HurstParameter& h,
                           std::uint64_t master_seed, std::size_t n_paths);

/// CSV `t,value`, 17 significant digits.
void write_path_csv(std::ostream& os, const SamplePath& path);
/// Long-format CSV `replication,t,value`.
void write_ensemble_csv(std::ostream& os, const Ensemble& paths);

}  // namespace fracwick
