#include "fracwick/fbm.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <mutex>
#include <ostream>

#include "fracwick/errors.hpp"
#include "fracwick/format.hpp"
#include "fracwick/parallel.hpp"
#include "fracwick/stats.hpp"

namespace fracwick {

double covariance(double s, double t, const HurstParameter& h) {
  if (s < 0.0 || t < 0.0) {
    throw DomainError("covariance needs non-negative times");
  }
  const double a = h.two_h();
  return 0.5 * (std::pow(t, a) + std::pow(s, a) - std::pow(std::abs(t - s), a));
}

double fgn_autocovariance(std::size_t k, const HurstParameter& h) {
  const double a = h.two_h();
  const double kk = static_cast<double>(k);
  if (k == 0) return 1.0;
  return 0.5 * (std::pow(kk + 1.0, a) - 2.0 * std::pow(kk, a) +
                std::pow(kk - 1.0, a));
}

CovarianceMatrix build_covariance_matrix(const TimeGrid& grid,
                                         const HurstParameter& h) {
  const std::size_t n = grid.intervals();
  Eigen::MatrixXd c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = covariance(grid[i + 1], grid[j + 1], h);
      c(i, j) = v;
      c(j, i) = v;
    }
  }

  const double max_diag = c.diagonal().maxCoeff();
  double jitter = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  for (double scale = 1e-12; llt.info() != Eigen::Success; scale *= 10.0) {
    if (scale > 1.5e-8) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
      const double smallest = es.eigenvalues().minCoeff();
      throw SingularCovariance(
          "covariance matrix not positive definite after jitter up to 1e-8; "
          "smallest eigenvalue " + format_double(smallest),
          smallest);
    }
    jitter = scale * max_diag;
    llt.compute(c + jitter * Eigen::MatrixXd::Identity(n, n));
  }
  return CovarianceMatrix{grid, h, std::move(c), llt.matrixL(), jitter};
}

std::string to_string(Generator g) {
  switch (g) {
    case Generator::Cholesky: return "cholesky";
    case Generator::Circulant: return "circulant";
    case Generator::Hosking: return "hosking";
  }
  return "unknown";
}

Generator parse_generator(const std::string& name) {
  if (name == "cholesky") return Generator::Cholesky;
  if (name == "circulant") return Generator::Circulant;
  if (name == "hosking") return Generator::Hosking;
  throw DomainError("unknown generator '" + name + "'");
}

// --- Cholesky ---------------------------------------------------------------

CholeskySampler::CholeskySampler(TimeGrid grid, HurstParameter h)
    : cov_(build_covariance_matrix(grid, h)) {}

SamplePath CholeskySampler::sample(SeedSpec seed) const {
  const auto n = static_cast<Eigen::Index>(cov_.grid.intervals());
  GaussianStream rng(seed);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.next();
  const Eigen::VectorXd w = cov_.lower.triangularView<Eigen::Lower>() * z;
  std::vector<double> values(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) values[static_cast<std::size_t>(i) + 1] = w(i);
  return SamplePath(cov_.grid, std::move(values), "cholesky");
}

// --- Circulant embedding ----------------------------------------------------

namespace {
// FFTW's planner is not thread-safe; execution with new-array calls is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer fftw_buffer(std::size_t m) {
  auto* p = fftw_alloc_complex(m);
  if (!p) throw std::bad_alloc();
  return FftwBuffer(p);
}
}  // namespace

struct CirculantSampler::Plan {
  fftw_plan plan = nullptr;
  ~Plan() {
    std::lock_guard lock(fftw_planner_mutex());
    if (plan) fftw_destroy_plan(plan);
  }
};

CirculantSampler::CirculantSampler(std::size_t n, double horizon,
                                   HurstParameter h)
    : grid_(TimeGrid::uniform(n, horizon)), h_(h) {
  const std::size_t half = std::bit_ceil(n);
  m_ = 2 * half;

  auto in = fftw_buffer(m_);
  auto out = fftw_buffer(m_);
  plan_ = std::make_unique<Plan>();
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan_->plan = fftw_plan_dft_1d(static_cast<int>(m_), in.get(), out.get(),
                                   FFTW_FORWARD, FFTW_ESTIMATE);
  }

  // First row of the circulant: gamma(0..half), then gamma(half-1..1).
  for (std::size_t k = 0; k < m_; ++k) {
    const std::size_t lag = k <= half ? k : m_ - k;
    in[k][0] = fgn_autocovariance(lag, h_);
    in[k][1] = 0.0;
  }
  fftw_execute_dft(plan_->plan, in.get(), out.get());

  eig_.resize(m_);
  double max_eig = 0.0;
  for (std::size_t k = 0; k < m_; ++k) max_eig = std::max(max_eig, out[k][0]);
  for (std::size_t k = 0; k < m_; ++k) {
    const double lam = out[k][0];
    if (lam < -1e-9 * max_eig) {
      throw EmbeddingFailure("circulant embedding has eigenvalue " +
                                 format_double(lam) + " (max " +
                                 format_double(max_eig) + ")",
                             lam);
    }
    eig_[k] = std::max(lam, 0.0);
  }
}

CirculantSampler::~CirculantSampler() = default;
CirculantSampler::CirculantSampler(CirculantSampler&&) noexcept = default;
CirculantSampler& CirculantSampler::operator=(CirculantSampler&&) noexcept = default;

SamplePath CirculantSampler::sample(SeedSpec seed) const {
  GaussianStream rng(seed);
  auto in = fftw_buffer(m_);
  auto out = fftw_buffer(m_);
  const double norm = 1.0 / static_cast<double>(m_);
  for (std::size_t k = 0; k < m_; ++k) {
    const double s = std::sqrt(eig_[k] * norm);
    in[k][0] = s * rng.next();
    in[k][1] = s * rng.next();
  }
  fftw_execute_dft(plan_->plan, in.get(), out.get());

  // Real part of the transform is fGn with unit spacing; scale to dt^H.
  const std::size_t n = grid_.intervals();
  const double scale = std::pow(grid_.horizon() / static_cast<double>(n), h_.value());
  std::vector<double> values(n + 1, 0.0);
  double level = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    level += scale * out[i][0];
    values[i + 1] = level;
  }
  return SamplePath(grid_, std::move(values), "circulant");
}

// --- Hosking ----------------------------------------------------------------

HoskingSampler::HoskingSampler(std::size_t n, double horizon, HurstParameter h)
    : grid_(TimeGrid::uniform(n, horizon)), h_(h) {
  std::vector<double> gamma(n);
  for (std::size_t k = 0; k < n; ++k) gamma[k] = fgn_autocovariance(k, h_);

  coeffs_.assign(n * (n - 1) / 2, 0.0);
  sd_.assign(n, 0.0);
  double v = gamma[0];
  sd_[0] = std::sqrt(v);
  std::vector<double> prev, cur;
  for (std::size_t k = 1; k < n; ++k) {
    double acc = gamma[k];
    for (std::size_t j = 1; j < k; ++j) acc -= prev[j - 1] * gamma[k - j];
    const double reflection = acc / v;
    cur.assign(k, 0.0);
    for (std::size_t j = 1; j < k; ++j) {
      cur[j - 1] = prev[j - 1] - reflection * prev[k - j - 1];
    }
    cur[k - 1] = reflection;
    v *= (1.0 - reflection * reflection);
    sd_[k] = std::sqrt(std::max(v, 0.0));
    std::copy(cur.begin(), cur.end(), coeffs_.begin() + static_cast<long>(k * (k - 1) / 2));
    prev.swap(cur);
  }
}

SamplePath HoskingSampler::sample(SeedSpec seed) const {
  const std::size_t n = grid_.intervals();
  GaussianStream rng(seed);
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double* phi = coeffs_.data() + k * (k - 1) / 2;
    double mean = 0.0;
    for (std::size_t j = 1; j <= k; ++j) mean += phi[j - 1] * x[k - j];
    x[k] = mean + sd_[k] * rng.next();
  }
  const double scale = std::pow(grid_.horizon() / static_cast<double>(n), h_.value());
  std::vector<double> values(n + 1, 0.0);
  double level = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    level += scale * x[i];
    values[i + 1] = level;
  }
  return SamplePath(grid_, std::move(values), "hosking");
}

SamplePath generate_path_cholesky(const TimeGrid& grid, const HurstParameter& h,
                                  SeedSpec seed) {
  return CholeskySampler(grid, h).sample(seed);
}

SamplePath generate_path_circulant(std::size_t n, double horizon,
                                   const HurstParameter& h, SeedSpec seed) {
  return CirculantSampler(n, horizon, h).sample(seed);
}

SamplePath generate_path_hosking(std::size_t n, double horizon,
                                 const HurstParameter& h, SeedSpec seed) {
  return HoskingSampler(n, horizon, h).sample(seed);
}

// --- Ensembles and estimators -------------------------------------------------

namespace {
template <class Sampler>
Ensemble run_sampler(const Sampler& s, std::uint64_t seed, std::size_t n_paths) {
  Ensemble out;
  auto paths = parallel_map(n_paths, [&](std::size_t r) {
    return std::make_unique<SamplePath>(s.sample(SeedSpec{seed, r}));
  });
  out.reserve(n_paths);
  for (auto& p : paths) out.push_back(std::move(*p));
  return out;
}
}  // namespace

Ensemble generate_ensemble(Generator gen, std::size_t n, double horizon,
                           const HurstParameter& h, std::uint64_t master_seed,
                           std::size_t n_paths) {
  switch (gen) {
    case Generator::Cholesky:
      return run_sampler(CholeskySampler(TimeGrid::uniform(n, horizon), h),
                         master_seed, n_paths);
    case Generator::Circulant:
      return run_sampler(CirculantSampler(n, horizon, h), master_seed, n_paths);
    case Generator::Hosking:
      return run_sampler(HoskingSampler(n, horizon, h), master_seed, n_paths);
  }
  throw DomainError("unknown generator");
}

Ensemble generate_ensemble(const TimeGrid& grid, const HurstParameter& h,
                           std::uint64_t master_seed, std::size_t n_paths) {
  return run_sampler(CholeskySampler(grid, h), master_seed, n_paths);
}

EmpiricalCovariance empirical_covariance(const Ensemble& paths) {
  if (paths.size() < 2) throw DomainError("empirical covariance needs >= 2 paths");
  const TimeGrid& grid = paths.front().grid;
  for (const auto& p : paths) {
    if (!(p.grid == grid)) throw GridMismatch("ensemble paths on different grids");
  }
  const std::size_t n = grid.intervals();
  const double np = static_cast<double>(paths.size());
  EmpiricalCovariance out{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  std::vector<double> prod(paths.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      for (std::size_t r = 0; r < paths.size(); ++r) {
        prod[r] = paths[r].values[i + 1] * paths[r].values[j + 1];
      }
      const auto m = moments(prod);
      out.mean(i, j) = out.mean(j, i) = m.mean;
      const double se = std::sqrt(m.variance / np);
      out.standard_error(i, j) = out.standard_error(j, i) = se;
    }
  }
  return out;
}

CovarianceAgreement compare_covariance(const EmpiricalCovariance& emp,
                                       const TimeGrid& grid,
                                       const HurstParameter& h) {
  CovarianceAgreement worst;
  const auto n = static_cast<std::size_t>(emp.mean.rows());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double exact = covariance(grid[i + 1], grid[j + 1], h);
      const double se = emp.standard_error(i, j);
      const double diff = emp.mean(i, j) - exact;
      const double z = se > 0 ? std::abs(diff) / se : (diff == 0 ? 0.0 : INFINITY);
      if (z >= worst.max_abs_z) {
        worst = {z, i + 1, j + 1, emp.mean(i, j), exact, se};
      }
    }
  }
  return worst;
}

void write_path_csv(std::ostream& os, const SamplePath& path) {
  os << "t,value\n";
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    os << format_double(path.grid[i]) << ',' << format_double(path.values[i]) << '\n';
  }
}

void write_ensemble_csv(std::ostream& os, const Ensemble& paths) {
  os << "replication,t,value\n";
  for (std::size_t r = 0; r < paths.size(); ++r) {
    const auto& p = paths[r];
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      os << r << ',' << format_double(p.grid[i]) << ',' << format_double(p.values[i])
         << '\n';
    }
  }
}

}  // namespace fracwick
