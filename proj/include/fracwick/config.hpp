#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fracwick {

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "generate", "verify-ito", "verify-product-rule", "verify-wentzell",
      "girsanov", "isometry",   "solve-sde",           "converge"};
  return names;
}

struct SdeConfig {
  std::string drift = "ou";  // "ou" | "zero"
  double lambda = 1.0;
  double sigma = 1.0;
  double x0 = 1.0;
  std::vector<double> checkpoints = {0.25, 0.5, 1.0};
  std::vector<std::string> solvers = {"flow-rk4"};
  double picard_tol = 1e-10;
  std::size_t picard_max_iter = 200;
  std::size_t oracle_cells = 2048;
};

struct ExperimentConfig {
  std::string suite;
  double hurst = 0.7;
  double horizon = 1.0;
  std::vector<std::size_t> grid_sizes = {64, 128, 256, 512};
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  std::string generator = "circulant";
  std::vector<std::string> generators = {"cholesky", "circulant", "hosking"};
  std::vector<std::string> cases;  // empty: suite default
  std::filesystem::path output_dir = "out";
  bool plots = false;
  std::size_t csv_paths = 16;
  std::size_t permutations = 199;
  double slope_threshold = -0.4;
  SdeConfig sde;

  /// Canonical JSON text of every field; the manifest hashes this.
  std::string canonical() const;
};

/// Parses and validates a JSON config. Unknown keys, wrong types and
/// out-of-range values throw ConfigError. `suite` must be a known suite;
/// a "suite" key in the document, if present, must agree with it.
ExperimentConfig parse_config(const std::string& text, const std::string& suite);
ExperimentConfig load_config(const std::filesystem::path& file,
                             const std::string& suite);

/// Checks cross-field constraints (case names exist for the suite, grids
/// nest, checkpoints lie on the grid). Throws ConfigError.
void validate(const ExperimentConfig& cfg);

/// Suite-specific default case list.
std::vector<std::string> default_cases(const std::string& suite);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace fracwick
