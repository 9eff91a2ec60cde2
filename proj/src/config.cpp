#include "fracwick/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fracwick/errors.hpp"
#include "fracwick/fbm.hpp"
#include "fracwick/ito.hpp"
#include "fracwick/sde.hpp"

namespace fracwick {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> default_cases(const std::string& suite) {
  if (suite == "verify-ito") return {"x", "x^2", "x^3", "x^4", "sin"};
  if (suite == "verify-product-rule") return {"W*W", "W*const", "W*t", "mixed"};
  if (suite == "verify-wentzell") return wentzell_case_names();
  if (suite == "girsanov") return {"one", "x", "x^2", "exp", "x-g0"};
  if (suite == "isometry") return {"one", "W", "W^2"};
  if (suite == "converge") return {"ito:x^3", "ito:x^4", "ito:sin", "wentzell:xW"};
  return {};
}

namespace {

std::vector<std::string> known_cases(const std::string& suite) {
  if (suite == "verify-ito") return ito_case_names();
  if (suite == "converge") {
    std::vector<std::string> out;
    for (const auto& n : ito_case_names()) out.push_back("ito:" + n);
    for (const auto& n : wentzell_case_names()) out.push_back("wentzell:" + n);
    for (const auto& n : default_cases("verify-product-rule")) out.push_back("product:" + n);
    return out;
  }
  return default_cases(suite);
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown config key '" + where + it.key() + "'");
    }
  }
}

std::size_t get_count(const json& j, const std::string& key) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    throw ConfigError("config key '" + key + "' must be a non-negative integer");
  }
  const auto v = j.get<std::int64_t>();
  if (v < 0) throw ConfigError("config key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

double get_real(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError("config key '" + key + "' must be finite");
  return v;
}

std::vector<std::string> get_strings(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError("config key '" + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw ConfigError("config key '" + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

SdeConfig parse_sde(const json& j) {
  if (!j.is_object()) throw ConfigError("config key 'sde' must be an object");
  reject_unknown(j, {"drift", "lambda", "sigma", "x0", "checkpoints", "solvers",
                     "picard_tol", "picard_max_iter", "oracle_cells"},
                 "sde.");
  SdeConfig s;
  if (j.contains("drift")) s.drift = get_as<std::string>(j["drift"], "sde.drift");
  if (j.contains("lambda")) s.lambda = get_real(j["lambda"], "sde.lambda");
  if (j.contains("sigma")) s.sigma = get_real(j["sigma"], "sde.sigma");
  if (j.contains("x0")) s.x0 = get_real(j["x0"], "sde.x0");
  if (j.contains("checkpoints")) {
    if (!j["checkpoints"].is_array()) throw ConfigError("sde.checkpoints must be an array");
    s.checkpoints.clear();
    for (const auto& e : j["checkpoints"]) s.checkpoints.push_back(get_real(e, "sde.checkpoints"));
  }
  if (j.contains("solvers")) s.solvers = get_strings(j["solvers"], "sde.solvers");
  if (j.contains("picard_tol")) s.picard_tol = get_real(j["picard_tol"], "sde.picard_tol");
  if (j.contains("picard_max_iter")) {
    s.picard_max_iter = get_count(j["picard_max_iter"], "sde.picard_max_iter");
  }
  if (j.contains("oracle_cells")) s.oracle_cells = get_count(j["oracle_cells"], "sde.oracle_cells");
  return s;
}

}  // namespace

std::string ExperimentConfig::canonical() const {
  json j;
  j["suite"] = suite;
  j["hurst"] = hurst;
  j["horizon"] = horizon;
  j["grid_sizes"] = grid_sizes;
  j["n_paths"] = n_paths;
  j["seed"] = seed;
  j["generator"] = generator;
  j["generators"] = generators;
  j["cases"] = cases;
  j["output_dir"] = output_dir.generic_string();
  j["plots"] = plots;
  j["csv_paths"] = csv_paths;
  j["permutations"] = permutations;
  j["slope_threshold"] = slope_threshold;
  j["sde"] = {{"drift", sde.drift},
              {"lambda", sde.lambda},
              {"sigma", sde.sigma},
              {"x0", sde.x0},
              {"checkpoints", sde.checkpoints},
              {"solvers", sde.solvers},
              {"picard_tol", sde.picard_tol},
              {"picard_max_iter", sde.picard_max_iter},
              {"oracle_cells", sde.oracle_cells}};
  return j.dump();  // keys sorted by nlohmann's default object type
}

ExperimentConfig parse_config(const std::string& text, const std::string& suite) {
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end()) {
    throw ConfigError("unknown suite '" + suite + "'");
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"suite", "hurst", "horizon", "grid_sizes", "n_paths", "seed",
                     "generator", "generators", "cases", "output_dir", "plots",
                     "csv_paths", "permutations", "slope_threshold", "sde"},
                 "");
  ExperimentConfig c;
  c.suite = suite;
  if (j.contains("suite") && get_as<std::string>(j["suite"], "suite") != suite) {
    throw ConfigError("config is for suite '" + j["suite"].get<std::string>() +
                      "', not '" + suite + "'");
  }
  if (j.contains("hurst")) c.hurst = get_real(j["hurst"], "hurst");
  if (j.contains("horizon")) c.horizon = get_real(j["horizon"], "horizon");
  if (j.contains("grid_sizes")) {
    if (!j["grid_sizes"].is_array()) throw ConfigError("grid_sizes must be an array");
    c.grid_sizes.clear();
    for (const auto& e : j["grid_sizes"]) c.grid_sizes.push_back(get_count(e, "grid_sizes"));
  }
  if (j.contains("n_paths")) c.n_paths = get_count(j["n_paths"], "n_paths");
  if (j.contains("seed")) c.seed = get_count(j["seed"], "seed");
  if (j.contains("generator")) c.generator = get_as<std::string>(j["generator"], "generator");
  if (j.contains("generators")) c.generators = get_strings(j["generators"], "generators");
  if (j.contains("cases")) c.cases = get_strings(j["cases"], "cases");
  if (j.contains("output_dir")) {
    c.output_dir = get_as<std::string>(j["output_dir"], "output_dir");
  }
  if (j.contains("plots")) c.plots = get_as<bool>(j["plots"], "plots");
  if (j.contains("csv_paths")) c.csv_paths = get_count(j["csv_paths"], "csv_paths");
  if (j.contains("permutations")) c.permutations = get_count(j["permutations"], "permutations");
  if (j.contains("slope_threshold")) {
    c.slope_threshold = get_real(j["slope_threshold"], "slope_threshold");
  }
  if (j.contains("sde")) c.sde = parse_sde(j["sde"]);
  if (c.cases.empty()) c.cases = default_cases(suite);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file, const std::string& suite) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), suite);
}

void validate(const ExperimentConfig& c) {
  const bool needs_phi = c.suite != "generate";
  if (!(c.hurst > 0.0 && c.hurst < 1.0)) throw ConfigError("hurst must lie in (0, 1)");
  if (needs_phi && !(c.hurst > 0.5)) {
    throw ConfigError("suite '" + c.suite + "' needs hurst > 1/2");
  }
  if (!(c.horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (c.grid_sizes.empty()) throw ConfigError("grid_sizes must not be empty");
  for (std::size_t i = 0; i < c.grid_sizes.size(); ++i) {
    if (c.grid_sizes[i] == 0) throw ConfigError("grid sizes must be positive");
    if (i > 0 && c.grid_sizes[i] <= c.grid_sizes[i - 1]) {
      throw ConfigError("grid_sizes must be strictly increasing");
    }
    if (c.grid_sizes.back() % c.grid_sizes[i] != 0) {
      throw ConfigError("every grid size must divide the largest one");
    }
  }
  const bool ladder = c.suite == "verify-ito" || c.suite == "verify-product-rule" ||
                      c.suite == "verify-wentzell" || c.suite == "converge" ||
                      c.suite == "solve-sde";
  if (ladder && c.grid_sizes.size() < 3) {
    throw ConfigError("suite '" + c.suite + "' needs at least 3 grid sizes");
  }
  if (c.n_paths < 2) throw ConfigError("n_paths must be at least 2");
  try {
    parse_generator(c.generator);
    for (const auto& g : c.generators) parse_generator(g);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (c.suite == "generate" && c.generators.empty()) {
    throw ConfigError("generators must not be empty");
  }
  const auto known = known_cases(c.suite);
  for (const auto& name : c.cases) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw ConfigError("unknown case '" + name + "' for suite '" + c.suite + "'");
    }
  }
  if (c.suite == "solve-sde") {
    const auto& s = c.sde;
    if (s.drift != "ou" && s.drift != "zero") {
      throw ConfigError("sde.drift must be 'ou' or 'zero'");
    }
    if (s.drift == "ou" && !(s.lambda > 0.0)) throw ConfigError("sde.lambda must be positive");
    if (s.solvers.empty()) throw ConfigError("sde.solvers must not be empty");
    for (const auto& name : s.solvers) parse_solver(name);
    if (!(s.picard_tol > 0.0)) throw ConfigError("sde.picard_tol must be positive");
    if (s.picard_max_iter == 0) throw ConfigError("sde.picard_max_iter must be positive");
    if (s.oracle_cells == 0) throw ConfigError("sde.oracle_cells must be positive");
    if (s.checkpoints.empty()) throw ConfigError("sde.checkpoints must not be empty");
    for (double t : s.checkpoints) {
      if (!(t > 0.0) || t > c.horizon) {
        throw ConfigError("sde checkpoints must lie in (0, horizon]");
      }
      for (std::size_t n : c.grid_sizes) {
        if (TimeGrid::uniform(n, c.horizon).find_node(t) == TimeGrid::npos) {
          throw ConfigError("checkpoint " + std::to_string(t) +
                            " is not a node of the n=" + std::to_string(n) + " grid");
        }
      }
    }
  }
  if (c.permutations < 19) throw ConfigError("permutations must be at least 19");
}

}  // namespace fracwick
