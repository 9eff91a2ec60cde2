#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fracwick/config.hpp"
#include "fracwick/errors.hpp"
#include "fracwick/report.hpp"
#include "fracwick/runner.hpp"

using namespace fracwick;
namespace fs = std::filesystem;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fracwick_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

int run(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + " \"" FRACWICK_CLI_PATH "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config(const std::string& name) {
  return std::string(FRACWICK_CONFIG_DIR) + "/" + name;
}

}  // namespace

TEST(Config, ParsesDefaultsAndOverrides) {
  const auto c = parse_config(R"({"hurst": 0.8, "grid_sizes": [8, 16, 32], "n_paths": 10})",
                              "verify-ito");
  EXPECT_EQ(c.suite, "verify-ito");
  EXPECT_DOUBLE_EQ(c.hurst, 0.8);
  EXPECT_EQ(c.grid_sizes.size(), 3u);
  EXPECT_EQ(c.generator, "circulant");
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config(R"({"hurts": 0.7})", "verify-ito"), ConfigError);
  EXPECT_THROW(parse_config(R"({"sde": {"lamda": 1.0}})", "solve-sde"), ConfigError);
  EXPECT_THROW(parse_config(R"({"n_paths": "many"})", "verify-ito"), ConfigError);
  EXPECT_THROW(parse_config(R"({"suite": "girsanov"})", "verify-ito"), ConfigError);
  EXPECT_THROW(parse_config("{not json", "verify-ito"), ConfigError);
  EXPECT_THROW(parse_config("{}", "no-such-suite"), ConfigError);
  EXPECT_THROW(parse_config(R"({"hurst": 0.4})", "verify-ito"), ConfigError);
  EXPECT_THROW(parse_config(R"({"grid_sizes": [64, 100, 256]})", "verify-ito"), ConfigError);
  EXPECT_THROW(parse_config(R"({"cases": ["tan"]})", "verify-ito"), ConfigError);
  EXPECT_NO_THROW(parse_config(R"({"hurst": 0.4, "grid_sizes": [64]})", "generate"));
}

TEST(Config, CanonicalFormIsStable) {
  const auto a = parse_config(R"({"hurst": 0.7, "seed": 3})", "isometry");
  const auto b = parse_config(R"({"seed": 3, "hurst": 0.7})", "isometry");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_NE(a.canonical(), parse_config(R"({"seed": 4})", "isometry").canonical());
}

TEST(Config, Fnv1aKnownAnswers) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Config, ShippedConfigsLoad) {
  for (const auto& suite : suite_names()) {
    EXPECT_NO_THROW(load_config(config(suite + ".json"), suite)) << suite;
  }
  EXPECT_THROW(load_config(config("missing.json"), "generate"), ConfigError);
}

TEST(Report, CsvLayout) {
  std::ostringstream os;
  write_report_csv(os, {MonteCarloReport::from_estimate("a", 10, 8, 1.0, 1.0, 0.5)});
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "test_name,n_paths,grid_n,estimate,oracle,stderr,z,verdict");
  EXPECT_NE(os.str().find(",pass"), std::string::npos);
}

TEST(Report, LogLogPlot) {
  ConvergenceTable t;
  t.name = "demo";
  for (std::size_t n : {16, 32, 64, 128}) t.rows.push_back({n, 1.0 / n, 0.0, 0.0, 0.0});
  t.slope = -1.0;
  const auto svg = loglog_svg(t);
  EXPECT_EQ(count(svg, "<circle"), 4u);
  EXPECT_EQ(count(svg, "<line"), 1u);
  EXPECT_NE(svg.find("fitted slope"), std::string::npos);
  EXPECT_THROW(loglog_svg(ConvergenceTable{}), DomainError);
  t.rows[0].rms_residual = 0.0;
  EXPECT_THROW(loglog_svg(t), DomainError);
}

TEST(Report, Heatmap) {
  Eigen::MatrixXd m(3, 3);
  m << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const auto svg = heatmap_svg(m, "cov");
  // background + 9 cells + 20 legend steps
  EXPECT_EQ(count(svg, "<rect"), 30u);
  EXPECT_THROW(heatmap_svg(Eigen::MatrixXd(0, 0), "empty"), DomainError);
  const auto big = heatmap_svg(Eigen::MatrixXd::Ones(200, 200), "big");
  EXPECT_LE(count(big, "<rect"), 1u + 64u * 64u + 20u);
}

TEST(Cli, ConfigErrorsExitTwoWithoutOutput) {
  const auto out = scratch("bad");
  const auto bad = fs::temp_directory_path() / "fracwick_bad_config.json";
  std::ofstream(bad) << R"({"hurst": 0.7, "typo": 1})";
  EXPECT_EQ(run("verify-ito --config \"" + bad.string() + "\" --out \"" + out.string() + "\""), 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(run("verify-ito --config /nonexistent.json --out \"" + out.string() + "\""), 2);
  EXPECT_NE(run("no-such-suite --config \"" + bad.string() + "\""), 0);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, GenerateWritesArtifacts) {
  const auto out = scratch("generate");
  const auto cfg = fs::temp_directory_path() / "fracwick_generate_small.json";
  std::ofstream(cfg) << R"({"hurst": 0.7, "grid_sizes": [32], "n_paths": 400, "seed": 9,
                             "csv_paths": 2, "permutations": 49})";
  ASSERT_EQ(run("generate --config \"" + cfg.string() + "\" --out \"" + out.string() +
                "\" --plots"),
            0);
  const auto dir = out / "generate";
  EXPECT_TRUE(fs::exists(dir / "report.csv"));
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  std::size_t csv = 0, svg = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind("paths_", 0) == 0 && e.path().extension() == ".csv") ++csv;
    if (e.path().extension() == ".svg") ++svg;
  }
  EXPECT_EQ(csv, 3u);
  EXPECT_GE(svg, 1u);
  const auto manifest = slurp(dir / "manifest.json");
  EXPECT_NE(manifest.find("\"config_hash\""), std::string::npos);
  EXPECT_NE(manifest.find(kToolVersion), std::string::npos);
}

TEST(Cli, OutputDoesNotDependOnThreadCount) {
  const auto cfg = fs::temp_directory_path() / "fracwick_ito_small.json";
  std::ofstream(cfg) << R"({"hurst": 0.7, "grid_sizes": [16, 32, 64], "n_paths": 300,
                             "seed": 5, "cases": ["x^2", "sin"]})";
  const auto a = scratch("threads1");
  const auto b = scratch("threads3");
  run("verify-ito --config \"" + cfg.string() + "\" --out \"" + a.string() + "\"",
      "FRACWICK_THREADS=1");
  run("verify-ito --config \"" + cfg.string() + "\" --out \"" + b.string() + "\" --seed 5",
      "FRACWICK_THREADS=3");
  ASSERT_TRUE(fs::exists(a / "verify-ito" / "report.csv"));
  for (const auto& e : fs::directory_iterator(a / "verify-ito")) {
    if (e.path().extension() != ".csv") continue;
    EXPECT_EQ(slurp(e.path()), slurp(b / "verify-ito" / e.path().filename()))
        << e.path().filename();
  }
}
