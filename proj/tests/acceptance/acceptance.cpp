// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fracwick/config.hpp"
#include "fracwick/fbm.hpp"
#include "fracwick/ito.hpp"
#include "fracwick/phi.hpp"
#include "fracwick/report.hpp"
#include "fracwick/rng.hpp"
#include "fracwick/runner.hpp"
#include "fracwick/stats.hpp"
#include "fracwick/wick.hpp"
#include "phi_quadrature.hpp"

using namespace fracwick;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (pass) {
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

ExperimentConfig shipped(const std::string& suite) {
  return load_config(std::string(FRACWICK_CONFIG_DIR) + "/" + suite + ".json", suite);
}

// Runs a suite and requires every verdict to pass, naming the failures.
SuiteOutput require_suite(Outcome& o, const ExperimentConfig& cfg, const std::string& tag) {
  SuiteOutput out = compute_suite(cfg);
  std::size_t passed = 0;
  for (const auto& r : out.reports) {
    if (r.pass) {
      ++passed;
    } else {
      o.require(false, tag + ":" + r.test_name + " est=" + fmt(r.estimate) +
                           " oracle=" + fmt(r.oracle) + " z=" + fmt(r.z_score));
    }
  }
  o.note(tag + " " + std::to_string(passed) + "/" + std::to_string(out.reports.size()));
  return out;
}

double worst_abs_z(const SuiteOutput& out, const std::string& prefix) {
  double w = 0.0;
  for (const auto& r : out.reports) {
    if (r.test_name.rfind(prefix, 0) == 0 && std::isfinite(r.z_score)) {
      w = std::max(w, std::abs(r.z_score));
    }
  }
  return w;
}

// 1. Covariance of every generator and cross-generator agreement.
Outcome covariance_criterion() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  for (double h : {0.55, 0.7, 0.9}) {
    auto cfg = shipped("generate");
    cfg.hurst = h;
    cfg.grid_sizes = {64};
    cfg.n_paths = 20000;
    cfg.generators = {"cholesky", "circulant", "hosking"};
    const auto out = require_suite(o, cfg, "H=" + fmt(h));
    double worst = 0.0;  // covariance rows carry the largest entry |z| as the estimate
    for (const auto& r : out.reports) {
      if (r.test_name.rfind("covariance_", 0) == 0) worst = std::max(worst, r.estimate);
    }
    o.note("max entry |z|=" + fmt(worst));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime " + fmt(secs) + " s >= 60 s");
  o.note(fmt(secs) + " s");
  return o;
}

// 2. Indicator inner products reproduce the covariance; rectangle integrals
// match quadrature of the singular kernel.
Outcome phi_criterion() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  UniformStream u(SeedSpec{20240611, 2});
  double worst_rel = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double h = 0.51 + 0.48 * u.next();
    const double s = 0.01 + 4.0 * u.next(), t = 0.01 + 4.0 * u.next();
    const double ip = inner_product_pc(StepFunction::indicator(0.0, s),
                                       StepFunction::indicator(0.0, t), PhiContext(h));
    worst_rel = std::max(worst_rel, std::abs(ip / covariance(s, t, HurstParameter(h)) - 1.0));
  }
  o.require(worst_rel <= 1e-12, "indicator rel err " + fmt(worst_rel));
  double worst_abs = 0.0;
  auto one = [](double) { return 1.0; };
  for (int k = 0; k < 20; ++k) {
    const double h = 0.55 + 0.4 * u.next();
    double a = 2 * u.next(), b = 2 * u.next(), c = 2 * u.next(), d = 2 * u.next();
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    const double exact = phi_rect_integral(a, b, c, d, PhiContext(h));
    worst_abs = std::max(worst_abs,
                         std::abs(exact - fracwick::testing::quad_phi(a, b, c, d, h, one, one)));
  }
  o.require(worst_abs <= 1e-6, "rectangle vs quadrature " + fmt(worst_abs));
  const double secs = seconds_since(t0);
  o.require(secs < 10.0, "runtime " + fmt(secs) + " s >= 10 s");
  o.note("indicator rel " + fmt(worst_rel) + ", rectangle abs " + fmt(worst_abs) + ", " +
         fmt(secs) + " s");
  return o;
}

// 3. Deterministic integrals: mean 0, variance equal to the phi-norm.
Outcome deterministic_law_criterion() {
  Outcome o;
  const std::size_t n = 64;
  const double h = 0.7;
  const PhiContext ctx(h);
  const auto ens = generate_ensemble(Generator::Circulant, n, 1.0, HurstParameter(h),
                                     20240611, 10000);
  UniformStream u(SeedSpec{20240611, 3});
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    // Breakpoints on random grid nodes, levels in [-2, 2].
    std::vector<double> pts = {0.0};
    for (std::size_t i = 1; i < n; ++i) {
      if (u.next() < 0.15) pts.push_back(static_cast<double>(i) / n);
    }
    pts.push_back(1.0);
    std::vector<double> lv;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) lv.push_back(4.0 * u.next() - 2.0);
    const StepFunction f(TimeGrid(pts), lv);
    std::vector<double> x(ens.size());
    for (std::size_t r = 0; r < ens.size(); ++r) x[r] = wick_integral_deterministic(f, ens[r]);
    const auto m = moments(x);
    const auto v = variance_with_stderr(x);
    const double norm = phi_norm_sq(f, ctx);
    const double zm = m.mean / m.stderr_mean;
    const double zv = (v.variance - norm) / v.stderr_variance;
    worst = std::max({worst, std::abs(zm), std::abs(zv)});
    o.require(std::abs(zm) < kZThreshold, "f" + std::to_string(k) + " mean z=" + fmt(zm));
    o.require(std::abs(zv) < kZThreshold, "f" + std::to_string(k) + " var z=" + fmt(zv));
  }
  o.note("5 step functions, max|z|=" + fmt(worst));
  return o;
}

// 4. Isometry at two Hurst values, plus the analytic value for F = W.
Outcome isometry_criterion() {
  Outcome o;
  for (double h : {0.6, 0.75}) {
    auto cfg = shipped("isometry");
    cfg.hurst = h;
    cfg.horizon = 1.0;
    cfg.cases = {"one", "W", "W^2"};
    const auto out = require_suite(o, cfg, "H=" + fmt(h));
    bool analytic = false;
    for (const auto& r : out.reports) analytic |= r.test_name == "isometry_W_analytic";
    o.require(analytic, "no analytic row at H=" + fmt(h));
    o.note("max|z|=" + fmt(worst_abs_z(out, "isometry_")));
  }
  return o;
}

// 5. Ito formula ladders.
Outcome ito_criterion() {
  Outcome o;
  auto cfg = shipped("verify-ito");
  const auto out = require_suite(o, cfg, "verify-ito");
  for (const auto& name : {"x^2_mean_n64", "x^2_mean_n512", "x^3_slope", "x^4_slope", "sin_slope"}) {
    bool found = false;
    for (const auto& r : out.reports) {
      if (r.test_name == std::string("ito_") + name) {
        found = true;
        o.note(r.test_name + "=" + fmt(std::isfinite(r.z_score) ? r.z_score : r.estimate));
      }
    }
    o.require(found, std::string("missing ito_") + name);
  }
  return o;
}

// 6. Product rule and Ito-Wentzell.
Outcome product_wentzell_criterion() {
  Outcome o;
  require_suite(o, shipped("verify-product-rule"), "product");
  const auto cfg = shipped("verify-wentzell");
  require_suite(o, cfg, "wentzell");

  // Per-path assertions on the degenerate cases.
  const PhiContext ctx(cfg.hurst);
  const auto ens = generate_ensemble(Generator::Circulant, cfg.grid_sizes.back(), cfg.horizon,
                                     HurstParameter(cfg.hurst), cfg.seed, 200);
  const auto constant = wentzell_case("constant", cfg.horizon);
  const auto deterministic = wentzell_case("deterministic", cfg.horizon);
  double worst_const = 0.0, worst_det = 0.0;
  for (std::size_t n : cfg.grid_sizes) {
    const auto g = TimeGrid::uniform(n, cfg.horizon);
    const double chain_rule_error = cfg.horizon * cfg.horizon / static_cast<double>(n);
    for (const auto& p : ens) {
      const auto q = p.restrict_to(g);
      worst_const = std::max(worst_const, std::abs(wentzell_residual(constant, q, ctx)));
      worst_det = std::max(worst_det, std::abs(wentzell_residual(deterministic, q, ctx) -
                                               chain_rule_error));
    }
  }
  o.require(worst_const == 0.0, "constant field residual " + fmt(worst_const));
  o.require(worst_det <= 1e-12, "deterministic residual off T^2/n by " + fmt(worst_det));
  o.note("constant exact 0, deterministic = T^2/n within " + fmt(worst_det));
  return o;
}

// 7. Girsanov identity and unit mean of the exponential functional.
Outcome girsanov_criterion() {
  Outcome o;
  const auto out = require_suite(o, shipped("girsanov"), "girsanov");
  for (const auto& name : {"girsanov_x", "girsanov_x^2", "girsanov_exp", "epsilon_mean_g1",
                           "epsilon_mean_g0.5"}) {
    bool found = false;
    for (const auto& r : out.reports) found |= r.test_name == name;
    o.require(found, std::string("missing ") + name);
  }
  o.note("max|z|=" + fmt(worst_abs_z(out, "")));
  return o;
}

// 8. Fractional OU moments, solver refinement and Picard agreement.
Outcome sde_criterion() {
  Outcome o;
  const auto out = require_suite(o, shipped("solve-sde"), "solve-sde");
  for (const auto& r : out.reports) {
    if (r.test_name == "sde_euler_vs_flow_slope") o.note("slope=" + fmt(r.estimate));
    if (r.test_name == "sde_picard_vs_rk4") o.note("picard gap=" + fmt(r.estimate));
  }
  o.note("moment max|z|=" + fmt(worst_abs_z(out, "flow-rk4_")));
  return o;
}

// 9. Byte-identical CSVs across reruns with different worker counts.
std::map<std::string, std::string> csv_outputs(const std::string& threads) {
  setenv("FRACWICK_THREADS", threads.c_str(), 1);
  std::map<std::string, std::string> files;
  for (const auto& suite : suite_names()) {
    const auto out = compute_suite(shipped(suite));
    std::ostringstream report;
    write_report_csv(report, out.reports);
    files[suite + "/report.csv"] = report.str();
    for (const auto& [name, text] : out.files) {
      if (name.size() > 4 && name.compare(name.size() - 4, 4, ".csv") == 0) {
        files[suite + "/" + name] = text;
      }
    }
  }
  unsetenv("FRACWICK_THREADS");
  return files;
}

Outcome reproducibility_criterion() {
  Outcome o;
  const auto a = csv_outputs("1");
  const auto b = csv_outputs("3");
  o.require(a.size() == b.size(), "file sets differ");
  for (const auto& [name, text] : a) {
    const auto it = b.find(name);
    o.require(it != b.end() && it->second == text, name + " differs");
  }
  o.note(std::to_string(a.size()) + " CSVs identical");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"covariance and generator agreement", covariance_criterion},
      {"phi inner products and rectangle integrals", phi_criterion},
      {"deterministic integral law", deterministic_law_criterion},
      {"isometry", isometry_criterion},
      {"Ito formula", ito_criterion},
      {"product rule and Ito-Wentzell", product_wentzell_criterion},
      {"Girsanov identity", girsanov_criterion},
      {"SDE solvers", sde_criterion},
      {"reproducibility", reproducibility_criterion},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
