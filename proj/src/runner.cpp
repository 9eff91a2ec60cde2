#include "fracwick/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "fracwick/errors.hpp"
#include "fracwick/fbm.hpp"
#include "fracwick/format.hpp"
#include "fracwick/ito.hpp"
#include "fracwick/parallel.hpp"
#include "fracwick/report.hpp"
#include "fracwick/sde.hpp"
#include "fracwick/wick.hpp"

namespace fracwick {

namespace {

std::string safe_name(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return s;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string report_csv(const std::vector<MonteCarloReport>& rows) {
  std::ostringstream os;
  write_report_csv(os, rows);
  return os.str();
}

std::string convergence_csv(const std::vector<ConvergenceTable>& tables) {
  std::ostringstream os;
  write_convergence_csv(os, tables);
  return os.str();
}

bool all_zero(const ConvergenceTable& t) {
  return std::all_of(t.rows.begin(), t.rows.end(),
                     [](const ConvergenceRow& r) { return r.max_abs_residual == 0.0; });
}

MonteCarloReport slope_report(const std::string& name, const ConvergenceTable& t,
                              std::size_t n_paths, double threshold) {
  const bool ok = t.strictly_decreasing() && std::isfinite(t.slope) && t.slope <= threshold;
  return MonteCarloReport::from_check(name + "_slope", n_paths, t.rows.back().n, t.slope,
                                      threshold, ok);
}

MonteCarloReport exact_report(const std::string& name, const ConvergenceTable& t,
                              std::size_t n_paths) {
  double worst = 0.0;
  for (const auto& r : t.rows) worst = std::max(worst, r.max_abs_residual);
  return MonteCarloReport::from_check(name + "_exact_zero", n_paths, t.rows.back().n,
                                      worst, 0.0, worst == 0.0);
}

void mean_rows(std::vector<MonteCarloReport>& out, const std::string& name,
               const ConvergenceTable& t, std::size_t n_paths) {
  for (const auto& r : t.rows) {
    out.push_back(MonteCarloReport::from_estimate(name + "_mean_n" + std::to_string(r.n),
                                                  n_paths, r.n, r.mean_residual, 0.0,
                                                  r.stderr_mean));
  }
}

void add_plot(SuiteOutput& out, const ExperimentConfig& cfg, const ConvergenceTable& t) {
  if (!cfg.plots || all_zero(t)) return;
  out.files.emplace_back("loglog_" + safe_name(t.name) + ".svg", loglog_svg(t));
}

Ensemble fine_ensemble(const ExperimentConfig& cfg) {
  return generate_ensemble(parse_generator(cfg.generator), cfg.grid_sizes.back(),
                           cfg.horizon, HurstParameter(cfg.hurst), cfg.seed, cfg.n_paths);
}

// --- generate --------------------------------------------------------------------

SuiteOutput suite_generate(const ExperimentConfig& cfg) {
  SuiteOutput out;
  const HurstParameter h(cfg.hurst);
  const std::size_t n = cfg.grid_sizes.back();
  std::vector<Ensemble> ens;
  // Cholesky and Hosking are both triangular factorisations of the same
  // covariance, so shared normals would give identical paths. Each
  // generator gets its own master seed to keep the two-sample tests honest.
  for (std::size_t k = 0; k < cfg.generators.size(); ++k) {
    const std::string& name = cfg.generators[k];
    const Generator gen = parse_generator(name);
    ens.push_back(generate_ensemble(gen, n, cfg.horizon, h, cfg.seed + k, cfg.n_paths));
    const Ensemble& e = ens.back();

    std::ostringstream csv;
    write_ensemble_csv(csv, Ensemble(e.begin(), e.begin() + std::min(cfg.csv_paths, e.size())));
    out.files.emplace_back("paths_" + name + ".csv", csv.str());

    const auto emp = empirical_covariance(e);
    const auto agree = compare_covariance(emp, e.front().grid, h);
    out.reports.push_back(MonteCarloReport::from_check(
        "covariance_" + name, cfg.n_paths, n, agree.max_abs_z, kZThreshold,
        agree.max_abs_z < kZThreshold));
    if (cfg.plots) {
      out.files.emplace_back("covariance_" + name + ".svg",
                             heatmap_svg(emp.mean, "empirical covariance, " + name));
    }
  }
  // Pairwise two-sample tests on (W_{T/2}, W_T).
  auto features = [n](const Ensemble& e) {
    std::vector<double> f;
    f.reserve(2 * e.size());
    for (const auto& p : e) {
      f.push_back(p.values[n / 2]);
      f.push_back(p.values[n]);
    }
    return f;
  };
  for (std::size_t a = 0; a < ens.size(); ++a) {
    for (std::size_t b = a + 1; b < ens.size(); ++b) {
      const auto fa = features(ens[a]), fb = features(ens[b]);
      const auto res = energy_test(fa, fb, 2, cfg.permutations, cfg.seed ^ (a * 31 + b));
      out.reports.push_back(MonteCarloReport::from_check(
          "energy_" + cfg.generators[a] + "_vs_" + cfg.generators[b], cfg.n_paths, n,
          res.p_value, 0.01, res.p_value > 0.01));
    }
  }
  return out;
}

// --- Ito / product / Wentzell ladders -----------------------------------------------

SuiteOutput suite_ito(const ExperimentConfig& cfg) {
  SuiteOutput out;
  const PhiContext ctx(cfg.hurst);
  const Ensemble fine = fine_ensemble(cfg);
  std::vector<ConvergenceTable> tables;
  for (const auto& name : cfg.cases) {
    auto t = convergence_study("ito_" + name, ito_residual_factory(ito_case(name), ctx),
                               cfg.grid_sizes, fine);
    if (all_zero(t)) {
      out.reports.push_back(exact_report(t.name, t, cfg.n_paths));
    } else {
      if (name == "x^2") mean_rows(out.reports, t.name, t, cfg.n_paths);
      out.reports.push_back(slope_report(t.name, t, cfg.n_paths, cfg.slope_threshold));
    }
    add_plot(out, cfg, t);
    tables.push_back(std::move(t));
  }
  for (const auto& name : cfg.cases) {
    if (name == "t*x^2") continue;
    out.reports.push_back(expectation_identity_check(name, fine, cfg.horizon, ctx));
  }
  out.files.emplace_back("convergence.csv", convergence_csv(tables));
  return out;
}

struct ProductCase {
  DriftDiffusion x, y;
  bool exact_mean;  // E[residual] = 0 at every grid size
};

ProductCase product_case(const std::string& name, double horizon) {
  const auto w = DriftDiffusion::constant(0.0, 0.0, 1.0, horizon);
  if (name == "W*W") return {w, w, true};
  if (name == "W*const") return {w, DriftDiffusion::constant(2.0, 0.0, 0.0, horizon), true};
  if (name == "W*t") return {w, DriftDiffusion::constant(0.0, 1.0, 0.0, horizon), false};
  if (name == "mixed") {
    return {DriftDiffusion::constant(1.0, 1.0, 1.0, horizon),
            DriftDiffusion::constant(0.5, 0.0, 2.0, horizon), true};
  }
  throw UnsupportedCase("unknown product-rule case '" + name + "'");
}

ResidualFactory named_factory(const std::string& tagged, double horizon,
                              const PhiContext& ctx) {
  const auto colon = tagged.find(':');
  const std::string kind = tagged.substr(0, colon), name = tagged.substr(colon + 1);
  if (kind == "ito") return ito_residual_factory(ito_case(name), ctx);
  if (kind == "wentzell") return wentzell_factory(wentzell_case(name, horizon), ctx);
  const auto pc = product_case(name, horizon);
  return product_rule_factory(pc.x, pc.y, ctx);
}

SuiteOutput suite_product(const ExperimentConfig& cfg) {
  SuiteOutput out;
  const PhiContext ctx(cfg.hurst);
  const Ensemble fine = fine_ensemble(cfg);
  std::vector<ConvergenceTable> tables;
  for (const auto& name : cfg.cases) {
    const auto pc = product_case(name, cfg.horizon);
    auto t = convergence_study("product_" + name, product_rule_factory(pc.x, pc.y, ctx),
                               cfg.grid_sizes, fine);
    if (all_zero(t)) {
      out.reports.push_back(exact_report(t.name, t, cfg.n_paths));
    } else {
      if (pc.exact_mean) mean_rows(out.reports, t.name, t, cfg.n_paths);
      out.reports.push_back(slope_report(t.name, t, cfg.n_paths, cfg.slope_threshold));
    }
    add_plot(out, cfg, t);
    tables.push_back(std::move(t));
  }
  out.files.emplace_back("convergence.csv", convergence_csv(tables));
  return out;
}

SuiteOutput suite_wentzell(const ExperimentConfig& cfg) {
  SuiteOutput out;
  const PhiContext ctx(cfg.hurst);
  const Ensemble fine = fine_ensemble(cfg);
  std::vector<ConvergenceTable> tables;
  std::ostringstream cond;
  cond << "case,index,description,status\n";
  for (const auto& name : cfg.cases) {
    const auto wc = wentzell_case(name, cfg.horizon);
    for (const auto& e : wentzell_conditions(wc)) {
      cond << name << ',' << e.index << ',' << csv_quote(e.description) << ','
           << to_string(e.status) << '\n';
    }
    auto t = convergence_study("wentzell_" + name, wentzell_factory(wc, ctx),
                               cfg.grid_sizes, fine);
    if (all_zero(t)) {
      out.reports.push_back(exact_report(t.name, t, cfg.n_paths));
    } else {
      if (wc.process.diffusion.levels_on(fine.front().grid) !=
          std::vector<double>(cfg.grid_sizes.back(), 0.0)) {
        mean_rows(out.reports, t.name, t, cfg.n_paths);
      }
      out.reports.push_back(slope_report(t.name, t, cfg.n_paths, cfg.slope_threshold));
    }
    // The closed form must agree with the field evaluated along X.
    if (wc.closed_form) {
      double worst = 0.0;
      for (const auto& p : fine) {
        const double xT = wc.process.values(p).back();
        const double field = wc.f0(xT) + cfg.horizon * wc.g(xT) + p.terminal() * wc.h(xT);
        worst = std::max(worst, std::abs((*wc.closed_form)(p.terminal(), xT) - field));
      }
      out.reports.push_back(MonteCarloReport::from_check(
          t.name + "_closed_form", cfg.n_paths, cfg.grid_sizes.back(), worst, 0.0,
          worst <= 1e-12));
    }
    add_plot(out, cfg, t);
    tables.push_back(std::move(t));
  }
  out.files.emplace_back("convergence.csv", convergence_csv(tables));
  out.files.emplace_back("conditions.csv", cond.str());
  return out;
}

SuiteOutput suite_converge(const ExperimentConfig& cfg) {
  SuiteOutput out;
  const PhiContext ctx(cfg.hurst);
  const Ensemble fine = fine_ensemble(cfg);
  std::vector<ConvergenceTable> tables;
  for (const auto& tagged : cfg.cases) {
    auto t = convergence_study(safe_name(tagged), named_factory(tagged, cfg.horizon, ctx),
                               cfg.grid_sizes, fine);
    out.reports.push_back(all_zero(t) ? exact_report(t.name, t, cfg.n_paths)
                                      : slope_report(t.name, t, cfg.n_paths,
                                                     cfg.slope_threshold));
    add_plot(out, cfg, t);
    tables.push_back(std::move(t));
  }
  out.files.emplace_back("convergence.csv", convergence_csv(tables));
  return out;
}

// --- Girsanov / isometry -------------------------------------------------------------

SuiteOutput suite_girsanov(const ExperimentConfig& cfg) {
  SuiteOutput out;
  const PhiContext ctx(cfg.hurst);
  const Ensemble ens = fine_ensemble(cfg);
  const double T = cfg.horizon;
  for (const auto& name : cfg.cases) {
    SmoothFunction h = SmoothFunction::identity();
    double level = 1.0;
    if (name == "one") h = SmoothFunction::constant(1.0);
    if (name == "x^2") h = SmoothFunction::power(2);
    if (name == "exp") { h = SmoothFunction::exp(1.0); level = 0.5; }
    if (name == "x-g0") level = 0.0;
    out.reports.push_back(girsanov_check(CylinderFunctional{h}, StepFunction::constant(T, level),
                                         ens, ctx, "girsanov_" + name));
  }
  for (double level : {1.0, 0.5}) {
    const auto g = StepFunction::constant(T, level);
    const auto eps = parallel_map(ens.size(), [&](std::size_t r) {
      return exponential_functional(g, ens[r], ctx);
    });
    out.reports.push_back(mean_report("epsilon_mean_g" + format_double(level),
                                      cfg.grid_sizes.back(), eps, 1.0));
  }
  return out;
}

SuiteOutput suite_isometry(const ExperimentConfig& cfg) {
  SuiteOutput out;
  const PhiContext ctx(cfg.hurst);
  const Ensemble ens = fine_ensemble(cfg);
  const double T = cfg.horizon;
  std::ostringstream parts;
  parts << "case,lhs,rhs,rhs_norm_part,rhs_trace_part,rhs_diagonal_form\n";
  for (const auto& name : cfg.cases) {
    Integrand F = StepFunction::constant(T, 1.0);
    if (name == "W") F = CylinderFunctional{SmoothFunction::identity()};
    if (name == "W^2") F = CylinderFunctional{SmoothFunction::power(2)};
    const auto rep = isometry_check(F, ens, ctx, "isometry_" + name);
    out.reports.push_back(rep.report);
    parts << name << ',' << format_double(rep.lhs) << ',' << format_double(rep.rhs) << ','
          << format_double(rep.rhs_norm_part) << ',' << format_double(rep.rhs_trace_part)
          << ',' << format_double(rep.rhs_diagonal_form) << '\n';
    if (name == "W") {
      const auto corr = wick_cell_corrections(ens.front().grid, ctx);
      const auto sq = parallel_map(ens.size(), [&](std::size_t r) {
        const double v = wick_integral_cylinder(std::get<CylinderFunctional>(F), ens[r], corr).value;
        return v * v;
      });
      out.reports.push_back(mean_report("isometry_W_analytic", cfg.grid_sizes.back(), sq,
                                        0.5 * std::pow(T, 2.0 * ctx.two_h())));
    }
  }
  out.files.emplace_back("isometry_parts.csv", parts.str());
  return out;
}

// --- SDE ------------------------------------------------------------------------------

SuiteOutput suite_sde(const ExperimentConfig& cfg) {
  SuiteOutput out;
  const auto& s = cfg.sde;
  const PhiContext ctx(cfg.hurst);
  const HurstParameter h(cfg.hurst);
  const SdeSpec sde = s.drift == "ou"
                          ? SdeSpec::ornstein_uhlenbeck(s.lambda, s.sigma, s.x0, cfg.horizon)
                          : SdeSpec::zero(s.x0, s.sigma, cfg.horizon);
  MomentCurves oracle;
  if (s.drift == "ou") {
    oracle = fou_oracle(s.lambda, s.sigma, s.x0, s.checkpoints, ctx, s.oracle_cells);
  } else {
    oracle.times = s.checkpoints;
    for (double t : s.checkpoints) {
      oracle.mean.push_back(s.x0);
      oracle.variance.push_back(s.sigma * s.sigma * std::pow(t, ctx.two_h()));
    }
  }
  const std::size_t n = cfg.grid_sizes.back();
  const Generator gen = parse_generator(cfg.generator);
  for (const auto& name : s.solvers) {
    const Solver solver = parse_solver(name);
    auto reps = sde_mc_stats(sde, cfg.n_paths, n, gen, h, cfg.seed, solver, oracle);
    out.reports.insert(out.reports.end(), reps.begin(), reps.end());
  }

  // Pathwise comparisons on a subset of the noise, restricted across the ladder.
  // Direct Euler on each rung is measured against the flow-transform RK4
  // solution on the finest grid, so the slope is the refinement rate of the
  // discrepancy. Flow-Euler and direct Euler are the same recursion up to
  // rounding and are only checked for agreement.
  const std::size_t n_cmp = std::min<std::size_t>(cfg.n_paths, 64);
  const Ensemble noise = generate_ensemble(gen, n, cfg.horizon, h, cfg.seed, n_cmp);
  const auto reference = parallel_map(n_cmp, [&](std::size_t r) {
    return solve_flow_transform(sde, noise[r], Stepper::RK4).path.values;
  });
  ConvergenceTable ladder;
  ladder.name = "sde_euler_vs_flow";
  double worst_identity = 0.0;
  for (std::size_t m : cfg.grid_sizes) {
    const TimeGrid coarse = TimeGrid::uniform(m, cfg.horizon);
    struct Row { double flow_vs_direct, euler_vs_flow; };
    const auto rows = parallel_map(n_cmp, [&](std::size_t r) {
      const SamplePath p = noise[r].restrict_to(coarse);
      const SamplePath ref =
          SamplePath(noise[r].grid, reference[r]).restrict_to(coarse);
      const auto fe = solve_flow_transform(sde, p, Stepper::Euler);
      const auto de = solve_direct_euler(sde, p);
      Row row{0.0, 0.0};
      for (std::size_t i = 0; i < p.values.size(); ++i) {
        row.flow_vs_direct = std::max(row.flow_vs_direct,
                                      std::abs(fe.path.values[i] - de.path.values[i]));
        row.euler_vs_flow = std::max(row.euler_vs_flow,
                                     std::abs(ref.values[i] - de.path.values[i]));
      }
      return row;
    });
    double fd = 0.0;
    CompensatedSum sq;
    ConvergenceRow cr;
    cr.n = m;
    for (const auto& r : rows) {
      fd = std::max(fd, r.flow_vs_direct);
      sq.add(r.euler_vs_flow * r.euler_vs_flow);
      cr.max_abs_residual = std::max(cr.max_abs_residual, r.euler_vs_flow);
    }
    cr.rms_residual = std::sqrt(sq.value() / static_cast<double>(rows.size()));
    ladder.rows.push_back(cr);
    out.reports.push_back(MonteCarloReport::from_check(
        "sde_flow_euler_vs_direct_n" + std::to_string(m), n_cmp, m, fd, 1e-12, fd <= 1e-12));
  }
  {
    std::vector<double> xs, ys;
    for (const auto& r : ladder.rows) {
      xs.push_back(static_cast<double>(r.n));
      ys.push_back(r.rms_residual);
    }
    ladder.slope = loglog_slope(xs, ys);
    out.reports.push_back(slope_report(ladder.name, ladder, n_cmp, -1.0));
  }

  // Picard against RK4 on the finest grid, plus the flow identity and the
  // Gronwall bound for every solver on the comparison paths.
  double picard_gap = 0.0, bound_ratio = 0.0;
  for (std::size_t r = 0; r < n_cmp; ++r) {
    const auto rk = solve_flow_transform(sde, noise[r], Stepper::RK4);
    const auto pc = solve_picard(sde, noise[r], s.picard_tol, s.picard_max_iter);
    for (std::size_t i = 0; i < rk.path.values.size(); ++i) {
      picard_gap = std::max(picard_gap, std::abs(rk.path.values[i] - pc.path.values[i]));
    }
    const double bound = growth_bound(sde, noise[r]);
    for (const auto* res : {&rk, &pc}) {
      for (std::size_t i = 0; i < res->path.values.size(); ++i) {
        const double x = res->path.values[i];
        const double rebuilt = res->y_path.values[i] + sde.sigma * noise[r].values[i];
        worst_identity = std::max(worst_identity,
                                  std::abs(x - rebuilt) / std::max(1.0, std::abs(x)));
        bound_ratio = std::max(bound_ratio, std::abs(x) / bound);
      }
    }
  }
  const double picard_tol = std::max(s.picard_tol, 1e-6);
  out.reports.push_back(MonteCarloReport::from_check("sde_picard_vs_rk4", n_cmp, n, picard_gap,
                                                     picard_tol, picard_gap <= picard_tol));
  out.reports.push_back(MonteCarloReport::from_check("sde_flow_identity", n_cmp, n,
                                                     worst_identity, 1e-14,
                                                     worst_identity <= 1e-14));
  out.reports.push_back(MonteCarloReport::from_check("sde_growth_bound_ratio", n_cmp, n,
                                                     bound_ratio, 1.0, bound_ratio <= 1.0));

  for (const auto& name : s.solvers) {
    std::ostringstream csv;
    write_solver_csv(csv, solve(sde, noise.front(), parse_solver(name), s.picard_tol,
                                s.picard_max_iter),
                     noise.front());
    out.files.emplace_back("solution_" + name + ".csv", csv.str());
  }
  out.files.emplace_back("convergence.csv", convergence_csv({ladder}));
  if (cfg.plots) out.files.emplace_back("loglog_sde_euler_vs_flow.svg", loglog_svg(ladder));
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

bool RunManifest::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const MonteCarloReport& r) { return r.pass; });
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["config_hash"] = config_hash;
  j["tool_version"] = tool_version;
  j["timestamp"] = timestamp;
  j["wall_clock_seconds"] = wall_clock_seconds;
  j["reproducibility"] =
      "CSV files are byte-identical for an identical config and seed, for any "
      "FRACWICK_THREADS value; manifest and SVG files are not covered";
  j["all_pass"] = all_pass();
  auto& v = j["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& r : verdicts) {
    v.push_back({{"test", r.test_name}, {"verdict", r.pass ? "pass" : "fail"}});
  }
  j["files"] = files;
  return j.dump(2) + "\n";
}

SuiteOutput compute_suite(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.suite == "generate") return suite_generate(cfg);
  if (cfg.suite == "verify-ito") return suite_ito(cfg);
  if (cfg.suite == "verify-product-rule") return suite_product(cfg);
  if (cfg.suite == "verify-wentzell") return suite_wentzell(cfg);
  if (cfg.suite == "girsanov") return suite_girsanov(cfg);
  if (cfg.suite == "isometry") return suite_isometry(cfg);
  if (cfg.suite == "solve-sde") return suite_sde(cfg);
  if (cfg.suite == "converge") return suite_converge(cfg);
  throw ConfigError("unknown suite '" + cfg.suite + "'");
}

RunManifest run_suite(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  SuiteOutput result = compute_suite(cfg);
  const auto stop = std::chrono::steady_clock::now();

  RunManifest m;
  m.suite = cfg.suite;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a(cfg.canonical())));
  m.config_hash = hash;
  m.tool_version = kToolVersion;
  m.timestamp = utc_timestamp();
  m.wall_clock_seconds = std::chrono::duration<double>(stop - start).count();
  m.verdicts = result.reports;

  const auto dir = cfg.output_dir / cfg.suite;
  std::filesystem::create_directories(dir);
  result.files.insert(result.files.begin(), {"report.csv", report_csv(result.reports)});
  for (const auto& [name, text] : result.files) {
    write_text_file(dir / name, text);
    m.files.push_back(name);
  }
  m.files.push_back("manifest.json");
  write_text_file(dir / "manifest.json", m.to_json());
  return m;
}

}  // namespace fracwick
