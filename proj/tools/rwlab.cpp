// rwlab: command-line driver for the invariant suites and the Monte Carlo
// experiments. Exit codes: 0 success, 1 computational failure, 2 usage or
// config error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "rwlab/error.hpp"
#include "rwlab/experiments.hpp"
#include "rwlab/io/config.hpp"
#include "rwlab/io/output.hpp"
#include "rwlab/verify/suites.hpp"
#include "rwlab/version.hpp"

namespace {

using namespace rwlab;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct RunOptions {
  std::string config;
  std::string out = "rwlab-out";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

struct VerifyOptions {
  std::string suite = "all";
  std::string out;
  std::uint64_t seed = SuiteOptions{}.seed;
  bool corrupt_candidates = false;
};

ExperimentConfig load(const RunOptions& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (o.seed) {
    cfg.walk.seed = *o.seed;
    cfg.document["seed"] = *o.seed;
  }
  if (o.threads) {
    if (*o.threads < 1) throw ConfigError("--threads must be at least 1");
    cfg.walk.threads = *o.threads;
  }
  return cfg;
}

ExperimentResult run_walk(const ExperimentConfig& cfg) {
  if (cfg.outer_measure) return run_experiment(*cfg.outer_measure, cfg.walk);
  if (cfg.tree_measure) return run_experiment(*cfg.tree_measure, cfg.walk);
  throw ConfigError("this command needs a 'measure'");
}

// Shared tail of every experiment command: report per-trial errors, write the
// outputs and the manifest.
int finish(const std::string& command, const RunOptions& o, const ExperimentConfig& cfg, const ExperimentResult& res,
           OutputSet& out, json summary) {
  summary["command"] = command;
  summary["trials_ok"] = res.records.size();
  summary["errors"] = errors_json(res.errors);
  summary["sigma_kappa_violations"] = sigma_kappa_violations(res);
  out.add("summary.json", summary.dump(2) + "\n");
  out.write(o.out, command, cfg.document, cfg.walk.seed);
  for (const auto& e : res.errors) std::cerr << "trial " << e.trial << ": " << e.message << "\n";
  if (!res.errors.empty()) {
    std::cerr << res.errors.size() << " trial(s) failed\n";
    return kExitFailure;
  }
  if (sigma_kappa_violations(res) > 0) {
    std::cerr << "sigma > kappa at " << sigma_kappa_violations(res) << " checkpoint(s)\n";
    return kExitFailure;
  }
  return kExitOk;
}

DriftEstimate drift_for(const ExperimentConfig& cfg, const ExperimentResult& res) {
  return drift_estimate(res, cfg.observable(), cfg.stats.drift_estimator);
}

int cmd_drift(const RunOptions& o) {
  const auto cfg = load(o);
  const auto res = run_walk(cfg);
  const auto d = drift_for(cfg, res);
  std::printf("lambda_hat = %.6f +- %.6f  (%s, H = %u, %zu trials)\n", d.lambda_hat, d.std_error,
              observable_name(cfg.walk, cfg.observable()).c_str(), d.horizon, d.trials);
  for (const auto& c : d.per_class) std::printf("  %-24s %.6f +- %.6f\n", c.name.c_str(), c.estimate, c.std_error);
  if (d.per_class.size() > 2) std::printf("relative spread over tracked items: %.4f\n", d.relative_spread);
  OutputSet out;
  out.add("drift.csv", drift_csv(d));
  return finish("drift", o, cfg, res, out, {{"drift", to_json(d)}});
}

int cmd_clt(const RunOptions& o) {
  const auto cfg = load(o);
  const auto res = run_walk(cfg);
  // Standardize with the end-of-horizon mean so the samples are centered.
  const auto d = drift_estimate(res, cfg.observable(), DriftEstimator::horizon);
  const auto c = clt_report(res, cfg.observable(), d.lambda_hat);
  if (c.degenerate) {
    std::printf("degenerate distribution: all samples equal, variance 0, no KS test\n");
  } else {
    std::printf("variance_hat = %.6f  KS D = %.5f  p = %.4f  (lambda_hat = %.6f, H = %u)\n", c.variance_hat,
                c.ks->statistic, c.ks->p_value, d.lambda_hat, c.horizon);
  }
  OutputSet out;
  out.add("clt.csv", clt_csv(c, res.records));
  return finish("clt", o, cfg, res, out, {{"drift", to_json(d)}, {"clt", to_json(c)}});
}

int cmd_deviation(const RunOptions& o) {
  const auto cfg = load(o);
  const auto res = run_walk(cfg);
  const auto d = drift_for(cfg, res);
  const double eps = cfg.stats.epsilon ? *cfg.stats.epsilon : cfg.stats.epsilon_factor * d.lambda_hat;
  if (!(eps > 0))
    throw ConfigError("epsilon is zero (lambda_hat = 0); set stats.epsilon explicitly");
  const auto grid = cfg.stats.n_grid.empty() ? cfg.walk.checkpoints : cfg.stats.n_grid;
  const auto c = deviation_curve(res, cfg.observable(), d.lambda_hat, eps, grid);
  std::printf("epsilon = %.6f  lambda_hat = %.6f\n", eps, d.lambda_hat);
  for (const auto& p : c.points) std::printf("  n = %-8u P = %.5f\n", p.n, p.probability);
  if (c.decay_rate) std::printf("fitted geometric rate %.6f per step\n", *c.decay_rate);
  OutputSet out;
  out.add("deviation.csv", deviation_csv(c));
  return finish("deviation", o, cfg, res, out, {{"drift", to_json(d)}, {"deviation", to_json(c)}});
}

int cmd_gap(const RunOptions& o) {
  const auto cfg = load(o);
  if (cfg.walk.tracked_count() == 0) throw ConfigError("the gap report needs a 'tracked' entry");
  const auto res = run_walk(cfg);
  const auto g = kappa_sigma_gap(res, cfg.stats.gap_class);
  std::printf("sup gap for %s: median %.5f at H = %u, %.5f at H/2 = %u (q90 %.5f, %.5f)\n", g.name.c_str(), g.median,
              g.horizon, g.median_half, g.half_horizon, g.q90, g.q90_half);
  OutputSet out;
  out.add("gap.csv", gap_csv(g, res.records));
  return finish("gap", o, cfg, res, out, {{"gap", to_json(g)}});
}

int cmd_tree_lab(const RunOptions& o) {
  const auto cfg = load(o);
  if (!cfg.tree_measure) throw ConfigError("tree-lab needs a tree-mode config");
  if (cfg.tree_lab.x_points.empty() && !cfg.tree_lab.tail_point)
    throw ConfigError("tree-lab needs 'tree_lab.x_points' or 'tree_lab.tail_point'");
  const auto res = run_walk(cfg);
  OutputSet out;
  json summary;
  if (!cfg.tree_lab.x_points.empty()) {
    const auto c = centering_check(*cfg.tree_measure, res, cfg.tree_lab.x_points, cfg.stats.tolerance_sigmas);
    std::printf("lambda_hat = %.6f +- %.6f\n", c.drift.lambda_hat, c.drift.std_error);
    for (const auto& r : c.rows)
      std::printf("  x = %-16s E[beta_0] = %.6f +- %.6f  %s\n", r.x.str().c_str(), r.estimate.mean, r.estimate.std_error,
                  r.within_tolerance ? "within" : "OUTSIDE");
    out.add("centering.csv", centering_csv(c));
    summary["centering"] = to_json(c);
  }
  if (cfg.tree_lab.tail_point) {
    auto grid = cfg.tree_lab.n_grid;
    if (grid.empty())
      for (std::uint64_t n = 1; n <= 12; ++n) grid.push_back(n);
    const auto t = h2_tail(res, *cfg.tree_lab.tail_point, cfg.tree_lab.alpha, grid);
    std::printf("tail at x = %s:", cfg.tree_lab.tail_point->str().c_str());
    for (const auto& p : t.points) std::printf(" %.4f", p.probability);
    std::printf("\n");
    if (t.geometric_rate) std::printf("fitted geometric rate %.5f\n", *t.geometric_rate);
    out.add("h2_tail.csv", h2_csv(t));
    summary["h2_tail"] = to_json(t);
  }
  // Tracking at the last checkpoint at or below H/2; at H itself the distance
  // to the estimated ray is 0 by construction.
  std::optional<std::uint32_t> mid;
  for (auto n : cfg.walk.checkpoints)
    if (2 * static_cast<std::uint64_t>(n) <= cfg.walk.horizon) mid = n;
  if (mid) {
    const auto tr = tracking_ratios(res, *mid);
    if (!tr.ratios.empty()) {
      const double q99 = quantile(tr.ratios, 0.99);
      summary["tracking"] = {{"n", *mid}, {"q99_ratio", q99}, {"undecidable", tr.undecidable}};
      std::printf("tracking distance / n at n = %u: q99 = %.5f (%zu undecidable)\n", *mid, q99, tr.undecidable);
    }
  }
  return finish("tree-lab", o, cfg, res, out, summary);
}

int cmd_distance(const RunOptions& o) {
  const auto cfg = load(o);
  if (!cfg.distance) throw ConfigError("distance needs a 'distance' entry with 'from' and 'to'");
  const auto& [t, u] = *cfg.distance;
  const auto tu = lipschitz_distance_exact(t, u);
  const auto ut = lipschitz_distance_exact(u, t);
  const std::string tu_arg = CandidateSet::for_point(t).words[tu.argmax].str();
  const std::string ut_arg = CandidateSet::for_point(u).words[ut.argmax].str();
  const double sym = std::max(tu.value, ut.value);
  std::printf("d(from, to) = log(%s) = %.17g  via %s\n", tu.ratio.str().c_str(), tu.value, tu_arg.c_str());
  std::printf("d(to, from) = log(%s) = %.17g  via %s\n", ut.ratio.str().c_str(), ut.value, ut_arg.c_str());
  std::printf("sym = %.17g\n", sym);
  auto side = [](const DistanceResult& r, const std::string& arg) {
    return json{{"ratio", r.ratio.str()}, {"log", r.value}, {"candidate", arg}};
  };
  OutputSet out;
  out.add("summary.json", json{{"command", "distance"}, {"from_to", side(tu, tu_arg)}, {"to_from", side(ut, ut_arg)}, {"sym", sym}}.dump(2) + "\n");
  out.write(o.out, "distance", cfg.document, cfg.walk.seed);
  return kExitOk;
}

int cmd_verify(const VerifyOptions& v) {
  SuiteOptions opt;
  opt.seed = v.seed;
  opt.corrupt_candidates = v.corrupt_candidates;
  const auto reports = run_suite(v.suite, opt);
  json all = json::array();
  bool ok = true;
  for (const auto& rep : reports) {
    for (const auto& c : rep.checks) {
      std::printf("%-12s %-32s %s  (%zu cases", rep.suite.c_str(), c.name.c_str(), c.passed() ? "PASS" : "FAIL", c.cases);
      if (!c.passed()) std::printf(", %zu failures; first: %s", c.failures, c.first_failure.c_str());
      std::printf(")\n");
    }
    ok = ok && rep.passed();
    all.push_back(rep.to_json());
  }
  const json report{{"suite", v.suite}, {"passed", ok}, {"reports", all}};
  if (!ok) std::cerr << report.dump() << "\n";
  if (!v.out.empty()) {
    OutputSet out;
    out.add("verify.json", report.dump(2) + "\n");
    out.write(v.out, "verify", json{{"suite", v.suite}}, v.seed);
  }
  return ok ? kExitOk : kExitFailure;
}

void add_run_flags(CLI::App* sub, RunOptions& o) {
  sub->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory")->capture_default_str();
  sub->add_option("--seed", o.seed, "override the config seed");
  sub->add_option("--threads", o.threads, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks on free groups, outer space and trees"};
  app.set_version_flag("--version", std::string(rwlab::kVersion));
  app.require_subcommand(1);

  VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "run the exact invariant suites");
  v->add_option("--suite", verify.suite, "algebra, outer-space, tree or all")
      ->check(CLI::IsMember(rwlab::suite_names()))
      ->capture_default_str();
  v->add_option("--out", verify.out, "write verify.json and a manifest here");
  v->add_option("--seed", verify.seed, "instance generator seed")->capture_default_str();
  // Test fixture: drops the figure-eight candidates so white-equality fails.
  v->add_flag("--corrupt-candidates", verify.corrupt_candidates)->group("");

  RunOptions run;
  std::function<int(const RunOptions&)> action;
  const std::vector<std::tuple<std::string, std::string, int (*)(const RunOptions&)>> commands{
      {"drift", "drift estimate per observable", cmd_drift},
      {"clt", "standardized end values, variance and KS test", cmd_clt},
      {"deviation", "empirical deviation curve", cmd_deviation},
      {"distance", "Lipschitz distances between two rose points", cmd_distance},
      {"tree-lab", "centering check, H2 tail and tracking in the tree", cmd_tree_lab},
      {"gap", "sup |kappa - sigma| boundedness diagnostic", cmd_gap},
  };
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_run_flags(sub, run);
    sub->callback([&action, fn = fn] { action = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (v->parsed()) return cmd_verify(verify);
    return action(run);
  } catch (const rwlab::ConfigError& e) {
    std::cerr << "config error: " << run.config;
    if (e.line() > 0) std::cerr << ":line " << e.line();
    std::cerr << ": " << e.message() << "\n";
    return kExitUsage;
  } catch (const rwlab::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
