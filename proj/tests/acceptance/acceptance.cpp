// Acceptance driver: one PASS/FAIL line per criterion, exit 0 only if all pass.
// Experiments 3-8 run in-process from the shipped configs; criterion 9 drives
// the CLI binary at 1 and 8 workers and compares the output bytes.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "rwlab/experiments.hpp"
#include "rwlab/io/config.hpp"
#include "rwlab/verify/suites.hpp"

namespace fs = std::filesystem;
using namespace rwlab;

namespace {

// Tolerances and budgets.
constexpr double kBudget1 = 30, kBudget2 = 120, kBudget3 = 300, kBudget4 = 900, kBudget5 = 300;
constexpr double kDriftLo = 0.48, kDriftHi = 0.52;
constexpr double kVarLo = 0.67, kVarHi = 0.83, kTreeVariance = 0.75;
constexpr double kKsAlpha = 0.01;
constexpr double kMinSigmas = 5;
constexpr double kMaxRelativeSpread = 0.05;
constexpr double kEpsilonFactor = 0.2;
constexpr double kFinalExceedance = 0.05;
constexpr double kGapRelative = 0.2;
constexpr double kCenteringSigmas = 3;
constexpr double kMaxTailRate = 0.9;
constexpr std::size_t kTreeGapIndex = 1;  // per:a in tree_srw_f2.json

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Verdict& v, double secs, double budget = 0) {
  Verdict out = v;
  if (budget > 0 && secs >= budget) {
    out.pass = false;
    out.detail += fmt("; over budget %.0f s", budget);
  }
  if (!out.pass) ++failures;
  std::printf("criterion %d %s  %-28s %s  [%.1f s%s]\n", id, out.pass ? "PASS" : "FAIL", title.c_str(),
              out.detail.c_str(), secs, budget > 0 ? fmt(" < %.0f s", budget).c_str() : "");
  std::fflush(stdout);
}

struct Run {
  ExperimentConfig cfg;
  ExperimentResult res;
  double secs = 0;
};

Run run_config(const fs::path& path) {
  Run r;
  r.cfg = load_config(path.string());
  r.cfg.walk.threads = std::max(1u, std::thread::hardware_concurrency());
  const auto t0 = Clock::now();
  r.res = r.cfg.outer_measure ? run_experiment(*r.cfg.outer_measure, r.cfg.walk)
                              : run_experiment(*r.cfg.tree_measure, r.cfg.walk);
  r.secs = seconds_since(t0);
  return r;
}

std::string errors_note(const ExperimentResult& res) {
  return res.errors.empty() ? "" : fmt("; %zu failed trials (first: %s)", res.errors.size(), res.errors[0].message.c_str());
}

const CheckResult* check_named(const std::vector<SuiteReport>& reps, const std::string& name) {
  for (const auto& r : reps)
    for (const auto& c : r.checks)
      if (c.name == name) return &c;
  return nullptr;
}

// Criterion 5 on one experiment: non-increasing past the first quartile of the
// grid and below the final threshold.
Verdict deviation_verdict(const Run& r) {
  const auto d = drift_estimate(r.res, r.cfg.observable(), r.cfg.stats.drift_estimator);
  const auto grid = r.cfg.stats.n_grid.empty() ? r.cfg.walk.checkpoints : r.cfg.stats.n_grid;
  const auto c = deviation_curve(r.res, r.cfg.observable(), d.lambda_hat, kEpsilonFactor * d.lambda_hat, grid);
  const double rise = c.max_increase_from(c.points.size() / 4);
  const double last = c.points.back().probability;
  std::string curve;
  for (const auto& p : c.points) curve += fmt("%s%.4f", curve.empty() ? "" : " ", p.probability);
  return {r.res.errors.empty() && rise <= 0 && last < kFinalExceedance,
          fmt("eps %.4g: P = [%s], max rise %.4f, final %.4f", c.epsilon, curve.c_str(), rise, last) + errors_note(r.res)};
}

Verdict gap_verdict(const ExperimentResult& res, std::size_t index) {
  const auto g = kappa_sigma_gap(res, index);
  const bool ok = std::abs(g.median - g.median_half) <= kGapRelative * g.median_half;
  return {ok && res.errors.empty(), fmt("%s: median %.4f (H = %u) vs %.4f (H/2), q90 %.4f vs %.4f", g.name.c_str(), g.median,
                                        g.horizon, g.median_half, g.q90, g.q90_half) + errors_note(res)};
}

Verdict centering_verdict(const Run& r) {
  const auto c = centering_check(*r.cfg.tree_measure, r.res, r.cfg.tree_lab.x_points, kCenteringSigmas);
  double worst = 0;
  for (const auto& row : c.rows) worst = std::max(worst, row.discrepancy / row.combined_se);
  return {c.all_within() && c.rows.size() >= 5,
          fmt("lambda %.4f, %zu points, worst %.2f se", c.drift.lambda_hat, c.rows.size(), worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Runs `cli cmd` at 1 and 8 workers and compares every output file.
Verdict determinism_case(const std::string& cli, const fs::path& configs, const fs::path& work, const std::string& cmd,
                         const std::string& config) {
  fs::create_directories(work);
  std::map<int, fs::path> dirs;
  for (int t : {1, 8}) {
    dirs[t] = work / fmt("%s-%s-%d", cmd.c_str(), config.c_str(), t);
    fs::remove_all(dirs[t]);
    const std::string line = fmt("\"%s\" %s --config \"%s\" --out \"%s\" --threads %d > \"%s.log\" 2>&1", cli.c_str(),
                                 cmd.c_str(), (configs / (config + ".json")).c_str(), dirs[t].c_str(), t,
                                 dirs[t].c_str());
    if (std::system(line.c_str()) != 0) return {false, cmd + " " + config + fmt(" failed at %d threads", t)};
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dirs[1])) {
    ++files;
    if (slurp(e.path()) != slurp(dirs[8] / e.path().filename()))
      return {false, cmd + " " + config + ": " + e.path().filename().string() + " differs"};
  }
  return {files > 1, fmt("%s %s: %zu files identical", cmd.c_str(), config.c_str(), files)};
}

// Evaluates `body`, turning exceptions into a failed verdict.
Verdict guarded(const std::function<Verdict()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rwlab acceptance criteria"};
  std::string cli;
  std::string configs_dir;
  std::string work_dir = "acceptance-work";
  app.add_option("--cli", cli, "path to the rwlab binary")->required();
  app.add_option("--configs", configs_dir, "directory with the shipped configs")->required();
  app.add_option("--work", work_dir, "scratch directory");
  CLI11_PARSE(app, argc, argv);
  const fs::path configs(configs_dir), work(work_dir);
  fs::create_directories(work);

  // 1: exact identities, without the (slow) oracle comparison.
  {
    const auto t0 = Clock::now();
    const Verdict v = guarded([] {
      SuiteOptions o;
      o.white_pairs_f2 = o.white_pairs_f3 = 0;
      const std::vector<SuiteReport> reps{outer_space_suite(o), tree_suite(o)};
      const std::vector<std::pair<std::string, std::size_t>> need{
          {"length-cocycle", 20000}, {"busemann-cocycle", 10000}, {"lemma-residuals", 100000}, {"four-point-delta-zero", 100000}};
      Verdict out{true, ""};
      for (const auto& [name, cases] : need) {
        const auto* c = check_named(reps, name);
        const bool ok = c && c->passed() && c->cases >= cases;
        out.pass = out.pass && ok;
        out.detail += fmt("%s%s %zu/%zu", out.detail.empty() ? "" : ", ", name.c_str(), c ? c->cases - c->failures : 0,
                          c ? c->cases : 0);
      }
      return out;
    });
    report(1, "exactness suite", v, seconds_since(t0), kBudget1);
  }

  // 2: candidate maximum against the brute-force oracle.
  {
    const auto t0 = Clock::now();
    const Verdict v = guarded([] {
      SuiteOptions o;
      o.cocycle_cases = 0;
      o.algebra_cases = 0;
      const auto rep = outer_space_suite(o);
      const auto* c = check_named({rep}, "white-equality");
      const std::size_t need = o.white_pairs_f2 + o.white_pairs_f3;
      return Verdict{c && c->passed() && c->cases == need,
                     c ? fmt("%zu/%zu pairs equal (F2 len <= %d, F3 len <= %d)%s", c->cases - c->failures, c->cases,
                             o.white_len_f2, o.white_len_f3, c->passed() ? "" : ("; " + c->first_failure).c_str())
                       : std::string("check missing")};
    });
    report(2, "oracle equivalence", v, seconds_since(t0), kBudget2);
  }

  // The tree simple random walk feeds criteria 3, 5, 6, 7 and 8.
  std::optional<Run> srw;
  std::string srw_error;
  try {
    srw = run_config(configs / "tree_srw_f2.json");
  } catch (const std::exception& e) {
    srw_error = e.what();
  }
  auto need_srw = [&]() -> const Run& {
    if (!srw) throw std::runtime_error("tree_srw_f2 run failed: " + srw_error);
    return *srw;
  };

  // 3: tree calibration.
  {
    const auto t0 = Clock::now();
    const Verdict v = guarded([&] {
      const Run& r = need_srw();
      const auto d = drift_estimate(r.res, Observable::kappa());
      const auto c = clt_report(r.res, Observable::kappa(), d.lambda_hat);
      const auto ks = ks_test(c.standardized, kTreeVariance);
      const bool ok = r.res.errors.empty() && r.res.records.size() == 1000 && r.cfg.walk.horizon == 2000 &&
                      d.lambda_hat >= kDriftLo && d.lambda_hat <= kDriftHi && c.variance_hat >= kVarLo &&
                      c.variance_hat <= kVarHi && ks.p_value > kKsAlpha;
      return Verdict{ok, fmt("drift %.4f +- %.4f, variance %.4f, KS vs N(0, 0.75) D %.4f p %.3f", d.lambda_hat,
                             d.std_error, c.variance_hat, ks.statistic, ks.p_value) + errors_note(r.res)};
    });
    report(3, "tree calibration", v, seconds_since(t0) + (srw ? srw->secs : 0), kBudget3);
  }

  // 4: Out(F_2) drift and CLT.
  std::optional<Run> outer;
  {
    const auto t0 = Clock::now();
    const Verdict v = guarded([&] {
      outer = run_config(configs / "outer_f2_exact.json");
      const Run& r = *outer;
      const auto d = drift_estimate(r.res, Observable::kappa(), r.cfg.stats.drift_estimator);
      const auto h = drift_estimate(r.res, Observable::kappa());
      const auto c = clt_report(r.res, Observable::kappa(), h.lambda_hat);
      const auto viol = sigma_kappa_violations(r.res);
      const double sigmas = d.lambda_hat / d.std_error;
      const bool ok = r.res.errors.empty() && r.res.records.size() >= 2000 && r.cfg.walk.tracked_count() == 5 &&
                      sigmas > kMinSigmas && d.relative_spread <= kMaxRelativeSpread && c.ks &&
                      c.ks->p_value > kKsAlpha && viol == 0;
      return Verdict{ok, fmt("H %u, %zu trials: lambda %.4f (%.1f se), class spread %.4f, V %.4f KS p %.3f, "
                             "%llu violations",
                             r.cfg.walk.horizon, r.res.records.size(), d.lambda_hat, sigmas, d.relative_spread,
                             c.variance_hat, c.ks ? c.ks->p_value : 0.0, static_cast<unsigned long long>(viol)) +
                             errors_note(r.res)};
    });
    report(4, "Out(F2) CLT", v, seconds_since(t0), kBudget4);
  }

  // 5: deviation curves for both measures.
  {
    const auto t0 = Clock::now();
    double extra = srw ? srw->secs : 0;
    const Verdict v = guarded([&] {
      const Verdict tree = deviation_verdict(need_srw());
      const Run lengths = run_config(configs / "outer_f2_lengths.json");
      const Verdict out = deviation_verdict(lengths);
      return Verdict{tree.pass && out.pass, "tree " + tree.detail + " | Out " + out.detail};
    });
    report(5, "deviation principle", v, seconds_since(t0) + extra, kBudget5);
  }

  // 6: boundedness of sup |kappa - sigma|.
  {
    const auto t0 = Clock::now();
    const Verdict v = guarded([&] {
      const Run gap = run_config(configs / "outer_f2_gap.json");
      const Verdict out = gap_verdict(gap.res, gap.cfg.stats.gap_class);
      const Verdict tree = gap_verdict(need_srw().res, kTreeGapIndex);
      return Verdict{out.pass && tree.pass, "Out " + out.detail + " | tree " + tree.detail};
    });
    report(6, "boundedness diagnostic", v, seconds_since(t0));
  }

  // 7: centered drift at five boundary points, two measures.
  {
    const auto t0 = Clock::now();
    const Verdict v = guarded([&] {
      const Verdict a = centering_verdict(need_srw());
      const Verdict b = centering_verdict(run_config(configs / "tree_biased_f2.json"));
      return Verdict{a.pass && b.pass, "SRW " + a.detail + " | biased " + b.detail};
    });
    report(7, "centering check", v, seconds_since(t0));
  }

  // 8: geometric tail of the Gromov product with b^inf.
  {
    const auto t0 = Clock::now();
    const Verdict v = guarded([&] {
      const Run& r = need_srw();
      const auto x = parse_boundary("per:b", 2);
      const auto t = h2_tail(r.res, x, r.cfg.tree_lab.alpha, r.cfg.tree_lab.n_grid);
      std::string pts;
      for (const auto& p : t.points) pts += fmt("%s%.4f", pts.empty() ? "" : " ", p.probability);
      return Verdict{t.geometric_rate && *t.geometric_rate < kMaxTailRate,
                     t.geometric_rate ? fmt("rate %.4f, tail [%s]", *t.geometric_rate, pts.c_str())
                                      : "no geometric fit (fewer than two nonzero points)"};
    });
    report(8, "H2 tail", v, seconds_since(t0));
  }

  // 9: byte-identical outputs at 1 and 8 workers.
  {
    const auto t0 = Clock::now();
    const Verdict v = guarded([&] {
      Verdict all{true, ""};
      for (const auto& [cmd, cfg] : std::vector<std::pair<std::string, std::string>>{{"drift", "outer_f2_exact"},
                                                                                    {"deviation", "outer_f2_lengths"},
                                                                                    {"gap", "outer_f2_gap"},
                                                                                    {"tree-lab", "tree_srw_f2"},
                                                                                    {"clt", "tree_biased_f2"}}) {
        const Verdict one = determinism_case(cli, configs, work / "determinism", cmd, cfg);
        all.pass = all.pass && one.pass;
        all.detail += (all.detail.empty() ? "" : "; ") + one.detail;
      }
      return all;
    });
    report(9, "determinism", v, seconds_since(t0));
  }

  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
