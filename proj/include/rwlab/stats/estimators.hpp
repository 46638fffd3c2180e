#pragma once

// Aggregation of PathRecords into drift, CLT, deviation and gap reports.
// Every function reads records in trial order and is independent of how the
// trials were scheduled.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwlab/error.hpp"
#include "rwlab/stats/basic.hpp"
#include "rwlab/stats/ks.hpp"
#include "rwlab/walk/engine.hpp"

namespace rwlab {

// kappa(Phi_n) (|g_n| in tree mode), or the tracked observable with the given
// index: sigma(Phi_n, g) in outer mode, beta(g_n, x) in tree mode.
struct Observable {
  enum class Kind { kappa, tracked };
  Kind kind = Kind::kappa;
  std::size_t index = 0;

  static Observable kappa() { return {}; }
  static Observable tracked(std::size_t j) { return {Kind::tracked, j}; }

  double at(const PathRecord& r, std::size_t checkpoint) const {
    return kind == Kind::kappa ? r.kappa[checkpoint] : r.sigma[index][checkpoint];
  }
};

inline std::string observable_name(const WalkConfig& cfg, const Observable& o) {
  if (o.kind == Observable::Kind::kappa) return "kappa";
  if (o.index >= cfg.tracked_count()) throw InvalidInput("observable index out of range");
  return cfg.mode == WalkMode::outer ? cfg.tracked_classes[o.index].str() : cfg.tracked_points[o.index].str();
}

inline void check_observable(const ExperimentResult& res, const Observable& o) {
  if (o.kind == Observable::Kind::tracked && o.index >= res.config.tracked_count())
    throw InvalidInput("observable refers to tracked item " + std::to_string(o.index) + ", which is not tracked");
}

inline std::size_t checkpoint_index(const WalkConfig& cfg, std::uint32_t n) {
  for (std::size_t k = 0; k < cfg.checkpoints.size(); ++k)
    if (cfg.checkpoints[k] == n) return k;
  throw InvalidInput("n = " + std::to_string(n) + " is not a configured checkpoint");
}

// horizon: mean of v(H) / H. increment: mean of (v(H) - v(H')) / (H - H'),
// H' the last checkpoint <= H/2; it discards the per-class O(1) offset that
// the horizon estimator divides by H.
enum class DriftEstimator { horizon, increment };

struct ClassDrift {
  std::string name;
  double estimate = 0;
  double std_error = 0;
};

struct DriftEstimate {
  DriftEstimator estimator = DriftEstimator::horizon;
  double lambda_hat = 0;
  double std_error = 0;
  std::vector<ClassDrift> per_class;  // kappa first, then every tracked item
  std::uint32_t horizon = 0;
  std::uint32_t reference = 0;  // H' of the increment estimator, 0 otherwise
  std::size_t trials = 0;
  bool classes_disagree = false;  // some pair differs by > 3 combined standard errors
  double relative_spread = 0;     // (max - min) / |mean| over the tracked classes
};

inline constexpr std::size_t kMinDriftTrials = 30;

inline Estimate drift_of(const ExperimentResult& res, const Observable& o, DriftEstimator est, std::size_t h_idx,
                         std::optional<std::size_t> ref_idx) {
  const auto& cps = res.config.checkpoints;
  std::vector<double> xs;
  xs.reserve(res.records.size());
  for (const auto& r : res.records) {
    if (est == DriftEstimator::horizon)
      xs.push_back(o.at(r, h_idx) / cps[h_idx]);
    else
      xs.push_back((o.at(r, h_idx) - o.at(r, *ref_idx)) / static_cast<double>(cps[h_idx] - cps[*ref_idx]));
  }
  return mean_estimate(xs);
}

inline DriftEstimate drift_estimate(const ExperimentResult& res, const Observable& o,
                                    DriftEstimator est = DriftEstimator::horizon) {
  check_observable(res, o);
  if (res.records.size() < kMinDriftTrials)
    throw InvalidInput("drift estimate needs at least " + std::to_string(kMinDriftTrials) + " trials, got " +
                       std::to_string(res.records.size()));
  const auto& cfg = res.config;
  const std::size_t h_idx = cfg.checkpoints.size() - 1;
  std::optional<std::size_t> ref_idx;
  DriftEstimate d;
  d.estimator = est;
  d.horizon = cfg.checkpoints[h_idx];
  d.trials = res.records.size();
  if (est == DriftEstimator::increment) {
    for (std::size_t k = 0; k < h_idx; ++k)
      if (2 * static_cast<std::uint64_t>(cfg.checkpoints[k]) <= d.horizon) ref_idx = k;
    if (!ref_idx) throw InvalidInput("increment drift estimator needs a checkpoint at or below H/2");
    d.reference = cfg.checkpoints[*ref_idx];
  }
  const Estimate main = drift_of(res, o, est, h_idx, ref_idx);
  d.lambda_hat = main.mean;
  d.std_error = main.std_error;

  std::vector<Observable> rows{Observable::kappa()};
  for (std::size_t j = 0; j < cfg.tracked_count(); ++j) rows.push_back(Observable::tracked(j));
  for (const auto& row : rows) {
    const Estimate e = drift_of(res, row, est, h_idx, ref_idx);
    d.per_class.push_back({observable_name(cfg, row), e.mean, e.std_error});
  }
  if (d.per_class.size() > 2) {
    double lo = d.per_class[1].estimate, hi = lo, sum = 0;
    for (std::size_t a = 1; a < d.per_class.size(); ++a) {
      lo = std::min(lo, d.per_class[a].estimate);
      hi = std::max(hi, d.per_class[a].estimate);
      sum += d.per_class[a].estimate;
      for (std::size_t b = a + 1; b < d.per_class.size(); ++b) {
        const auto& x = d.per_class[a];
        const auto& y = d.per_class[b];
        const double se = std::sqrt(x.std_error * x.std_error + y.std_error * y.std_error);
        if (std::abs(x.estimate - y.estimate) > 3 * se) d.classes_disagree = true;
      }
    }
    const double mean = sum / static_cast<double>(d.per_class.size() - 1);
    d.relative_spread = mean != 0 ? (hi - lo) / std::abs(mean) : 0;
  }
  return d;
}

struct CltReport {
  std::string name;
  std::uint32_t horizon = 0;
  std::vector<double> standardized;  // (v(H) - H lambda) / sqrt(H), by trial
  double variance_hat = 0;
  bool degenerate = false;  // constant samples: no KS test
  std::optional<KsResult> ks;
};

inline constexpr std::size_t kMinCltTrials = 500;

inline CltReport clt_report(const ExperimentResult& res, const Observable& o, double lambda_hat) {
  check_observable(res, o);
  if (res.records.size() < kMinCltTrials)
    throw InvalidInput("CLT report needs at least " + std::to_string(kMinCltTrials) + " trials, got " +
                       std::to_string(res.records.size()));
  CltReport rep;
  rep.name = observable_name(res.config, o);
  const std::size_t h_idx = res.config.checkpoints.size() - 1;
  rep.horizon = res.config.checkpoints[h_idx];
  const double h = rep.horizon;
  std::vector<double> raw;
  for (const auto& r : res.records) {
    raw.push_back(o.at(r, h_idx));
    rep.standardized.push_back((raw.back() - h * lambda_hat) / std::sqrt(h));
  }
  rep.degenerate = std::all_of(raw.begin(), raw.end(), [&](double v) { return v == raw.front(); });
  rep.variance_hat = rep.degenerate ? 0.0 : sample_variance(rep.standardized);
  if (rep.degenerate) return rep;
  if (!(rep.variance_hat > 0)) throw InternalError("zero sample variance for non-constant samples");
  rep.ks = ks_test(rep.standardized, rep.variance_hat);
  return rep;
}

struct DeviationPoint {
  std::uint32_t n = 0;
  double probability = 0;
};

struct DeviationCurve {
  std::string name;
  double epsilon = 0;
  double lambda_hat = 0;
  std::vector<DeviationPoint> points;
  std::optional<double> decay_rate;  // fitted P(n) ~ C rate^n; nullopt when < 2 nonzero points
  bool summable = false;             // rate < 1, or the curve vanishes from some n on

  // Largest increase between consecutive points from index `from` on.
  double max_increase_from(std::size_t from) const {
    double worst = 0;
    for (std::size_t k = from + 1; k < points.size(); ++k)
      worst = std::max(worst, points[k].probability - points[k - 1].probability);
    return worst;
  }
};

// P(|v(n) - n lambda| >= epsilon n) along n_grid.
inline DeviationCurve deviation_curve(const ExperimentResult& res, const Observable& o, double lambda_hat,
                                      double epsilon, const std::vector<std::uint32_t>& n_grid) {
  check_observable(res, o);
  if (res.records.empty()) throw InvalidInput("deviation curve needs records");
  if (n_grid.empty()) throw InvalidInput("deviation curve needs a nonempty grid");
  DeviationCurve c;
  c.name = observable_name(res.config, o);
  c.epsilon = epsilon;
  c.lambda_hat = lambda_hat;
  std::vector<double> ns, ps;
  for (auto n : n_grid) {
    const std::size_t k = checkpoint_index(res.config, n);
    std::size_t hits = 0;
    for (const auto& r : res.records)
      if (std::abs(o.at(r, k) - n * lambda_hat) >= epsilon * n) ++hits;
    c.points.push_back({n, static_cast<double>(hits) / static_cast<double>(res.records.size())});
    ns.push_back(n);
    ps.push_back(c.points.back().probability);
  }
  c.decay_rate = fit_geometric_rate(ns, ps);
  c.summable = c.points.back().probability == 0 || (c.decay_rate && *c.decay_rate < 1);
  return c;
}

struct GapReport {
  std::string name;
  std::uint32_t horizon = 0;
  std::uint32_t half_horizon = 0;
  std::vector<double> sup_gap;       // per trial, sup over checkpoints n <= H
  std::vector<double> sup_gap_half;  // per trial, sup over checkpoints n <= H/2
  double median = 0;
  double median_half = 0;
  double q90 = 0;
  double q90_half = 0;
};

// sup_n |kappa(Phi_n) - sigma(Phi_n, g)| over the checkpoints.
inline GapReport kappa_sigma_gap(const ExperimentResult& res, std::size_t tracked_index) {
  const Observable o = Observable::tracked(tracked_index);
  check_observable(res, o);
  if (res.records.empty()) throw InvalidInput("gap report needs records");
  const auto& cps = res.config.checkpoints;
  GapReport g;
  g.name = observable_name(res.config, o);
  g.horizon = cps.back();
  g.half_horizon = g.horizon / 2;
  for (const auto& r : res.records) {
    double full = 0, half = 0;
    for (std::size_t k = 0; k < cps.size(); ++k) {
      const double gap = std::abs(r.kappa[k] - r.sigma[tracked_index][k]);
      full = std::max(full, gap);
      if (cps[k] <= g.half_horizon) half = std::max(half, gap);
    }
    g.sup_gap.push_back(full);
    g.sup_gap_half.push_back(half);
  }
  g.median = quantile(g.sup_gap, 0.5);
  g.median_half = quantile(g.sup_gap_half, 0.5);
  g.q90 = quantile(g.sup_gap, 0.9);
  g.q90_half = quantile(g.sup_gap_half, 0.9);
  return g;
}

// Total sigma > kappa events across all records (must be zero).
inline std::uint64_t sigma_kappa_violations(const ExperimentResult& res) {
  std::uint64_t v = 0;
  for (const auto& r : res.records) v += r.sigma_kappa_violations;
  return v;
}

}  // namespace rwlab
