#pragma once

// Stock measures and the tree-lab experiments that combine walk records
// with the exact tree geometry.

#include <cmath>
#include <string>
#include <vector>

#include "rwlab/freegroup/automorphism.hpp"
#include "rwlab/stats/estimators.hpp"
#include "rwlab/tree/tree_lab.hpp"
#include "rwlab/walk/engine.hpp"
#include "rwlab/walk/measure.hpp"

namespace rwlab {

// Simple random walk: uniform on the 2N generators and their inverses.
inline TreeMeasure tree_srw(int rank) {
  check_rank(rank);
  std::vector<Word> gens;
  for (int k = 1; k <= rank; ++k)
    for (int s : {1, -1}) gens.push_back(Word{Letter(k, s)});
  return TreeMeasure::uniform(std::move(gens));
}

// Uniform on {Phi1, Phi1^-1, Phi2, Phi2^-1}, Phi1: a -> ab, Phi2: b -> ba.
inline OuterMeasure nielsen_f2_measure() {
  const auto p1 = Automorphism::elementary(2, Elementary::right(1, 2));
  const auto p2 = Automorphism::elementary(2, Elementary::right(2, 1));
  return OuterMeasure::uniform({p1, invert(p1), p2, invert(p2)});
}

template <class Element>
Measure<Element> point_mass(Element e) {
  return Measure<Element>::uniform({std::move(e)});
}

// Boundary estimates bnd of each successful tree-mode trial.
inline std::vector<BoundaryPoint> boundary_samples(const ExperimentResult& res) {
  std::vector<BoundaryPoint> out;
  for (const auto& r : res.records)
    if (r.boundary) out.push_back(*r.boundary);
  if (out.empty()) throw InvalidInput("no boundary samples: the experiment must run in tree mode");
  return out;
}

struct CenteringRow {
  BoundaryPoint x;
  Estimate estimate;         // E_mu[beta_0(., x)]
  double discrepancy = 0;    // |estimate - lambda_hat|
  double combined_se = 0;    // sqrt(se_x^2 + se_lambda^2)
  bool within_tolerance = false;
};

struct CenteringReport {
  DriftEstimate drift;
  std::vector<CenteringRow> rows;
  double max_pairwise_discrepancy = 0;
  double max_discrepancy_from_drift = 0;
  double tolerance_sigmas = 3;
  bool all_within() const {
    for (const auto& r : rows)
      if (!r.within_tolerance) return false;
    return true;
  }
};

// Centered drift E_mu[beta_0(., x)] for each x, with psi integrated against
// the boundary samples of `res` (laws of lim g_n^-1 o), compared to the drift
// of |g_n| from the same records.
inline CenteringReport centering_check(const TreeMeasure& mu, const ExperimentResult& res,
                                       const std::vector<BoundaryPoint>& x_points, double tolerance_sigmas = 3) {
  if (x_points.empty()) throw InvalidInput("centering check needs at least one boundary point x");
  CenteringReport rep;
  rep.tolerance_sigmas = tolerance_sigmas;
  rep.drift = drift_estimate(res, Observable::kappa());
  const auto samples = boundary_samples(res);
  for (const auto& x : x_points) {
    CenteringRow row{x, centered_drift_estimate(mu, x, samples)};
    row.discrepancy = std::abs(row.estimate.mean - rep.drift.lambda_hat);
    row.combined_se = std::hypot(row.estimate.std_error, rep.drift.std_error);
    row.within_tolerance = row.discrepancy <= tolerance_sigmas * row.combined_se;
    rep.max_discrepancy_from_drift = std::max(rep.max_discrepancy_from_drift, row.discrepancy);
    rep.rows.push_back(std::move(row));
  }
  for (std::size_t a = 0; a < rep.rows.size(); ++a)
    for (std::size_t b = a + 1; b < rep.rows.size(); ++b)
      rep.max_pairwise_discrepancy =
          std::max(rep.max_pairwise_discrepancy, std::abs(rep.rows[a].estimate.mean - rep.rows[b].estimate.mean));
  return rep;
}

inline TailCurve h2_tail(const ExperimentResult& res, const BoundaryPoint& x, double alpha,
                         const std::vector<std::uint64_t>& n_grid) {
  return h2_tail_estimate(x, alpha, n_grid, boundary_samples(res));
}

// Tracking distances d(g_n^-1 o, [o, bnd)) / n at checkpoint n over the
// trials where the distance was decidable, with the number of undecidable ones.
struct TrackingSummary {
  std::vector<double> ratios;
  std::size_t undecidable = 0;
};

inline TrackingSummary tracking_ratios(const ExperimentResult& res, std::uint32_t n) {
  const std::size_t k = checkpoint_index(res.config, n);
  TrackingSummary s;
  for (const auto& r : res.records) {
    if (r.tracking.size() <= k) throw InvalidInput("records carry no tracking data (tree mode only)");
    if (r.tracking[k] < 0)
      ++s.undecidable;
    else
      s.ratios.push_back(static_cast<double>(r.tracking[k]) / n);
  }
  return s;
}

}  // namespace rwlab
