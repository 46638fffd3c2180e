#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rwlab/experiments.hpp"
#include "rwlab/stats/estimators.hpp"

using namespace rwlab;

namespace {

WalkConfig every_step(WalkMode mode, std::uint32_t horizon, std::uint64_t trials, std::uint64_t seed) {
  WalkConfig c;
  c.mode = mode;
  c.horizon = horizon;
  c.trials = trials;
  c.seed = seed;
  for (std::uint32_t n = 1; n <= horizon; ++n) c.checkpoints.push_back(n);
  return c;
}

}  // namespace

TEST(BasicStats, QuantileAndMean) {
  EXPECT_DOUBLE_EQ(quantile({3, 1, 2}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.9), 3.7);
  EXPECT_DOUBLE_EQ(quantile({5}, 0.99), 5.0);
  EXPECT_THROW(quantile({}, 0.5), InvalidInput);
  const std::vector<double> xs{1, 2, 3, 4};
  const auto e = mean_estimate(xs);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(5.0 / 3.0 / 4.0));
  EXPECT_DOUBLE_EQ(sample_variance(xs), 5.0 / 3.0);
}

TEST(BasicStats, GeometricRateFit) {
  const std::vector<double> t{1, 2, 3, 4}, p{0.5, 0.25, 0.125, 0.0625};
  ASSERT_TRUE(fit_geometric_rate(t, p).has_value());
  EXPECT_NEAR(*fit_geometric_rate(t, p), 0.5, 1e-12);
  const std::vector<double> zeros{0, 0, 0.1, 0};
  EXPECT_FALSE(fit_geometric_rate(t, zeros).has_value());
}

TEST(Kolmogorov, FrozenReferenceValues) {
  // scipy.special.kolmogorov
  EXPECT_NEAR(kolmogorov_survival(0.2), 0.999999999999495, 1e-13);
  EXPECT_NEAR(kolmogorov_survival(0.5), 0.9639452436648751, 1e-13);
  EXPECT_NEAR(kolmogorov_survival(1.0), 0.26999967167735456, 1e-13);
  EXPECT_NEAR(kolmogorov_survival(1.36), 0.049485876755377876, 1e-13);
  EXPECT_NEAR(kolmogorov_survival(2.0), 0.0006709252557796953, 1e-15);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
  // the two series agree where they meet
  EXPECT_NEAR(kolmogorov_survival(0.2999999), kolmogorov_survival(0.3), 1e-6);
}

TEST(KsTest, FrozenReferenceSample) {
  // scipy.stats.kstest(x, norm(scale=sqrt(1.5)).cdf, method="asymp")
  const std::vector<double> x{0.1, -0.4, 1.3, 0.05, -2.1, 0.7, 0.33, -0.9};
  const auto r = ks_test(x, 1.5);
  EXPECT_NEAR(r.statistic, 0.1588142496316679, 1e-12);
  EXPECT_NEAR(r.p_value, 0.9876608616030065, 1e-10);
}

TEST(KsTest, EdgeCases) {
  const std::vector<double> zeros(50, 0.0);
  EXPECT_DOUBLE_EQ(ks_test(zeros, 1.0).statistic, 0.5);
  EXPECT_THROW(ks_test(std::vector<double>{}, 1.0), InvalidInput);
  EXPECT_THROW(ks_test(zeros, 0.0), InvalidInput);
  EXPECT_THROW(ks_test(zeros, std::nan("")), InvalidInput);
}

TEST(KsTest, QuantileSampleIsClose) {
  // x_i = F^-1((i + 1/2) / m) has D = 1/(2m) exactly
  const int m = 400;
  std::vector<double> x;
  for (int i = 0; i < m; ++i) {
    double lo = -10, hi = 10;
    const double target = (i + 0.5) / m;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (normal_cdf(mid, 2.0) < target ? lo : hi) = mid;
    }
    x.push_back(0.5 * (lo + hi));
  }
  EXPECT_LE(ks_test(x, 2.0).statistic, 1.0 / (2 * m) + 1e-9);
  EXPECT_GT(ks_test(x, 2.0).p_value, 0.999);
}

TEST(KsTest, PermutationInvariant) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x;
  for (int i = 0; i < 300; ++i) x.push_back(z(rng));
  const auto a = ks_test(x, 1.0);
  std::shuffle(x.begin(), x.end(), rng);
  const auto b = ks_test(x, 1.0);
  EXPECT_EQ(a.statistic, b.statistic);
  EXPECT_EQ(a.p_value, b.p_value);
}

TEST(KsTest, CalibratedUnderTheNull) {
  std::mt19937_64 rng(20240917);
  std::normal_distribution<double> z(0.0, std::sqrt(0.7));
  int accepted = 0;
  for (int run = 0; run < 100; ++run) {
    std::vector<double> x;
    for (int i = 0; i < 1000; ++i) x.push_back(z(rng));
    if (ks_test(x, 0.7).p_value > 0.01) ++accepted;
  }
  EXPECT_GE(accepted, 97);
  // and it rejects a wrong variance
  std::vector<double> x;
  for (int i = 0; i < 1000; ++i) x.push_back(z(rng));
  EXPECT_LT(ks_test(x, 1.4).p_value, 1e-6);
}

TEST(Estimators, PointMassHasZeroDriftAndDegenerateClt) {
  auto cfg = every_step(WalkMode::outer, 20, 500, 1);
  cfg.tracked_classes = {cyclic_reduce(parse_word("a", 2)).cls};
  const auto res = run_experiment(point_mass(Automorphism::identity(2)), cfg);
  const auto d = drift_estimate(res, Observable::kappa());
  EXPECT_EQ(d.lambda_hat, 0.0);
  EXPECT_EQ(d.std_error, 0.0);
  const auto c = clt_report(res, Observable::tracked(0), d.lambda_hat);
  EXPECT_TRUE(c.degenerate);
  EXPECT_FALSE(c.ks.has_value());
  const auto dev = deviation_curve(res, Observable::kappa(), 0.0, 0.1, {5, 10, 20});
  for (const auto& p : dev.points) EXPECT_EQ(p.probability, 0.0);
  EXPECT_TRUE(dev.summable);
}

TEST(Estimators, NielsenPointMassGapIsZero) {
  auto cfg = every_step(WalkMode::outer, 20, 30, 1);
  cfg.tracked_classes = {cyclic_reduce(parse_word("a", 2)).cls};
  const auto res = run_experiment(point_mass(Automorphism::elementary(2, Elementary::right(1, 2))), cfg);
  const auto g = kappa_sigma_gap(res, 0);
  EXPECT_EQ(g.median, 0.0);
  EXPECT_EQ(g.q90_half, 0.0);
  EXPECT_EQ(g.half_horizon, 10u);
  EXPECT_EQ(sigma_kappa_violations(res), 0u);
  const auto d = drift_estimate(res, Observable::kappa());
  EXPECT_NEAR(d.lambda_hat, std::log(21.0) / 20, 1e-15);
}

TEST(Estimators, InputChecks) {
  auto cfg = every_step(WalkMode::outer, 10, 20, 1);
  cfg.tracked_classes = {cyclic_reduce(parse_word("a", 2)).cls};
  const auto res = run_experiment(nielsen_f2_measure(), cfg);
  EXPECT_THROW(drift_estimate(res, Observable::kappa()), InvalidInput);  // < 30 trials
  EXPECT_THROW(clt_report(res, Observable::kappa(), 0.1), InvalidInput);
  EXPECT_THROW(deviation_curve(res, Observable::tracked(3), 0.1, 0.1, {5}), InvalidInput);
  EXPECT_THROW(deviation_curve(res, Observable::kappa(), 0.1, 0.1, {11}), InvalidInput);
  EXPECT_THROW(deviation_curve(res, Observable::kappa(), 0.1, 0.1, {}), InvalidInput);
  EXPECT_THROW(tracking_ratios(res, 5), InvalidInput);
  EXPECT_THROW(boundary_samples(res), InvalidInput);
}

TEST(Estimators, IncrementEstimatorUsesHalfHorizon) {
  auto cfg = every_step(WalkMode::outer, 21, 40, 2);
  cfg.checkpoints = {3, 10, 11, 21};
  const auto res = run_experiment(point_mass(Automorphism::elementary(2, Elementary::right(1, 2))), cfg);
  const auto d = drift_estimate(res, Observable::kappa(), DriftEstimator::increment);
  EXPECT_EQ(d.reference, 10u);
  EXPECT_NEAR(d.lambda_hat, (std::log(22.0) - std::log(11.0)) / 11, 1e-15);
  cfg.checkpoints = {21};
  EXPECT_THROW(drift_estimate(run_experiment(nielsen_f2_measure(), cfg), Observable::kappa(), DriftEstimator::increment),
               InvalidInput);
}

TEST(Estimators, TreeSimpleRandomWalkDriftAndVariance) {
  // |g_n| for the simple random walk on F_2: drift 1/2, variance 3/4.
  auto cfg = every_step(WalkMode::tree, 400, 600, 3);
  cfg.tracked_points = {parse_boundary("per:b", 2)};
  cfg.threads = 4;
  const auto res = run_experiment(tree_srw(2), cfg);
  ASSERT_TRUE(res.errors.empty());
  const auto d = drift_estimate(res, Observable::kappa());
  EXPECT_NEAR(d.lambda_hat, 0.5, 5 * d.std_error);
  const auto c = clt_report(res, Observable::kappa(), d.lambda_hat);
  EXPECT_GT(c.variance_hat, 0.6);
  EXPECT_LT(c.variance_hat, 0.9);
  ASSERT_TRUE(c.ks.has_value());
  EXPECT_GT(c.ks->p_value, 0.01);
  const auto tr = tracking_ratios(res, 200);
  EXPECT_EQ(tr.ratios.size() + tr.undecidable, 600u);
}
