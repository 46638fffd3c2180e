#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "rwlab/error.hpp"

namespace rwlab {

inline double normal_cdf(double x, double variance) { return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance)); }

// P(K > lambda) for the Kolmogorov distribution K, summing the first 100
// terms of 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2). Below lambda = 0.3 the
// alternating series has not converged after 100 terms, so the equivalent
// theta-function form 1 - sqrt(2 pi)/lambda sum exp(-(2k-1)^2 pi^2 / (8 lambda^2))
// is used there instead.
inline double kolmogorov_survival(double lambda) {
  if (!(lambda > 0)) return 1.0;
  double p = 0;
  if (lambda < 0.3) {
    double cdf = 0;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (int k = 1; k <= 100; ++k) {
      const double m = 2.0 * k - 1.0;
      cdf += std::exp(-m * m * pi2 / (8.0 * lambda * lambda));
    }
    p = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * cdf;
  } else {
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      p += (k % 2 == 1 ? 2.0 : -2.0) * term;
    }
  }
  return std::clamp(p, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0;
  double p_value = 1;
};

// One-sample Kolmogorov-Smirnov test against Normal(0, variance).
inline KsResult ks_test(std::span<const double> samples, double variance) {
  if (samples.empty()) throw InvalidInput("KS test needs at least one sample");
  if (!(variance > 0) || !std::isfinite(variance)) throw InvalidInput("KS test needs a positive variance");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double m = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i], variance);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return {d, kolmogorov_survival(std::sqrt(m) * d)};
}

}  // namespace rwlab
