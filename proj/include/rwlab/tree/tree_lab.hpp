#pragma once

// Exact (delta = 0) hyperbolic geometry of the Cayley tree of F_N with
// basepoint o = the empty word. Vertices are reduced words; the boundary is
// the space of infinite reduced words.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "rwlab/freegroup/word.hpp"
#include "rwlab/stats/basic.hpp"
#include "rwlab/tree/boundary.hpp"
#include "rwlab/walk/measure.hpp"

namespace rwlab {

// The vertex g . o of the Cayley tree.
struct TreePoint {
  Word word;
  friend bool operator==(const TreePoint&, const TreePoint&) = default;
};

using TreeOrBoundary = std::variant<TreePoint, BoundaryPoint>;

// A Gromov product value; infinite only for two equal boundary points.
class GromovProduct {
 public:
  static GromovProduct finite(std::uint64_t v) { return GromovProduct(v, false); }
  static GromovProduct infinity() { return GromovProduct(0, true); }
  bool is_infinite() const { return infinite_; }
  std::uint64_t value() const {
    if (infinite_) throw InvalidInput("Gromov product is infinite");
    return value_;
  }
  friend bool operator==(const GromovProduct&, const GromovProduct&) = default;

 private:
  GromovProduct(std::uint64_t v, bool inf) : value_(v), infinite_(inf) {}
  std::uint64_t value_;
  bool infinite_;
};

// |u| + |v| - 2 (u|v)_o
inline std::uint64_t tree_distance(const TreePoint& u, const TreePoint& v) {
  return u.word.size() + v.word.size() - 2 * common_prefix(u.word.letters(), v.word.letters());
}

// Common prefix of a finite word and a boundary point.
inline std::size_t common_prefix(const Word& w, const BoundaryPoint& xi) {
  std::size_t k = 0;
  for (; k < w.size(); ++k) {
    const auto l = xi.at(k);
    if (!l)
      throw Undecidable("boundary point " + xi.str() + " is not certified deep enough to compare with '" + w.str() + "'");
    if (*l != w[k]) break;
  }
  return k;
}

// Common prefix of two boundary points, or nullopt when they are equal.
inline std::optional<std::size_t> common_prefix(const BoundaryPoint& x, const BoundaryPoint& y) {
  if (!x.is_truncated() && !y.is_truncated()) {
    // Past both preperiods the words are periodic; agreement on |per x| + |per y|
    // further letters forces equality (Fine-Wilf).
    const std::size_t bound = std::max(x.preperiod().size(), y.preperiod().size()) + x.period().size() + y.period().size();
    for (std::size_t k = 0; k < bound; ++k)
      if (*x.at(k) != *y.at(k)) return k;
    return std::nullopt;
  }
  const std::size_t depth = std::min(x.certified_depth(), y.certified_depth());
  for (std::size_t k = 0; k < depth; ++k)
    if (*x.at(k) != *y.at(k)) return k;
  throw Undecidable("boundary points " + x.str() + " and " + y.str() + " agree to the certified depth " +
                    std::to_string(depth));
}

// (x|y)_o: the length of the common prefix of the two (finite or infinite) words.
inline GromovProduct gromov_product(const TreeOrBoundary& x, const TreeOrBoundary& y) {
  struct Visitor {
    GromovProduct operator()(const TreePoint& a, const TreePoint& b) const {
      return GromovProduct::finite(common_prefix(a.word.letters(), b.word.letters()));
    }
    GromovProduct operator()(const TreePoint& a, const BoundaryPoint& b) const {
      return GromovProduct::finite(common_prefix(a.word, b));
    }
    GromovProduct operator()(const BoundaryPoint& a, const TreePoint& b) const {
      return GromovProduct::finite(common_prefix(b.word, a));
    }
    GromovProduct operator()(const BoundaryPoint& a, const BoundaryPoint& b) const {
      const auto k = common_prefix(a, b);
      return k ? GromovProduct::finite(*k) : GromovProduct::infinity();
    }
  };
  return std::visit(Visitor{}, x, y);
}

// Horofunction of xi normalised at o: h_xi(z) = |z| - 2 (z|xi)_o.
inline std::int64_t horofunction(const BoundaryPoint& xi, const Word& z) {
  return static_cast<std::int64_t>(z.size()) - 2 * static_cast<std::int64_t>(common_prefix(z, xi));
}

// Busemann cocycle beta(g, xi) = h_xi(g^-1 . o).
inline std::int64_t busemann(const Word& g, const BoundaryPoint& xi) { return horofunction(xi, g.inverse()); }

// g . xi, by reducing the seam between g and xi.
inline BoundaryPoint boundary_action(const Word& g, const BoundaryPoint& xi) {
  if (!xi.is_truncated()) {
    std::vector<Letter> pre(xi.preperiod().begin(), xi.preperiod().end());
    while (pre.size() <= g.size()) pre.insert(pre.end(), xi.period().begin(), xi.period().end());
    std::vector<Letter> out(g.begin(), g.end());
    for (Letter l : pre) push_reduced(out, l);
    return BoundaryPoint::periodic(Word::from_reduced(std::move(out)), xi.period());
  }
  const auto gl = g.letters();
  const auto& p = xi.preperiod();
  std::size_t c = 0;
  while (c < gl.size() && c < p.size() && gl[gl.size() - 1 - c] == p[c].inverse()) ++c;
  if (c == xi.certified_depth() && c < gl.size())
    throw Undecidable("g . xi cancels through the certified depth of " + xi.str());
  std::vector<Letter> out(gl.begin(), gl.end() - static_cast<std::ptrdiff_t>(c));
  out.insert(out.end(), p.begin() + static_cast<std::ptrdiff_t>(c), p.end());
  const std::size_t depth = out.size();
  return BoundaryPoint::truncated(Word::from_reduced(std::move(out)), depth);
}

inline TreePoint tree_action(const Word& g, const TreePoint& z) { return {g * z.word}; }

// Distance from w . o to the geodesic ray [o, xi).
inline std::uint64_t tracking_distance(const TreePoint& w, const BoundaryPoint& xi) {
  return w.word.size() - common_prefix(w.word, xi);
}

// kappa(g) = d(g . o, o)
inline std::uint64_t tree_kappa(const Word& g) { return g.size(); }

// Doubled residuals of the two identities relating Gromov products with kappa
// and the Busemann cocycle; both vanish identically in a tree:
//   (go|g xi)_o - (kappa(g) + beta(g, xi)) / 2
//   (go|xi)_o   - (kappa(g) - beta(g^-1, xi)) / 2
struct LemmaResiduals {
  std::int64_t twice_first = 0;
  std::int64_t twice_second = 0;
  double first() const { return twice_first / 2.0; }
  double second() const { return twice_second / 2.0; }
  bool exact_zero() const { return twice_first == 0 && twice_second == 0; }
};

inline LemmaResiduals lemma_identities_check(const Word& g, const BoundaryPoint& xi) {
  if (xi.is_truncated()) throw InvalidInput("lemma identities need an eventually periodic boundary point");
  const auto k = static_cast<std::int64_t>(tree_kappa(g));
  const auto go_gxi = static_cast<std::int64_t>(common_prefix(g, boundary_action(g, xi)));
  const auto go_xi = static_cast<std::int64_t>(common_prefix(g, xi));
  LemmaResiduals r;
  r.twice_first = 2 * go_gxi - (k + busemann(g, xi));
  r.twice_second = 2 * go_xi - (k - busemann(g.inverse(), xi));
  return r;
}

// max(beta(g,x), beta(g,y)) - (kappa(g) - 2 (x|y)_o), nonnegative for x != y.
inline std::int64_t corollary_margin(const Word& g, const BoundaryPoint& x, const BoundaryPoint& y) {
  const auto xy = common_prefix(x, y);
  if (!xy) throw InvalidInput("corollary bound needs distinct boundary points");
  const std::int64_t lhs = std::max(busemann(g, x), busemann(g, y));
  return lhs - (static_cast<std::int64_t>(g.size()) - 2 * static_cast<std::int64_t>(*xy));
}

// Some g with |g| <= max_len attaining equality in the corollary bound.
inline std::optional<Word> corollary_witness(const BoundaryPoint& x, const BoundaryPoint& y, int rank,
                                             std::size_t max_len = 6) {
  std::vector<Word> frontier{Word{}};
  for (std::size_t len = 0; len <= max_len; ++len) {
    std::vector<Word> next;
    for (const auto& g : frontier) {
      if (corollary_margin(g, x, y) == 0) return g;
      if (len == max_len) continue;
      for (int k = 1; k <= rank; ++k)
        for (int s : {1, -1}) {
          const Letter l(k, s);
          if (!g.empty() && g.back() == l.inverse()) continue;
          std::vector<Letter> w(g.begin(), g.end());
          w.push_back(l);
          next.push_back(Word::from_reduced(std::move(w)));
        }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

// Vertices of the geodesic from x to y (both finite).
inline std::vector<Word> geodesic_vertices(const Word& x, const Word& y) {
  const std::size_t c = common_prefix(x.letters(), y.letters());
  std::vector<Word> out;
  for (std::size_t k = x.size(); k > c; --k) out.push_back(x.prefix(k));
  for (std::size_t k = c; k <= y.size(); ++k) out.push_back(y.prefix(k));
  return out;
}

// Horofunction of a finite point x: h_x(z) = d(z, x) - d(o, x).
inline std::int64_t horofunction(const Word& x, const Word& z) {
  return static_cast<std::int64_t>(tree_distance({z}, {x})) - static_cast<std::int64_t>(x.size());
}

inline std::int64_t horofunction(const TreeOrBoundary& p, const Word& z) {
  return std::visit([&](const auto& q) -> std::int64_t {
    if constexpr (std::is_same_v<std::decay_t<decltype(q)>, TreePoint>)
      return horofunction(q.word, z);
    else
      return horofunction(q, z);
  }, p);
}

// Twice the Gromov product from horofunctions, -inf_z (h_x(z) + h_y(z)),
// with z ranging over `zs`.
inline std::int64_t twice_gromov_product_via_horofunctions(const TreeOrBoundary& x, const TreeOrBoundary& y,
                                                           std::span<const Word> zs) {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (const auto& z : zs) best = std::min(best, horofunction(x, z) + horofunction(y, z));
  return -best;
}

// psi(x) = -2 E[(x|y)_o] over y ~ the hitting measure, from boundary samples.
inline Estimate psi_estimate(const BoundaryPoint& x, std::span<const BoundaryPoint> samples) {
  if (samples.empty()) throw InvalidInput("psi estimate needs at least one boundary sample");
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& y : samples) {
    const auto k = common_prefix(x, y);
    if (!k) throw InvalidInput("boundary sample coincides with x: " + x.str());
    v.push_back(-2.0 * static_cast<double>(*k));
  }
  return mean_estimate(v);
}

// E_mu[beta_0(., x)] with beta_0(g, x) = beta(g, x) + psi(g x) - psi(x).
//
// The mu-average is exact (finite support); psi is replaced by its sample
// mean, evaluated on the same samples for every term so the standard error
// accounts for their correlation.
inline Estimate centered_drift_estimate(const TreeMeasure& mu, const BoundaryPoint& x,
                                        std::span<const BoundaryPoint> samples) {
  if (samples.empty()) throw InvalidInput("centering check needs boundary samples");
  double mean_beta = 0;
  std::vector<BoundaryPoint> moved;
  for (const auto& a : mu.atoms()) {
    mean_beta += a.weight * static_cast<double>(busemann(a.element, x));
    moved.push_back(boundary_action(a.element, x));
  }
  std::vector<double> z;
  z.reserve(samples.size());
  for (const auto& y : samples) {
    const auto kx = common_prefix(x, y);
    if (!kx) throw InvalidInput("boundary sample coincides with x");
    double acc = mean_beta + 2.0 * static_cast<double>(*kx);
    for (std::size_t i = 0; i < moved.size(); ++i) {
      const auto k = common_prefix(moved[i], y);
      if (!k) throw InvalidInput("boundary sample coincides with g x");
      acc -= 2.0 * mu.atoms()[i].weight * static_cast<double>(*k);
    }
    z.push_back(acc);
  }
  return mean_estimate(z);
}

struct TailPoint {
  std::uint64_t n = 0;
  double threshold = 0;  // alpha * n
  double probability = 0;
};

struct TailCurve {
  std::vector<TailPoint> points;
  std::optional<double> geometric_rate;  // per unit of Gromov product
};

// Empirical nu*({y : (x|y)_o >= alpha n}) along n_grid, with a geometric fit.
inline TailCurve h2_tail_estimate(const BoundaryPoint& x, double alpha, std::span<const std::uint64_t> n_grid,
                                  std::span<const BoundaryPoint> samples) {
  if (samples.empty()) throw InvalidInput("tail estimate needs boundary samples");
  if (!(alpha > 0)) throw InvalidInput("tail estimate needs alpha > 0");
  std::vector<std::size_t> products;
  for (const auto& y : samples) {
    const auto k = common_prefix(x, y);
    if (!k) throw InvalidInput("boundary sample coincides with x");
    products.push_back(*k);
  }
  TailCurve curve;
  std::vector<double> ts, ps;
  for (auto n : n_grid) {
    TailPoint pt;
    pt.n = n;
    pt.threshold = alpha * static_cast<double>(n);
    std::size_t hits = 0;
    for (auto k : products)
      if (static_cast<double>(k) >= pt.threshold) ++hits;
    pt.probability = static_cast<double>(hits) / static_cast<double>(products.size());
    curve.points.push_back(pt);
    ts.push_back(pt.threshold);
    ps.push_back(pt.probability);
  }
  curve.geometric_rate = fit_geometric_rate(ts, ps);
  return curve;
}

}  // namespace rwlab
