#include <gtest/gtest.h>

#include "rwlab/tree/tree_lab.hpp"
#include "rwlab/verify/random.hpp"

using namespace rwlab;

namespace {

Word w(const char* s) { return parse_word(s, 2); }
BoundaryPoint bp(const char* s, int rank = 2) { return parse_boundary(s, rank); }

// h_xi(z) as the limit of d(z, xi_k) - k, with xi_k a long enough prefix.
std::int64_t limit_horofunction(const BoundaryPoint& xi, const Word& z) {
  const std::size_t k = z.size() + xi.preperiod().size() + 2 * xi.period().size() + 2;
  return static_cast<std::int64_t>(tree_distance({z}, {xi.prefix(k)})) - static_cast<std::int64_t>(k);
}

}  // namespace

TEST(TreeGeometry, Distances) {
  EXPECT_EQ(tree_distance({Word{}}, {w("ab")}), 2u);
  EXPECT_EQ(tree_distance({w("aa")}, {w("ab")}), 2u);
  EXPECT_EQ(tree_distance({w("abA")}, {w("abA")}), 0u);
  EXPECT_EQ(tree_distance({w("a")}, {w("A")}), 2u);
}

TEST(TreeGeometry, GromovProducts) {
  EXPECT_EQ(gromov_product(TreePoint{w("aab")}, TreePoint{w("aba")}).value(), 1u);
  EXPECT_EQ(gromov_product(TreePoint{w("abAb")}, TreePoint{w("abAb")}).value(), 4u);
  EXPECT_EQ(gromov_product(bp("per:a"), bp("per:ab")).value(), 1u);
  EXPECT_EQ(gromov_product(TreePoint{w("aab")}, bp("per:a")).value(), 2u);
  EXPECT_TRUE(gromov_product(bp("per:ab"), bp("pre:ab per:ab")).is_infinite());
  EXPECT_TRUE(gromov_product(bp("per:abab"), bp("pre:a per:ba")).is_infinite());
  EXPECT_THROW(gromov_product(bp("per:a"), bp("per:a")).value(), InvalidInput);
}

TEST(TreeGeometry, BusemannExamples) {
  const auto ainf = bp("per:a");
  EXPECT_EQ(busemann(w("A"), ainf), -1);
  EXPECT_EQ(busemann(w("b"), ainf), 1);
  EXPECT_EQ(busemann(Word{}, ainf), 0);
  EXPECT_EQ(busemann(w("AAA"), ainf), -3);
}

TEST(TreeGeometry, BoundaryAction) {
  const auto ainf = bp("per:a");
  EXPECT_EQ(boundary_action(w("a"), ainf), ainf);
  EXPECT_EQ(boundary_action(w("A"), ainf), ainf);
  EXPECT_EQ(boundary_action(w("b"), ainf).str(), "pre:b per:a");
  EXPECT_EQ(boundary_action(w("aB"), bp("pre:b per:a")).str(), "per:a");
  EXPECT_EQ(boundary_action(w("ab"), bp("prefix:Baa depth:3")).str(), "prefix:aaa depth:3");
  EXPECT_THROW(boundary_action(w("aab"), bp("prefix:B depth:1")), Undecidable);
}

TEST(TreeGeometry, Tracking) {
  const auto ainf = bp("per:a");
  EXPECT_EQ(tracking_distance({w("ab")}, ainf), 1u);
  EXPECT_EQ(tracking_distance({w("aaa")}, ainf), 0u);
  EXPECT_EQ(tracking_distance({w("Bab")}, ainf), 3u);
}

TEST(TreeGeometry, LemmaResidualsHandExample) {
  const auto r = lemma_identities_check(w("a"), bp("per:b"));
  EXPECT_TRUE(r.exact_zero());
  EXPECT_EQ(r.first(), 0.0);
  EXPECT_EQ(r.second(), 0.0);
  EXPECT_THROW(lemma_identities_check(w("a"), bp("prefix:ab depth:2")), InvalidInput);
}

TEST(TreeGeometry, TruncatedPointsAreUndecidable) {
  EXPECT_THROW(gromov_product(bp("prefix:ab depth:2"), bp("per:ab")), Undecidable);
  EXPECT_THROW(gromov_product(TreePoint{w("abab")}, bp("prefix:ab depth:2")), Undecidable);
  EXPECT_EQ(gromov_product(bp("prefix:abb depth:3"), bp("per:ab")).value(), 2u);
  EXPECT_THROW(bp("prefix:ab depth:3"), InvalidInput);
  EXPECT_THROW(bp("per:aA"), InvalidInput);
  EXPECT_THROW(bp("pre:A per:a"), InvalidInput);
  EXPECT_THROW(bp("per:"), InvalidInput);
}

TEST(TreeGeometry, BoundaryCanonicalForm) {
  EXPECT_EQ(bp("pre:abab per:ab"), bp("per:ab"));
  EXPECT_EQ(bp("pre:a per:ba").str(), "per:ab");
  EXPECT_EQ(bp("per:bbb").str(), "per:b");
  EXPECT_EQ(bp("pre:Ba per:bA").str(), "pre:Ba per:bA");
}

TEST(TreeGeometry, PsiEstimate) {
  const auto x = bp("per:a");
  const std::vector<BoundaryPoint> ys{bp("pre:a per:b"), bp("pre:aaa per:b")};
  const auto e = psi_estimate(x, ys);
  EXPECT_DOUBLE_EQ(e.mean, -4.0);
  EXPECT_EQ(e.count, 2u);
  const std::vector<BoundaryPoint> same{x};
  EXPECT_THROW(psi_estimate(x, same), InvalidInput);
  EXPECT_THROW(psi_estimate(x, std::span<const BoundaryPoint>{}), InvalidInput);
}

TEST(TreeGeometry, TailCurve) {
  const auto x = bp("per:a");
  const std::vector<BoundaryPoint> ys{bp("pre:a per:b"), bp("pre:aaa per:b"), bp("per:b")};
  const std::vector<std::uint64_t> grid{1, 2, 3, 4};
  const auto c = h2_tail_estimate(x, 1.0, grid, ys);
  ASSERT_EQ(c.points.size(), 4u);
  EXPECT_DOUBLE_EQ(c.points[0].probability, 2.0 / 3);
  EXPECT_DOUBLE_EQ(c.points[1].probability, 1.0 / 3);
  EXPECT_DOUBLE_EQ(c.points[2].probability, 1.0 / 3);
  EXPECT_DOUBLE_EQ(c.points[3].probability, 0.0);
  const auto huge = h2_tail_estimate(x, 1e9, grid, ys);
  for (const auto& p : huge.points) EXPECT_EQ(p.probability, 0.0);
  EXPECT_FALSE(huge.geometric_rate.has_value());
  EXPECT_THROW(h2_tail_estimate(x, 0.0, grid, ys), InvalidInput);
}

TEST(TreeGeometry, CenteredDriftMatchesHandSum) {
  // beta(a, x) + beta(A, x) + beta(b, x) + beta(B, x) = -1 + 1 + 1 + 1, so
  // mean beta is 1/2; each sample shifts it by 2 (x|y) - (1/2) sum_g 2 (gx|y).
  const auto mu = TreeMeasure::uniform({w("a"), w("A"), w("b"), w("B")});
  const std::vector<BoundaryPoint> ys{bp("per:b"), bp("per:B"), bp("pre:a per:b"), bp("pre:A per:B")};
  const auto e = centered_drift_estimate(mu, bp("per:a"), ys);
  std::vector<double> z;
  for (const auto& y : ys) {
    double acc = 0.5 + 2.0 * static_cast<double>(gromov_product(bp("per:a"), y).value());
    for (const char* g : {"a", "A", "b", "B"})
      acc -= 0.5 * static_cast<double>(gromov_product(boundary_action(w(g), bp("per:a")), y).value());
    z.push_back(acc);
  }
  EXPECT_EQ(e.count, ys.size());
  EXPECT_DOUBLE_EQ(e.mean, mean_estimate(z).mean);
}

TEST(TreeProperties, HorofunctionMatchesLimitDefinition) {
  InstanceGen gen(31);
  for (int k = 0; k < 5000; ++k) {
    const int rank = 2 + static_cast<int>(gen.uniform(0, 1));
    const auto xi = gen.periodic_boundary(rank, 4, 4);
    const Word z = gen.word_up_to(rank, 10);
    ASSERT_EQ(horofunction(xi, z), limit_horofunction(xi, z)) << xi.str() << " " << z.str();
  }
}

TEST(TreeProperties, BusemannCocycleAndBound) {
  InstanceGen gen(32);
  for (int k = 0; k < 5000; ++k) {
    const int rank = 2 + static_cast<int>(gen.uniform(0, 1));
    const auto xi = gen.periodic_boundary(rank, 4, 4);
    const Word g = gen.word_up_to(rank, 8), h = gen.word_up_to(rank, 8);
    ASSERT_EQ(busemann(g * h, xi), busemann(g, boundary_action(h, xi)) + busemann(h, xi));
    ASSERT_LE(std::abs(busemann(g, xi)), static_cast<std::int64_t>(g.size()));
    ASSERT_TRUE(lemma_identities_check(g, xi).exact_zero());
  }
}

TEST(TreeProperties, FourPointConditionIsExact) {
  InstanceGen gen(33);
  for (int k = 0; k < 5000; ++k) {
    const TreePoint x{gen.word_up_to(2, 6)}, y{gen.word_up_to(2, 6)}, z{gen.word_up_to(2, 6)};
    const std::uint64_t a = gromov_product(x, z).value(), b = gromov_product(y, z).value(),
                        c = gromov_product(x, y).value();
    ASSERT_GE(c, std::min(a, b));
  }
}

TEST(TreeProperties, GromovProductFromHorofunctionsAlongGeodesic) {
  InstanceGen gen(34);
  for (int k = 0; k < 2000; ++k) {
    const Word x = gen.word_up_to(2, 7), y = gen.word_up_to(2, 7);
    const auto zs = geodesic_vertices(x, y);
    ASSERT_EQ(twice_gromov_product_via_horofunctions(TreePoint{x}, TreePoint{y}, zs),
              2 * static_cast<std::int64_t>(gromov_product(TreePoint{x}, TreePoint{y}).value()));
  }
}

TEST(TreeProperties, CorollaryBound) {
  InstanceGen gen(35);
  int checked = 0;
  for (int k = 0; k < 3000; ++k) {
    const auto x = gen.periodic_boundary(2, 3, 3), y = gen.periodic_boundary(2, 3, 3);
    if (gromov_product(x, y).is_infinite()) {
      EXPECT_THROW(corollary_margin(Word{}, x, y), InvalidInput);
      continue;
    }
    ++checked;
    ASSERT_GE(corollary_margin(gen.word_up_to(2, 8), x, y), 0);
  }
  EXPECT_GT(checked, 2000);
  const auto wit = corollary_witness(bp("per:a"), bp("per:b"), 2);
  ASSERT_TRUE(wit.has_value());
  EXPECT_EQ(corollary_margin(*wit, bp("per:a"), bp("per:b")), 0);
}
