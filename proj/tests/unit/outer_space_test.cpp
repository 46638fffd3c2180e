#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rwlab/outer/outer_space.hpp"
#include "rwlab/outer/rank2_lengths.hpp"
#include "rwlab/verify/random.hpp"

using namespace rwlab;

namespace {

const Automorphism kPhi1 = Automorphism::elementary(2, Elementary::right(1, 2));  // a>ab
RosePoint half_half() { return RosePoint::from_fractions({{1, 2}, {1, 2}}, Automorphism::identity(2)); }
RosePoint nine_one() { return RosePoint::from_fractions({{9, 10}, {1, 10}}, Automorphism::identity(2)); }

// Translation length straight from the definition: lengths[i] times the number
// of a_i^{+-1} in the cyclic reduction of Psi^-1(g), as a double.
double direct_length(const Word& g, const RosePoint& t) {
  const auto cls = cyclic_reduce(apply(t.marking_inverse(), g)).cls;
  double s = 0;
  for (Letter l : cls.word())
    s += static_cast<double>(t.weights()[static_cast<std::size_t>(l.generator() - 1)]) / static_cast<double>(t.total_weight());
  return s;
}

// Plain enumeration of every reduced word up to max_len, maximizing the
// length ratio. Slow and independent of both the candidates and the oracle.
Ratio enumerate_sup(const RosePoint& t, const RosePoint& u, int max_len) {
  Ratio best(0, 1);
  std::vector<Letter> w;
  std::function<void()> rec = [&] {
    if (!w.empty()) {
      const Word g = Word::from_reduced(w);
      const auto nt = weighted_translation_length(g, t), nu = weighted_translation_length(g, u);
      const Ratio r(static_cast<int128>(nu) * t.total_weight(), static_cast<int128>(nt) * u.total_weight());
      if (best < r) best = r;
    }
    if (static_cast<int>(w.size()) == max_len) return;
    for (int k = 1; k <= t.rank(); ++k)
      for (int s : {1, -1}) {
        const Letter l(k, s);
        if (!w.empty() && w.back() == l.inverse()) continue;
        w.push_back(l);
        rec();
        w.pop_back();
      }
  };
  rec();
  return best;
}

}  // namespace

TEST(TranslationLength, SpecExamples) {
  EXPECT_DOUBLE_EQ(translation_length(parse_word("ab", 2), half_half()), 1.0);
  EXPECT_DOUBLE_EQ(translation_length(parse_word("abA", 2), half_half()), 0.5);
  const RosePoint marked = RosePoint::from_fractions({{1, 2}, {1, 2}}, kPhi1);
  EXPECT_DOUBLE_EQ(translation_length(parse_word("a", 2), marked), 1.0);
  EXPECT_THROW(translation_length(Word{}, half_half()), InvalidInput);
}

TEST(TranslationLength, MatchesDefinitionAndInvariances) {
  InstanceGen gen(21);
  for (int k = 0; k < 2000; ++k) {
    const int rank = 2 + static_cast<int>(gen.uniform(0, 1));
    const RosePoint t = gen.rose(rank, gen.uniform(0, 5));
    const Word g = gen.cyclic_word(rank, 10);
    const Word c = gen.word_up_to(rank, 5);
    const double l = translation_length(g, t);
    ASSERT_NEAR(l, direct_length(g, t), 1e-12);
    ASSERT_GT(l, 0);
    ASSERT_EQ(weighted_translation_length(c * g * c.inverse(), t), weighted_translation_length(g, t));
    ASSERT_EQ(weighted_translation_length(g.inverse(), t), weighted_translation_length(g, t));
  }
}

TEST(RosePoint, Validation) {
  EXPECT_THROW(RosePoint::from_fractions({{1, 2}, {1, 3}}, Automorphism::identity(2)), InvalidInput);
  EXPECT_THROW(RosePoint::from_lengths({0.5, 0.6}, Automorphism::identity(2)), InvalidInput);
  EXPECT_THROW(RosePoint::from_lengths({1.0, 0.0}, Automorphism::identity(2)), InvalidInput);
  EXPECT_THROW(RosePoint({1, 1, 1}, Automorphism::identity(2)), InvalidInput);
  const auto p = RosePoint::from_lengths({0.9, 0.1}, Automorphism::identity(2));
  EXPECT_EQ(p.weights(), (std::vector<std::int64_t>{9, 1}));
}

TEST(CandidateSet, SizeAndShape) {
  for (int rank = 2; rank <= 5; ++rank) {
    const auto c = CandidateSet::for_point(RosePoint::unit(rank));
    EXPECT_EQ(static_cast<int>(c.words.size()), rank + rank * (rank - 1));
    for (const auto& w : c.words) EXPECT_FALSE(w.empty());
  }
}

TEST(LipschitzDistance, AsymmetryWitness) {
  const auto tu = lipschitz_distance_exact(half_half(), nine_one());
  const auto ut = lipschitz_distance_exact(nine_one(), half_half());
  EXPECT_EQ(tu.ratio, Ratio(9, 5));
  EXPECT_EQ(ut.ratio, Ratio(5, 1));
  EXPECT_DOUBLE_EQ(tu.value, std::log(1.8));
  EXPECT_DOUBLE_EQ(ut.value, std::log(5.0));
  EXPECT_DOUBLE_EQ(sym_distance(half_half(), nine_one()), std::log(5.0));
  EXPECT_DOUBLE_EQ(sym_distance(nine_one(), half_half()), std::log(5.0));
}

TEST(LipschitzDistance, NielsenImageOfUnitRose) {
  const RosePoint o = RosePoint::unit(2);
  EXPECT_EQ(lipschitz_distance_exact(o, act(kPhi1, o)).ratio, Ratio(2, 1));
  EXPECT_EQ(brute_force_distance_oracle(o, act(kPhi1, o), 12).ratio, Ratio(2, 1));
}

TEST(LipschitzDistance, SelfDistanceZeroAndSymBounds) {
  InstanceGen gen(22);
  for (int k = 0; k < 1000; ++k) {
    const RosePoint t = gen.rose(2, gen.uniform(0, 4)), u = gen.rose(2, gen.uniform(0, 4));
    ASSERT_EQ(lipschitz_distance(t, t), 0.0);
    ASSERT_GE(lipschitz_distance(t, u), 0.0);
    const double s = sym_distance(t, u);
    ASSERT_GE(s, lipschitz_distance(t, u));
    ASSERT_GE(s, lipschitz_distance(u, t));
  }
  EXPECT_THROW(lipschitz_distance(RosePoint::unit(2), RosePoint::unit(3)), InvalidInput);
}

TEST(LipschitzDistance, CandidatesMatchPlainEnumeration) {
  InstanceGen gen(23);
  for (int k = 0; k < 40; ++k) {
    const RosePoint t = gen.rose(2, gen.uniform(0, 3)), u = gen.rose(2, gen.uniform(0, 3));
    ASSERT_EQ(lipschitz_distance_exact(t, u).ratio, enumerate_sup(t, u, 8));
  }
}

TEST(BruteForceOracle, Basics) {
  const RosePoint t = half_half(), u = nine_one();
  EXPECT_EQ(brute_force_distance_oracle(t, t, 12).value, 0.0);
  Ratio prev(0, 1);
  for (int len = 2; len <= 10; ++len) {
    const Ratio r = brute_force_distance_oracle(t, u, len).ratio;
    EXPECT_TRUE(prev <= r);
    prev = r;
  }
  EXPECT_EQ(prev, Ratio(9, 5));
  EXPECT_THROW(brute_force_distance_oracle(t, u, 1), InvalidInput);
  EXPECT_THROW(brute_force_distance_oracle(t, u, 40), ResourceError);
}

TEST(Kappa, Examples) {
  EXPECT_EQ(kappa(Automorphism::identity(3)), 0.0);
  EXPECT_EQ(kappa_exact(kPhi1), Ratio(2, 1));
  EXPECT_DOUBLE_EQ(kappa(kPhi1), std::log(2.0));
  // kappa(Phi) is the distance from Phi . o to the basepoint
  InstanceGen gen(24);
  for (int k = 0; k < 500; ++k) {
    const auto phi = gen.automorphism(2 + static_cast<int>(gen.uniform(0, 1)), gen.uniform(0, 6));
    const RosePoint o = RosePoint::unit(phi.rank());
    ASSERT_EQ(kappa_exact(phi), lipschitz_distance_exact(act(phi, o), o).ratio);
  }
}

TEST(LengthCocycle, Examples) {
  const auto a = cyclic_reduce(parse_word("a", 2)).cls;
  EXPECT_EQ(length_cocycle(Automorphism::identity(2), a), 0.0);
  EXPECT_DOUBLE_EQ(length_cocycle(kPhi1, a), std::log(2.0));
  EXPECT_THROW(length_cocycle(kPhi1, CyclicWord{}), InvalidInput);
}

TEST(LengthCocycle, PointMassPowers) {
  // kappa(Phi1^n) = log(n + 1) = sigma(Phi1^n, a): the images are a b^n and b.
  Automorphism p = Automorphism::identity(2);
  const auto a = cyclic_reduce(parse_word("a", 2)).cls;
  for (int n = 1; n <= 20; ++n) {
    p = compose(kPhi1, p);
    EXPECT_EQ(kappa_exact(p), Ratio(n + 1, 1));
    EXPECT_EQ(length_ratio(p, a), Ratio(n + 1, 1));
  }
}

TEST(Rank2Lengths, MatrixModelMatchesExactWords) {
  InstanceGen gen(25);
  const std::vector<const char*> prims{"a", "b", "ab", "aB", "AAbAb", "aab"};
  for (const char* p : prims) ASSERT_TRUE(certify_primitive(cyclic_reduce(parse_word(p, 2)).cls, 2)) << p;
  EXPECT_FALSE(certify_primitive(cyclic_reduce(parse_word("aabb", 2)).cls, 2));
  EXPECT_FALSE(certify_primitive(cyclic_reduce(parse_word("abAB", 2)).cls, 2));
  for (int k = 0; k < 300; ++k) {
    const auto phi = gen.automorphism(2, gen.uniform(0, 12));
    const Matrix2 m = Matrix2::of(phi);
    ASSERT_EQ(kappa_ratio2(m), BigRatio(kappa_exact(phi)));
    for (const char* p : prims) {
      const auto g = cyclic_reduce(parse_word(p, 2)).cls;
      ASSERT_EQ(primitive_length(m, abelianize2(g.word())), BigInt(cyclic_length(apply(phi, g))));
    }
    const auto psi = gen.automorphism(2, gen.uniform(0, 6));
    ASSERT_EQ(Matrix2::of(compose(phi, psi)), Matrix2::of(phi) * Matrix2::of(psi));
  }
}
