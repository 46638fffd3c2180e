#pragma once

// Exact cyclic lengths of primitive classes in F_2 from the abelianization.
//
// A primitive conjugacy class of F_2 is determined by its image (p, q) in
// Z^2, and its cyclic reduction uses |p| letters a^{+-1} of a single sign and
// |q| letters b^{+-1} of a single sign (Cohen-Metzler-Zimmermann; Osborne-
// Zieschang). So ||g|| = |p| + |q|. Every base candidate of the rose is
// primitive, which makes kappa and the length cocycle on primitives
// computable from a 2x2 integer matrix, with no word growth.

#include <array>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "rwlab/freegroup/automorphism.hpp"
#include "rwlab/freegroup/cyclic_word.hpp"
#include "rwlab/outer/outer_space.hpp"

namespace rwlab {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt to_big(int128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  BigInt r = static_cast<std::uint64_t>(u >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(u);
  return neg ? BigInt(-r) : r;
}

inline double log_big(const BigInt& x) {
  if (x <= 0) throw InvalidInput("log of a nonpositive integer");
  const auto bits = boost::multiprecision::msb(x);
  if (bits < 1000) return std::log(x.convert_to<double>());
  const auto shift = bits - 60;
  const BigInt top = x >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

// Exact positive ratio of big integers, in lowest terms.
class BigRatio {
 public:
  BigRatio() = default;
  BigRatio(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_ <= 0 || num_ < 0) throw InvalidInput("ratio must have nonnegative numerator and positive denominator");
    const BigInt g = boost::multiprecision::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }
  explicit BigRatio(const Ratio& r) : BigRatio(to_big(r.num()), to_big(r.den())) {}
  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  double log() const { return log_big(num_) - log_big(den_); }

  friend bool operator==(const BigRatio&, const BigRatio&) = default;
  friend bool operator<(const BigRatio& x, const BigRatio& y) { return x.num_ * y.den_ < y.num_ * x.den_; }
  friend bool operator>(const BigRatio& x, const BigRatio& y) { return y < x; }
  friend bool operator<=(const BigRatio& x, const BigRatio& y) { return !(y < x); }

 private:
  BigInt num_ = 0;
  BigInt den_ = 1;
};

using Vec2 = std::array<BigInt, 2>;

// Exponent sums of a word in F_2.
inline Vec2 abelianize2(const Word& w) {
  if (w.max_generator() > 2) throw InvalidInput("abelianize2 needs a rank-2 word");
  Vec2 v{0, 0};
  for (Letter l : w) v[static_cast<std::size_t>(l.generator() - 1)] += l.sign();
  return v;
}

inline BigInt l1_norm(const Vec2& v) { return abs(v[0]) + abs(v[1]); }

// Abelianization of an automorphism of F_2: column k is the image of a_{k+1}.
class Matrix2 {
 public:
  static Matrix2 identity() { return Matrix2({1, 0, 0, 1}); }
  static Matrix2 of(const Automorphism& phi) {
    if (phi.rank() != 2) throw InvalidInput("rank-2 length model needs a rank-2 automorphism");
    const Vec2 ca = abelianize2(phi.image(1));
    const Vec2 cb = abelianize2(phi.image(2));
    return Matrix2({ca[0], cb[0], ca[1], cb[1]});
  }

  Vec2 apply(const Vec2& v) const { return {m_[0] * v[0] + m_[1] * v[1], m_[2] * v[0] + m_[3] * v[1]}; }

  // this * rhs
  Matrix2 operator*(const Matrix2& r) const {
    return Matrix2({m_[0] * r.m_[0] + m_[1] * r.m_[2], m_[0] * r.m_[1] + m_[1] * r.m_[3],
                    m_[2] * r.m_[0] + m_[3] * r.m_[2], m_[2] * r.m_[1] + m_[3] * r.m_[3]});
  }

  const BigInt& at(int r, int c) const { return m_[static_cast<std::size_t>(2 * r + c)]; }
  friend bool operator==(const Matrix2&, const Matrix2&) = default;

 private:
  explicit Matrix2(std::array<BigInt, 4> m) : m_(std::move(m)) {}
  std::array<BigInt, 4> m_;
};

// ||phi(g)|| for primitive g with abelianization v.
inline BigInt primitive_length(const Matrix2& m, const Vec2& v) { return l1_norm(m.apply(v)); }

// kappa ratio over the four rose candidates a, b, ab, aB.
inline BigRatio kappa_ratio2(const Matrix2& m) {
  BigRatio best(primitive_length(m, {1, 0}), 1);
  for (auto [v, len] : {std::pair<Vec2, int>{Vec2{0, 1}, 1}, {Vec2{1, 1}, 2}, {Vec2{1, -1}, 2}}) {
    BigRatio r(primitive_length(m, v), len);
    if (r > best) best = r;
  }
  return best;
}

// Tries to certify that g is primitive by greedily lowering its cyclic length
// with elementary multiplications until one letter is left. Sound: returns
// true only with an explicit automorphism carrying g to a generator.
inline bool certify_primitive(const CyclicWord& g, int rank) {
  if (g.empty()) return false;
  CyclicWord cur = g;
  const auto moves = all_elementaries(rank);
  std::vector<Automorphism> autos;
  for (const auto& e : moves)
    if (e.kind() == ElementaryKind::right_multiply || e.kind() == ElementaryKind::left_multiply)
      autos.push_back(Automorphism::elementary(rank, e));
  while (cur.size() > 1) {
    std::optional<CyclicWord> best;
    for (const auto& phi : autos) {
      CyclicWord next = apply(phi, cur);
      if (next.size() < cur.size() && (!best || next.size() < best->size())) best = std::move(next);
    }
    if (!best) return false;
    cur = std::move(*best);
  }
  return true;
}

}  // namespace rwlab
