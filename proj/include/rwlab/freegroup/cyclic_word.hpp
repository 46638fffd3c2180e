#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "rwlab/freegroup/word.hpp"

namespace rwlab {

// Starting index of the lexicographically least rotation (Booth's algorithm).
inline std::size_t least_rotation(std::span<const Letter> s) {
  const std::size_t n = s.size();
  if (n == 0) return 0;
  std::vector<std::ptrdiff_t> f(2 * n, -1);
  std::size_t k = 0;
  auto at = [&](std::size_t i) { return s[i % n].order_key(); };
  for (std::size_t j = 1; j < 2 * n; ++j) {
    std::ptrdiff_t i = f[j - k - 1];
    while (i != -1 && at(j) != at(k + static_cast<std::size_t>(i) + 1)) {
      if (at(j) < at(k + static_cast<std::size_t>(i) + 1)) k = j - static_cast<std::size_t>(i) - 1;
      i = f[static_cast<std::size_t>(i)];
    }
    if (i == -1 && at(j) != at(k + static_cast<std::size_t>(i) + 1)) {
      if (at(j) < at(k + static_cast<std::size_t>(i) + 1)) k = j;
      f[j - k] = -1;
    } else {
      f[j - k] = i + 1;
    }
  }
  return k % n;
}

struct CyclicReduction;

// A conjugacy class of F_N: a cyclically reduced word in canonical
// (least) rotation. Two words are conjugate iff their classes compare equal.
class CyclicWord {
 public:
  CyclicWord() = default;

  std::size_t size() const { return word_.size(); }
  bool empty() const { return word_.empty(); }
  const Word& word() const { return word_; }
  std::string str() const { return word_.str(); }

  friend bool operator==(const CyclicWord&, const CyclicWord&) = default;
  friend auto operator<=>(const CyclicWord& x, const CyclicWord& y) { return x.word_ <=> y.word_; }

 private:
  friend CyclicReduction cyclic_reduce(const Word& w);
  explicit CyclicWord(Word w) : word_(std::move(w)) {}
  Word word_;
};

struct CyclicReduction {
  CyclicWord cls;
  Word conjugator;  // w == conjugator * cls.word() * conjugator^-1
};

// Number of letter pairs cancelled when closing the reduced word `w` into a cycle.
inline std::size_t cyclic_cancellation(std::span<const Letter> w) {
  std::size_t i = 0;
  std::size_t j = w.size();
  while (j - i >= 2 && w[i] == w[j - 1].inverse()) {
    ++i;
    --j;
  }
  return i;
}

inline CyclicReduction cyclic_reduce(const Word& w) {
  const auto letters = w.letters();
  const std::size_t c = cyclic_cancellation(letters);
  std::vector<Letter> core(letters.begin() + c, letters.end() - c);
  const std::size_t r = least_rotation(core);
  std::vector<Letter> rotated;
  rotated.reserve(core.size());
  rotated.insert(rotated.end(), core.begin() + r, core.end());
  rotated.insert(rotated.end(), core.begin(), core.begin() + r);
  // conjugator = (first c letters) * (first r letters of the core); a prefix of w, hence reduced.
  std::vector<Letter> conj(letters.begin(), letters.begin() + c + r);
  return {CyclicWord(Word::from_reduced(std::move(rotated))), Word::from_reduced(std::move(conj))};
}

inline std::size_t cyclic_length(const CyclicWord& g) { return g.size(); }

// ||w|| for a reduced word, without building the class.
inline std::size_t cyclic_length(const Word& w) { return w.size() - 2 * cyclic_cancellation(w.letters()); }

// ||u v^e|| (e = +-1) for reduced u, v, without materialising the product.
inline std::size_t cyclic_length_of_product(std::span<const Letter> u, std::span<const Letter> v, int e = 1) {
  const std::size_t nu = u.size();
  const std::size_t nv = v.size();
  // x(k) = k-th letter of v^e
  auto x = [&](std::size_t k) { return e > 0 ? v[k] : v[nv - 1 - k].inverse(); };
  // Seam cancellation between the end of u and the start of v^e.
  std::size_t s = 0;
  while (s < nu && s < nv && u[nu - 1 - s] == x(s).inverse()) ++s;
  const std::size_t len = nu + nv - 2 * s;
  if (len == 0) return 0;
  // Reduced product p = u[0, nu-s) ++ x[s, nv); index into it.
  const std::size_t left = nu - s;
  auto p = [&](std::size_t k) { return k < left ? u[k] : x(s + k - left); };
  std::size_t i = 0;
  std::size_t j = len;
  while (j - i >= 2 && p(i) == p(j - 1).inverse()) {
    ++i;
    --j;
  }
  return len - 2 * i;
}

}  // namespace rwlab

template <>
struct std::hash<rwlab::CyclicWord> {
  std::size_t operator()(const rwlab::CyclicWord& g) const noexcept { return std::hash<rwlab::Word>{}(g.word()); }
};
