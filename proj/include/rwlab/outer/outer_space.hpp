#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rwlab/freegroup/automorphism.hpp"
#include "rwlab/freegroup/cyclic_word.hpp"

namespace rwlab {

using int128 = __int128;

namespace detail {

inline int128 gcd128(int128 a, int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw ResourceError("integer overflow in weighted length");
  return r;
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw ResourceError("integer overflow in weighted length");
  return r;
}

inline int128 checked_mul128(int128 a, int128 b) {
  int128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw ResourceError("integer overflow in length ratio");
  return r;
}

}  // namespace detail

// A positive rational num/den kept in lowest terms. Used for every length
// ratio so that maxima and equalities are decided exactly; the logarithm is
// the only floating-point step.
class Ratio {
 public:
  Ratio() = default;
  Ratio(int128 num, int128 den) : num_(num), den_(den) {
    if (den_ <= 0 || num_ < 0) throw InvalidInput("ratio must have nonnegative numerator and positive denominator");
    const int128 g = detail::gcd128(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  int128 num() const { return num_; }
  int128 den() const { return den_; }

  double log() const {
    return static_cast<double>(std::log(static_cast<long double>(num_)) - std::log(static_cast<long double>(den_)));
  }
  double value() const { return static_cast<double>(static_cast<long double>(num_) / static_cast<long double>(den_)); }

  friend bool operator==(const Ratio&, const Ratio&) = default;
  friend std::strong_ordering operator<=>(const Ratio& x, const Ratio& y) {
    const int128 l = detail::checked_mul128(x.num_, y.den_);
    const int128 r = detail::checked_mul128(y.num_, x.den_);
    return l < r ? std::strong_ordering::less : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  std::string str() const { return den_ == 1 ? to_string(num_) : to_string(num_) + "/" + to_string(den_); }

 private:
  static std::string to_string(int128 v) {
    if (v == 0) return "0";
    std::string s;
    bool neg = v < 0;
    if (neg) v = -v;
    while (v > 0) {
      s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
      v /= 10;
    }
    return neg ? "-" + s : s;
  }

  int128 num_ = 0;
  int128 den_ = 1;
};

// A point of the rose subspace of outer space: the marked rose Psi . T_l.
// Edge lengths are stored as positive integer weights; the length of edge i
// is weights[i] / sum(weights), so covolume one holds exactly.
class RosePoint {
 public:
  RosePoint(std::vector<std::int64_t> weights, Automorphism marking)
      : weights_(std::move(weights)), marking_(std::move(marking)), marking_inverse_(invert(marking_)) {
    if (static_cast<int>(weights_.size()) != marking_.rank())
      throw InvalidInput("rose needs one length per generator");
    std::int64_t g = 0;
    for (auto w : weights_) {
      if (w <= 0) throw InvalidInput("rose edge lengths must be positive");
      g = std::gcd(g, w);
    }
    for (auto& w : weights_) w /= g;
    total_ = 0;
    for (auto w : weights_) total_ = detail::checked_add(total_, w);
  }

  // Unit rose: every length 1/N, identity marking.
  static RosePoint unit(int rank) {
    return RosePoint(std::vector<std::int64_t>(static_cast<std::size_t>(rank), 1), Automorphism::identity(rank));
  }

  // Lengths given as exact fractions p/q; they must sum to 1 exactly.
  static RosePoint from_fractions(const std::vector<std::pair<std::int64_t, std::int64_t>>& lengths, Automorphism marking) {
    std::int64_t l = 1;
    for (auto [p, q] : lengths) {
      if (q <= 0 || p <= 0) throw InvalidInput("rose edge lengths must be positive fractions");
      l = std::lcm(l, q);
    }
    std::vector<std::int64_t> w;
    std::int64_t sum = 0;
    for (auto [p, q] : lengths) {
      w.push_back(detail::checked_mul(p, l / q));
      sum = detail::checked_add(sum, w.back());
    }
    if (sum != l) throw InvalidInput("rose edge lengths must sum to 1");
    return RosePoint(std::move(w), std::move(marking));
  }

  // Floating-point lengths must sum to 1 within 1e-12; they are snapped to a
  // 1e-9 grid before becoming weights.
  static RosePoint from_lengths(const std::vector<double>& lengths, Automorphism marking) {
    double sum = 0;
    std::vector<std::int64_t> w;
    for (double x : lengths) {
      if (!(x > 0) || !std::isfinite(x)) throw InvalidInput("rose edge lengths must be positive");
      sum += x;
      const auto q = static_cast<std::int64_t>(std::llround(x * 1e9));
      if (q <= 0) throw InvalidInput("rose edge length below resolution 1e-9");
      w.push_back(q);
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidInput("rose edge lengths must sum to 1 (got " + std::to_string(sum) + ")");
    return RosePoint(std::move(w), std::move(marking));
  }

  int rank() const { return marking_.rank(); }
  const std::vector<std::int64_t>& weights() const { return weights_; }
  std::int64_t total_weight() const { return total_; }
  const Automorphism& marking() const { return marking_; }
  const Automorphism& marking_inverse() const { return marking_inverse_; }

  std::vector<double> lengths() const {
    std::vector<double> out;
    for (auto w : weights_) out.push_back(static_cast<double>(w) / static_cast<double>(total_));
    return out;
  }

 private:
  std::vector<std::int64_t> weights_;
  std::int64_t total_ = 0;
  Automorphism marking_;
  Automorphism marking_inverse_;
};

// Phi . T = T . Phi^-1: the marking becomes Phi o Psi.
inline RosePoint act(const Automorphism& phi, const RosePoint& t) {
  return RosePoint(t.weights(), compose(phi, t.marking()));
}

// Sum of weights[i] * (occurrences of a_i^{+-1}) over a cyclically reduced word.
inline std::int64_t weighted_count(std::span<const Letter> w, const std::vector<std::int64_t>& weights) {
  std::int64_t s = 0;
  for (Letter l : w) s = detail::checked_add(s, weights[static_cast<std::size_t>(l.generator() - 1)]);
  return s;
}

// Numerator of ||g||_T over T.total_weight(), for any (not necessarily cyclically reduced) word g.
inline std::int64_t weighted_translation_length(const Word& g, const RosePoint& t) {
  const Word pulled = apply(t.marking_inverse(), g);
  const auto letters = pulled.letters();
  const std::size_t c = cyclic_cancellation(letters);
  return weighted_count(letters.subspan(c, letters.size() - 2 * c), t.weights());
}

// ||g||_T for the marked rose T = Psi . T_l: the l-weighted letter count of
// the cyclic reduction of Psi^-1(g).
inline double translation_length(const CyclicWord& g, const RosePoint& t) {
  if (g.empty()) throw InvalidInput("translation length of the trivial class is undefined");
  if (g.word().max_generator() > t.rank()) throw InvalidInput("rank mismatch in translation_length");
  return static_cast<double>(weighted_translation_length(g.word(), t)) / static_cast<double>(t.total_weight());
}

inline double translation_length(const Word& g, const RosePoint& t) { return translation_length(cyclic_reduce(g).cls, t); }

// The candidate words of the base rose: a_i, and a_i a_j^{+-1} for i < j.
//
// On a rose every embedded loop is a petal and every figure-eight is a pair
// of petals, so these N + N(N-1) words are the full candidate set for
// White's formula (Francaviglia and Martino 2011, Prop. 3.15; Algom-Kfir
// 2011, Prop. 2.3).
inline std::vector<Word> base_candidate_words(int rank) {
  check_rank(rank);
  std::vector<Word> out;
  for (int i = 1; i <= rank; ++i) out.push_back(Word{Letter(i, 1)});
  for (int i = 1; i <= rank; ++i)
    for (int j = i + 1; j <= rank; ++j) {
      out.push_back(Word{Letter(i, 1), Letter(j, 1)});
      out.push_back(Word{Letter(i, 1), Letter(j, -1)});
    }
  return out;
}

// Candidates of a marked rose Psi . T_l: Psi applied to the base candidates.
struct CandidateSet {
  std::vector<CyclicWord> words;

  static CandidateSet for_point(const RosePoint& t) {
    CandidateSet c;
    for (const auto& w : base_candidate_words(t.rank())) c.words.push_back(apply(t.marking(), cyclic_reduce(w).cls));
    return c;
  }
};

struct DistanceResult {
  Ratio ratio;              // maximal ||c||_U / ||c||_T, exact
  std::size_t argmax = 0;   // index into the candidate list (or enumeration order for the oracle)
  double value = 0;         // log(ratio)
};

// d(T, U) = log max over c in Cand(T) of ||c||_U / ||c||_T.
inline DistanceResult lipschitz_distance_exact(const RosePoint& t, const RosePoint& u, const CandidateSet& cand) {
  if (t.rank() != u.rank()) throw InvalidInput("rank mismatch in lipschitz_distance");
  if (cand.words.empty()) throw InvalidInput("empty candidate set");
  DistanceResult best;
  bool have = false;
  for (std::size_t k = 0; k < cand.words.size(); ++k) {
    const Word& c = cand.words[k].word();
    const std::int64_t nt = weighted_translation_length(c, t);
    const std::int64_t nu = weighted_translation_length(c, u);
    if (nt == 0) throw InvalidInput("trivial candidate");
    const Ratio r(detail::checked_mul128(nu, t.total_weight()), detail::checked_mul128(nt, u.total_weight()));
    if (!have || r > best.ratio) {
      best.ratio = r;
      best.argmax = k;
      have = true;
    }
  }
  best.value = best.ratio.log();
  return best;
}

inline DistanceResult lipschitz_distance_exact(const RosePoint& t, const RosePoint& u) {
  return lipschitz_distance_exact(t, u, CandidateSet::for_point(t));
}

inline double lipschitz_distance(const RosePoint& t, const RosePoint& u) { return lipschitz_distance_exact(t, u).value; }

// max(d(T,U), d(U,T))
inline double sym_distance(const RosePoint& t, const RosePoint& u) {
  return std::max(lipschitz_distance(t, u), lipschitz_distance(u, t));
}

// max over base candidates w of ||phi(w)|| / ||w|| (cyclic lengths), read off
// the forward images without materialising the products.
inline Ratio kappa_ratio(const std::vector<Word>& images) {
  const int rank = static_cast<int>(images.size());
  Ratio best(0, 1);
  for (int i = 0; i < rank; ++i) {
    const Ratio r(static_cast<int128>(cyclic_length(images[static_cast<std::size_t>(i)])), 1);
    if (r > best) best = r;
  }
  for (int i = 0; i < rank; ++i)
    for (int j = i + 1; j < rank; ++j)
      for (int e : {1, -1}) {
        const auto len = cyclic_length_of_product(images[static_cast<std::size_t>(i)].letters(),
                                                  images[static_cast<std::size_t>(j)].letters(), e);
        const Ratio r(static_cast<int128>(len), 2);
        if (r > best) best = r;
      }
  return best;
}

// kappa(phi) = d(phi . o, o) with o the unit rose.
inline Ratio kappa_exact(const Automorphism& phi) { return kappa_ratio(phi.forward_images()); }
inline double kappa(const Automorphism& phi) { return kappa_exact(phi).log(); }

// ||phi(g)|| / ||g||
inline Ratio length_ratio(const Automorphism& phi, const CyclicWord& g) {
  if (g.empty()) throw InvalidInput("length cocycle of the trivial class is undefined");
  if (g.word().max_generator() > phi.rank()) throw InvalidInput("rank mismatch in length_cocycle");
  return Ratio(static_cast<int128>(cyclic_length(apply(phi, g.word()))), static_cast<int128>(g.size()));
}

// sigma(phi, g) = log(||phi(g)|| / ||g||)
inline double length_cocycle(const Automorphism& phi, const CyclicWord& g) { return length_ratio(phi, g).log(); }

inline constexpr std::uint64_t kOracleWordBound = 20'000'000;

// Number of nontrivial reduced words of length <= max_len in rank N.
inline std::uint64_t reduced_word_count(int rank, int max_len) {
  std::uint64_t total = 0;
  std::uint64_t level = static_cast<std::uint64_t>(2 * rank);
  for (int l = 1; l <= max_len; ++l) {
    total += level;
    if (total > kOracleWordBound) return total;
    level *= static_cast<std::uint64_t>(2 * rank - 1);
  }
  return total;
}

// log sup ||g||_U / ||g||_T over all classes g = Psi(w), w cyclically reduced
// of length <= max_len (Psi the marking of T). Brute force; independent of
// the candidate set.
inline DistanceResult brute_force_distance_oracle(const RosePoint& t, const RosePoint& u, int max_len) {
  if (t.rank() != u.rank()) throw InvalidInput("rank mismatch in brute_force_distance_oracle");
  if (max_len < 2) throw InvalidInput("brute force oracle needs max_len >= 2");
  const int rank = t.rank();
  if (reduced_word_count(rank, max_len) > kOracleWordBound)
    throw ResourceError("oracle enumeration exceeds " + std::to_string(kOracleWordBound) + " words");

  const Automorphism theta = compose(u.marking_inverse(), t.marking());
  const auto& images = theta.forward_images();
  const auto& wt = t.weights();
  const auto& wu = u.weights();

  std::vector<Letter> word;         // w
  std::vector<Letter> img;          // theta(w), reduced
  std::vector<Letter> removed;      // undo log for cancelled letters of img
  std::vector<std::int64_t> count_u(static_cast<std::size_t>(rank), 0);  // letter counts of img
  std::int64_t num_t = 0;

  struct Frame {
    std::size_t popped;
    std::size_t pushed;
  };
  std::vector<Frame> frames;

  DistanceResult best;
  bool have = false;
  std::size_t visited = 0;

  auto image_letters = [&](Letter x, auto&& fn) {
    const Word& im = images[static_cast<std::size_t>(x.generator() - 1)];
    if (x.sign() > 0)
      for (Letter y : im) fn(y);
    else
      for (auto it = im.letters().rbegin(); it != im.letters().rend(); ++it) fn(it->inverse());
  };

  auto push = [&](Letter x) {
    word.push_back(x);
    num_t += wt[static_cast<std::size_t>(x.generator() - 1)];
    Frame f{0, 0};
    image_letters(x, [&](Letter y) {
      if (!img.empty() && img.back() == y.inverse()) {
        removed.push_back(img.back());
        --count_u[static_cast<std::size_t>(img.back().generator() - 1)];
        img.pop_back();
        ++f.popped;
      } else {
        img.push_back(y);
        ++count_u[static_cast<std::size_t>(y.generator() - 1)];
        ++f.pushed;
      }
    });
    frames.push_back(f);
  };

  auto pop = [&]() {
    const Frame f = frames.back();
    frames.pop_back();
    for (std::size_t k = 0; k < f.pushed; ++k) {
      --count_u[static_cast<std::size_t>(img.back().generator() - 1)];
      img.pop_back();
    }
    for (std::size_t k = 0; k < f.popped; ++k) {
      img.push_back(removed.back());
      ++count_u[static_cast<std::size_t>(removed.back().generator() - 1)];
      removed.pop_back();
    }
    num_t -= wt[static_cast<std::size_t>(word.back().generator() - 1)];
    word.pop_back();
  };

  auto evaluate = [&]() {
    if (word.size() >= 2 && word.front() == word.back().inverse()) return;  // not cyclically reduced
    const std::size_t c = cyclic_cancellation(img);
    std::int64_t num_u = 0;
    for (int k = 0; k < rank; ++k) num_u += wu[static_cast<std::size_t>(k)] * count_u[static_cast<std::size_t>(k)];
    for (std::size_t k = 0; k < c; ++k) {
      num_u -= wu[static_cast<std::size_t>(img[k].generator() - 1)];
      num_u -= wu[static_cast<std::size_t>(img[img.size() - 1 - k].generator() - 1)];
    }
    const Ratio r(detail::checked_mul128(num_u, t.total_weight()), detail::checked_mul128(num_t, u.total_weight()));
    if (!have || r > best.ratio) {
      best.ratio = r;
      best.argmax = visited;
      have = true;
    }
  };

  std::vector<Letter> alphabet;
  for (int k = 1; k <= rank; ++k) {
    alphabet.emplace_back(k, 1);
    alphabet.emplace_back(k, -1);
  }
  // Iterative DFS over reduced words; next_choice[d] is the alphabet index to try at depth d.
  std::vector<std::size_t> next_choice(static_cast<std::size_t>(max_len) + 1, 0);
  std::size_t depth = 0;
  while (true) {
    if (depth < static_cast<std::size_t>(max_len) && next_choice[depth] < alphabet.size()) {
      const Letter x = alphabet[next_choice[depth]++];
      if (!word.empty() && word.back() == x.inverse()) continue;
      push(x);
      ++visited;
      evaluate();
      ++depth;
      next_choice[depth] = 0;
    } else {
      if (depth == 0) break;
      pop();
      --depth;
    }
  }
  best.value = best.ratio.log();
  return best;
}

}  // namespace rwlab
