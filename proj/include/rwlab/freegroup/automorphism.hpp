#pragma once

#include <cassert>
#include <optional>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rwlab/freegroup/cyclic_word.hpp"
#include "rwlab/freegroup/word.hpp"

namespace rwlab {

enum class ElementaryKind : std::uint8_t {
  right_multiply,  // a_i -> a_i a_j^e
  left_multiply,   // a_i -> a_j^e a_i
  inversion,       // a_i -> a_i^-1
  transposition,   // a_i <-> a_j
};

// One elementary Nielsen generator of Aut(F_N).
//
// Textual form: "R(a,b)" for a -> ab, "R(a,B)" for a -> aB, "L(a,b)" for
// a -> ba, "I(a)" for a -> A, "T(a,b)" for swapping a and b.
class Elementary {
 public:
  Elementary(ElementaryKind kind, int i, int j = 0, int sign = 1) : kind_(kind), i_(i), j_(j), sign_(sign) {
    if (i < 1 || i > kMaxRank) throw InvalidInput("elementary generator index out of range");
    switch (kind) {
      case ElementaryKind::right_multiply:
      case ElementaryKind::left_multiply:
      case ElementaryKind::transposition:
        if (j < 1 || j > kMaxRank) throw InvalidInput("elementary generator index out of range");
        if (i == j) throw InvalidInput("elementary generator needs distinct indices i != j");
        break;
      case ElementaryKind::inversion:
        j_ = 0;
        break;
    }
    if (sign != 1 && sign != -1) throw InvalidInput("elementary sign must be +1 or -1");
    if (kind != ElementaryKind::right_multiply && kind != ElementaryKind::left_multiply) sign_ = 1;
  }

  static Elementary right(int i, int j, int sign = 1) { return {ElementaryKind::right_multiply, i, j, sign}; }
  static Elementary left(int i, int j, int sign = 1) { return {ElementaryKind::left_multiply, i, j, sign}; }
  static Elementary inversion(int i) { return {ElementaryKind::inversion, i}; }
  static Elementary transposition(int i, int j) { return {ElementaryKind::transposition, i, j}; }

  ElementaryKind kind() const { return kind_; }
  int i() const { return i_; }
  int j() const { return j_; }
  int sign() const { return sign_; }
  int max_index() const { return std::max(i_, j_); }

  Elementary inverse() const {
    if (kind_ == ElementaryKind::right_multiply || kind_ == ElementaryKind::left_multiply)
      return {kind_, i_, j_, -sign_};
    return *this;
  }

  // Image of generator a_k (1-based).
  Word image(int k) const {
    const Letter ak(k, 1);
    if (k != i_ && !(kind_ == ElementaryKind::transposition && k == j_)) return Word{ak};
    switch (kind_) {
      case ElementaryKind::right_multiply:
        return Word{ak, Letter(j_, sign_)};
      case ElementaryKind::left_multiply:
        return Word{Letter(j_, sign_), ak};
      case ElementaryKind::inversion:
        return Word{ak.inverse()};
      case ElementaryKind::transposition:
        return Word{Letter(k == i_ ? j_ : i_, 1)};
    }
    return Word{ak};
  }

  std::string str() const {
    auto ch = [](int g, int s) { return std::string(1, Letter(g, s).to_char()); };
    switch (kind_) {
      case ElementaryKind::right_multiply:
        return "R(" + ch(i_, 1) + "," + ch(j_, sign_) + ")";
      case ElementaryKind::left_multiply:
        return "L(" + ch(i_, 1) + "," + ch(j_, sign_) + ")";
      case ElementaryKind::inversion:
        return "I(" + ch(i_, 1) + ")";
      case ElementaryKind::transposition:
        return "T(" + ch(i_, 1) + "," + ch(j_, 1) + ")";
    }
    return "?";
  }

  friend bool operator==(const Elementary&, const Elementary&) = default;

 private:
  ElementaryKind kind_;
  int i_;
  int j_;
  int sign_;
};

inline Elementary parse_elementary(std::string_view text) {
  auto fail = [&]() -> Elementary { throw InvalidInput("malformed elementary generator '" + std::string(text) + "'"); };
  std::string s;
  for (char c : text)
    if (c != ' ') s.push_back(c);
  if (s.size() < 4 || s[1] != '(' || s.back() != ')') return fail();
  const char kind = s[0];
  const std::string body = s.substr(2, s.size() - 3);
  if (kind == 'I') {
    if (body.size() != 1) return fail();
    Letter x = parse_letter(body[0]);
    if (x.sign() < 0) return fail();
    return Elementary::inversion(x.generator());
  }
  if (body.size() != 3 || body[1] != ',') return fail();
  Letter x = parse_letter(body[0]);
  Letter y = parse_letter(body[2]);
  if (x.sign() < 0) return fail();
  switch (kind) {
    case 'R':
      return Elementary::right(x.generator(), y.generator(), y.sign());
    case 'L':
      return Elementary::left(x.generator(), y.generator(), y.sign());
    case 'T':
      if (y.sign() < 0) return fail();
      return Elementary::transposition(x.generator(), y.generator());
    default:
      return fail();
  }
}

// Substitutes images into `w` and freely reduces. `images[k-1]` is the image of a_k.
inline void substitute_into(std::vector<Letter>& out, const std::vector<Word>& images, std::span<const Letter> w) {
  for (Letter l : w) {
    const Word& img = images[static_cast<std::size_t>(l.generator() - 1)];
    if (l.sign() > 0) {
      for (Letter x : img) push_reduced(out, x);
    } else {
      for (auto it = img.letters().rbegin(); it != img.letters().rend(); ++it) push_reduced(out, it->inverse());
    }
  }
}

inline Word substitute(const std::vector<Word>& images, std::span<const Letter> w) {
  std::vector<Letter> out;
  out.reserve(w.size() * 2);
  substitute_into(out, images, w);
  return Word::from_reduced(std::move(out));
}

// An automorphism of F_N carried together with its inverse and the list of
// elementary generators it was built from. The trace [E1, ..., Ek] denotes
// E1 o E2 o ... o Ek.
class Automorphism {
 public:
  static Automorphism identity(int rank) {
    check_rank(rank);
    Automorphism a;
    a.rank_ = rank;
    for (int k = 1; k <= rank; ++k) a.forward_.push_back(Word{Letter(k, 1)});
    a.inverse_ = a.forward_;
    return a;
  }

  static Automorphism elementary(int rank, const Elementary& e) {
    check_rank(rank);
    if (e.max_index() > rank) throw InvalidInput("elementary generator " + e.str() + " exceeds rank " + std::to_string(rank));
    Automorphism a;
    a.rank_ = rank;
    const Elementary inv = e.inverse();
    for (int k = 1; k <= rank; ++k) {
      a.forward_.push_back(e.image(k));
      a.inverse_.push_back(inv.image(k));
    }
    a.trace_.push_back(e);
    return a;
  }

  static Automorphism from_trace(int rank, std::span<const Elementary> trace) {
    Automorphism a = identity(rank);
    for (const auto& e : trace) a = compose(a, elementary(rank, e));
    return a;
  }

  int rank() const { return rank_; }
  const std::vector<Word>& forward_images() const { return forward_; }
  const std::vector<Word>& inverse_images() const { return inverse_; }
  const std::vector<Elementary>& trace() const { return trace_; }
  const Word& image(int k) const { return forward_[static_cast<std::size_t>(k - 1)]; }

  bool is_identity() const {
    for (int k = 1; k <= rank_; ++k)
      if (forward_[static_cast<std::size_t>(k - 1)] != Word{Letter(k, 1)}) return false;
    return true;
  }

  // phi o psi
  friend Automorphism compose(const Automorphism& phi, const Automorphism& psi) {
    check_same_rank(phi, psi);
    Automorphism r;
    r.rank_ = phi.rank_;
    r.forward_.reserve(phi.forward_.size());
    r.inverse_.reserve(phi.inverse_.size());
    for (const Word& w : psi.forward_) r.forward_.push_back(substitute(phi.forward_, w.letters()));
    for (const Word& w : phi.inverse_) r.inverse_.push_back(substitute(psi.inverse_, w.letters()));
    r.trace_ = phi.trace_;
    r.trace_.insert(r.trace_.end(), psi.trace_.begin(), psi.trace_.end());
#ifndef NDEBUG
    for (int k = 1; k <= r.rank_; ++k) {
      const Word ak{Letter(k, 1)};
      assert(substitute(r.inverse_, r.forward_[static_cast<std::size_t>(k - 1)].letters()) == ak);
      assert(substitute(r.forward_, r.inverse_[static_cast<std::size_t>(k - 1)].letters()) == ak);
    }
#endif
    return r;
  }

  friend Automorphism invert(const Automorphism& phi) {
    Automorphism r;
    r.rank_ = phi.rank_;
    r.forward_ = phi.inverse_;
    r.inverse_ = phi.forward_;
    r.trace_.reserve(phi.trace_.size());
    for (auto it = phi.trace_.rbegin(); it != phi.trace_.rend(); ++it) r.trace_.push_back(it->inverse());
    return r;
  }

  // Equality of the automorphisms themselves (images), ignoring how they were built.
  bool same_images(const Automorphism& other) const {
    return rank_ == other.rank_ && forward_ == other.forward_ && inverse_ == other.inverse_;
  }

  friend bool operator==(const Automorphism&, const Automorphism&) = default;

  // "a>ab; b>b"
  std::string images_str() const {
    std::string s;
    for (int k = 1; k <= rank_; ++k) {
      if (k > 1) s += "; ";
      s += Letter(k, 1).to_char();
      s += '>';
      const Word& w = forward_[static_cast<std::size_t>(k - 1)];
      s += w.empty() ? "1" : w.str();
    }
    return s;
  }

  std::string trace_str() const {
    std::string s;
    for (std::size_t i = 0; i < trace_.size(); ++i) {
      if (i) s += ' ';
      s += trace_[i].str();
    }
    return s;
  }

 private:
  static void check_same_rank(const Automorphism& x, const Automorphism& y) {
    if (x.rank_ != y.rank_)
      throw InvalidInput("rank mismatch: " + std::to_string(x.rank_) + " vs " + std::to_string(y.rank_));
  }

  int rank_ = 0;
  std::vector<Word> forward_;
  std::vector<Word> inverse_;
  std::vector<Elementary> trace_;
};

// phi(w)
inline Word apply(const Automorphism& phi, const Word& w) {
  if (w.max_generator() > phi.rank())
    throw InvalidInput("rank mismatch: word '" + w.str() + "' for automorphism of rank " + std::to_string(phi.rank()));
  return substitute(phi.forward_images(), w.letters());
}

inline CyclicWord apply(const Automorphism& phi, const CyclicWord& g) { return cyclic_reduce(apply(phi, g.word())).cls; }

inline Automorphism elementary(int rank, ElementaryKind kind, int i, int j = 0, int sign = 1) {
  return Automorphism::elementary(rank, Elementary(kind, i, j, sign));
}

// All elementary generators of rank N (both signs of every multiply).
inline std::vector<Elementary> all_elementaries(int rank) {
  check_rank(rank);
  std::vector<Elementary> out;
  for (int i = 1; i <= rank; ++i) {
    for (int j = 1; j <= rank; ++j) {
      if (i == j) continue;
      for (int s : {1, -1}) {
        out.push_back(Elementary::right(i, j, s));
        out.push_back(Elementary::left(i, j, s));
      }
      if (i < j) out.push_back(Elementary::transposition(i, j));
    }
    out.push_back(Elementary::inversion(i));
  }
  return out;
}

inline Automorphism parse_trace(int rank, std::span<const std::string> items) {
  std::vector<Elementary> trace;
  for (const auto& s : items) trace.push_back(parse_elementary(s));
  return Automorphism::from_trace(rank, trace);
}

// Finds a generator trace for an automorphism given only by its images
// ("a>ab; b>b"), by greedy Nielsen reduction of the image tuple: repeatedly
// replace u_i with u_i u_j^e or u_j^e u_i when that shortens it, then sort the
// resulting signed permutation. Throws InvalidInput if the tuple does not
// reduce to a basis this way; the search never certifies a non-automorphism.
inline Automorphism certify_images(int rank, std::vector<Word> images) {
  check_rank(rank);
  if (static_cast<int>(images.size()) != rank)
    throw InvalidInput("expected " + std::to_string(rank) + " images, got " + std::to_string(images.size()));
  for (const auto& w : images) check_word_rank(w, rank);
  const std::vector<Word> target = images;
  std::vector<Elementary> moves;  // images o E1 o E2 ... tends to identity
  auto right_compose = [&](const Elementary& e) {
    std::vector<Word> next;
    for (int k = 1; k <= rank; ++k) next.push_back(substitute(images, e.image(k).letters()));
    images = std::move(next);
    moves.push_back(e);
  };
  const std::size_t step_limit = 100000;
  for (std::size_t step = 0; step < step_limit; ++step) {
    std::size_t best_gain = 0;
    std::optional<Elementary> best;
    for (int i = 1; i <= rank; ++i) {
      const Word& ui = images[static_cast<std::size_t>(i - 1)];
      if (ui.empty()) throw InvalidInput("images do not define an automorphism (trivial image)");
      for (int j = 1; j <= rank; ++j) {
        if (i == j) continue;
        for (int s : {1, -1}) {
          for (auto e : {Elementary::right(i, j, s), Elementary::left(i, j, s)}) {
            const Word cand = substitute(images, e.image(i).letters());
            if (cand.size() < ui.size() && ui.size() - cand.size() > best_gain) {
              best_gain = ui.size() - cand.size();
              best = e;
            }
          }
        }
      }
    }
    if (!best) break;
    right_compose(*best);
  }
  for (const auto& w : images)
    if (w.size() != 1)
      throw InvalidInput("could not certify images as an automorphism; supply a generator trace instead");
  for (int i = 1; i <= rank; ++i)
    if (images[static_cast<std::size_t>(i - 1)][0].sign() < 0) right_compose(Elementary::inversion(i));
  for (int i = 1; i <= rank; ++i) {
    // images[i-1] = a_{p(i)}; bring a_i into slot i.
    for (int j = i; j <= rank; ++j) {
      if (images[static_cast<std::size_t>(j - 1)][0].generator() == i) {
        if (j != i) right_compose(Elementary::transposition(i, j));
        break;
      }
    }
  }
  for (int k = 1; k <= rank; ++k)
    if (images[static_cast<std::size_t>(k - 1)] != Word{Letter(k, 1)})
      throw InvalidInput("images do not define an automorphism (not a basis)");
  // images o E1 o ... o Em = id  =>  images = Em^-1 o ... o E1^-1
  std::vector<Elementary> trace;
  for (auto it = moves.rbegin(); it != moves.rend(); ++it) trace.push_back(it->inverse());
  Automorphism phi = Automorphism::from_trace(rank, trace);
  if (phi.forward_images() != target) throw InternalError("certified trace does not reproduce the images");
  return phi;
}

// Literal form "a>ab; b>b". Generators without a clause map to themselves.
inline Automorphism parse_automorphism_literal(int rank, std::string_view text) {
  check_rank(rank);
  std::vector<Word> images;
  for (int k = 1; k <= rank; ++k) images.push_back(Word{Letter(k, 1)});
  std::vector<bool> seen(static_cast<std::size_t>(rank), false);
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string clause;
    for (char c : text.substr(pos, end - pos))
      if (c != ' ') clause.push_back(c);
    pos = end + 1;
    if (clause.empty()) continue;
    const auto gt = clause.find('>');
    if (gt != 1) throw InvalidInput("malformed automorphism clause '" + clause + "'");
    Letter x = parse_letter(clause[0]);
    if (x.sign() < 0 || x.generator() > rank) throw InvalidInput("bad generator in clause '" + clause + "'");
    if (seen[static_cast<std::size_t>(x.generator() - 1)]) throw InvalidInput("generator assigned twice in '" + clause + "'");
    seen[static_cast<std::size_t>(x.generator() - 1)] = true;
    images[static_cast<std::size_t>(x.generator() - 1)] = parse_word(clause.substr(2), rank);
  }
  return certify_images(rank, std::move(images));
}

}  // namespace rwlab
