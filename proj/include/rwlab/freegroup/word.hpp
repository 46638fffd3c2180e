#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rwlab/error.hpp"

namespace rwlab {

inline constexpr int kMaxRank = 16;
inline constexpr int kMinRank = 2;

inline void check_rank(int rank) {
  if (rank < kMinRank || rank > kMaxRank)
    throw InvalidInput("rank must lie in [2, 16], got " + std::to_string(rank));
}

// A generator a_i or its inverse, packed into one signed byte (+i / -i).
//
// The total order used for canonical rotations is a_1 < a_1^-1 < a_2 < ...
class Letter {
 public:
  constexpr Letter() = default;
  constexpr Letter(int generator, int sign) : code_(static_cast<std::int8_t>(sign < 0 ? -generator : generator)) {
    if (generator < 1 || generator > kMaxRank || (sign != 1 && sign != -1))
      throw InvalidInput("letter out of range: generator " + std::to_string(generator));
  }

  static constexpr Letter from_code(int code) { return Letter(code < 0 ? -code : code, code < 0 ? -1 : 1); }

  constexpr int generator() const { return code_ < 0 ? -code_ : code_; }
  constexpr int sign() const { return code_ < 0 ? -1 : 1; }
  constexpr int code() const { return code_; }
  constexpr Letter inverse() const { return from_raw(static_cast<std::int8_t>(-code_)); }
  constexpr int order_key() const { return 2 * (generator() - 1) + (code_ < 0 ? 1 : 0); }

  // 'a'..'p' for generators, 'A'..'P' for inverses.
  constexpr char to_char() const {
    return static_cast<char>((code_ < 0 ? 'A' : 'a') + generator() - 1);
  }

  friend constexpr bool operator==(Letter x, Letter y) { return x.code_ == y.code_; }
  friend constexpr std::strong_ordering operator<=>(Letter x, Letter y) { return x.order_key() <=> y.order_key(); }

 private:
  static constexpr Letter from_raw(std::int8_t c) {
    Letter l;
    l.code_ = c;
    return l;
  }
  std::int8_t code_ = 1;
};

inline Letter parse_letter(char c) {
  if (c >= 'a' && c <= 'p') return Letter(c - 'a' + 1, 1);
  if (c >= 'A' && c <= 'P') return Letter(c - 'A' + 1, -1);
  throw InvalidInput(std::string("not a letter: '") + c + "'");
}

// Appends `l` to a freely reduced buffer, cancelling against its last letter.
inline void push_reduced(std::vector<Letter>& out, Letter l) {
  if (!out.empty() && out.back() == l.inverse())
    out.pop_back();
  else
    out.push_back(l);
}

// A freely reduced word: no letter is followed by its inverse.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<Letter> raw) { assign_reduced(raw.begin(), raw.end()); }

  // Freely reduces an arbitrary letter sequence.
  static Word reduce(std::span<const Letter> raw) {
    Word w;
    w.assign_reduced(raw.begin(), raw.end());
    return w;
  }

  // Wraps letters that the caller guarantees are already reduced.
  static Word from_reduced(std::vector<Letter> letters) {
    Word w;
    w.letters_ = std::move(letters);
    return w;
  }

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }
  auto begin() const { return letters_.begin(); }
  auto end() const { return letters_.end(); }
  std::span<const Letter> letters() const { return letters_; }

  int max_generator() const {
    int m = 0;
    for (Letter l : letters_) m = std::max(m, l.generator());
    return m;
  }

  Word inverse() const {
    std::vector<Letter> out;
    out.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.push_back(it->inverse());
    return from_reduced(std::move(out));
  }

  // Reduced product u*v.
  friend Word operator*(const Word& u, const Word& v) {
    std::vector<Letter> out;
    out.reserve(u.size() + v.size());
    out.assign(u.letters_.begin(), u.letters_.end());
    for (Letter l : v.letters_) push_reduced(out, l);
    return from_reduced(std::move(out));
  }

  Word prefix(std::size_t n) const {
    return from_reduced(std::vector<Letter>(letters_.begin(), letters_.begin() + std::min(n, size())));
  }
  Word suffix_from(std::size_t n) const {
    return from_reduced(std::vector<Letter>(letters_.begin() + std::min(n, size()), letters_.end()));
  }

  std::string str() const {
    std::string s;
    s.reserve(letters_.size());
    for (Letter l : letters_) s.push_back(l.to_char());
    return s;
  }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word& x, const Word& y) {
    return std::lexicographical_compare_three_way(x.letters_.begin(), x.letters_.end(), y.letters_.begin(),
                                                  y.letters_.end());
  }

 private:
  template <class It>
  void assign_reduced(It first, It last) {
    letters_.clear();
    for (; first != last; ++first) push_reduced(letters_, *first);
  }

  std::vector<Letter> letters_;
};

inline void check_word_rank(const Word& w, int rank) {
  if (w.max_generator() > rank)
    throw InvalidInput("word '" + w.str() + "' uses a generator beyond rank " + std::to_string(rank));
}

// Freely reduces `raw`, rejecting letters whose index exceeds `rank`.
inline Word reduce(std::span<const Letter> raw, int rank) {
  check_rank(rank);
  for (Letter l : raw)
    if (l.generator() > rank)
      throw InvalidInput("letter '" + std::string(1, l.to_char()) + "' out of rank " + std::to_string(rank));
  return Word::reduce(raw);
}

// Literal syntax: "abA" = a b a^-1. "1" and "" denote the empty word.
inline std::vector<Letter> parse_letters(std::string_view text) {
  std::vector<Letter> out;
  if (text == "1") return out;
  for (char c : text) {
    if (c == ' ') continue;
    out.push_back(parse_letter(c));
  }
  return out;
}

inline Word parse_word(std::string_view text, int rank) {
  auto raw = parse_letters(text);
  return reduce(raw, rank);
}

// Length of the longest common prefix.
inline std::size_t common_prefix(std::span<const Letter> u, std::span<const Letter> v) {
  std::size_t n = std::min(u.size(), v.size());
  std::size_t k = 0;
  while (k < n && u[k] == v[k]) ++k;
  return k;
}

}  // namespace rwlab

template <>
struct std::hash<rwlab::Word> {
  std::size_t operator()(const rwlab::Word& w) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto l : w) {
      h ^= static_cast<std::uint8_t>(l.code());
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};
