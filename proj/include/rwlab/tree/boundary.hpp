#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "rwlab/freegroup/cyclic_word.hpp"
#include "rwlab/freegroup/word.hpp"

namespace rwlab {

// A point of the Gromov boundary of the Cayley tree of F_N: an infinite
// reduced word. Either eventually periodic (exact: preperiod . period^inf) or
// a truncation whose first `certified_depth` letters are trusted.
class BoundaryPoint {
 public:
  static constexpr std::size_t kInfiniteDepth = std::numeric_limits<std::size_t>::max();

  static BoundaryPoint periodic(Word preperiod, Word period) {
    if (period.empty()) throw InvalidInput("boundary period must be nonempty");
    if (cyclic_cancellation(period.letters()) != 0)
      throw InvalidInput("boundary period '" + period.str() + "' is not cyclically reduced");
    if (!preperiod.empty() && preperiod.back() == period.front().inverse())
      throw InvalidInput("boundary word is not reduced at the preperiod/period seam");
    BoundaryPoint p;
    p.truncated_ = false;
    p.canonicalize(std::move(preperiod), std::move(period));
    return p;
  }

  static BoundaryPoint truncated(Word prefix, std::size_t certified_depth) {
    if (certified_depth > prefix.size()) throw InvalidInput("certified depth exceeds prefix length");
    BoundaryPoint p;
    p.truncated_ = true;
    p.pre_ = prefix.prefix(certified_depth);
    p.depth_ = certified_depth;
    return p;
  }

  bool is_truncated() const { return truncated_; }
  std::size_t certified_depth() const { return truncated_ ? depth_ : kInfiniteDepth; }
  const Word& preperiod() const { return pre_; }  // the prefix, for truncated points
  const Word& period() const { return period_; }

  // k-th letter (0-based), or nullopt beyond the certified depth.
  std::optional<Letter> at(std::size_t k) const {
    if (k < pre_.size()) return pre_[k];
    if (truncated_) return std::nullopt;
    return period_[(k - pre_.size()) % period_.size()];
  }

  // The first n letters; throws Undecidable past the certified depth.
  Word prefix(std::size_t n) const {
    if (truncated_ && n > depth_)
      throw Undecidable("prefix of length " + std::to_string(n) + " exceeds certified depth " + std::to_string(depth_));
    std::vector<Letter> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) out.push_back(*at(k));
    return Word::from_reduced(std::move(out));
  }

  int max_generator() const { return std::max(pre_.max_generator(), period_.max_generator()); }

  // "pre:ab per:ba" or "prefix:abab depth:4"
  std::string str() const {
    if (truncated_) return "prefix:" + pre_.str() + " depth:" + std::to_string(depth_);
    return (pre_.empty() ? std::string() : "pre:" + pre_.str() + " ") + "per:" + period_.str();
  }

  friend bool operator==(const BoundaryPoint&, const BoundaryPoint&) = default;

 private:
  BoundaryPoint() = default;

  // Shortest period (primitive root) and shortest preperiod, so equal infinite
  // words have equal representations.
  void canonicalize(Word pre, Word per) {
    const std::size_t n = per.size();
    for (std::size_t d = 1; d <= n; ++d) {
      if (n % d != 0) continue;
      bool ok = true;
      for (std::size_t k = d; k < n && ok; ++k) ok = per[k] == per[k - d];
      if (ok) {
        per = per.prefix(d);
        break;
      }
    }
    std::vector<Letter> p(pre.begin(), pre.end());
    std::vector<Letter> q(per.begin(), per.end());
    while (!p.empty() && p.back() == q.back()) {
      p.pop_back();
      std::rotate(q.rbegin(), q.rbegin() + 1, q.rend());
    }
    pre_ = Word::from_reduced(std::move(p));
    period_ = Word::from_reduced(std::move(q));
  }

  bool truncated_ = false;
  Word pre_;
  Word period_;
  std::size_t depth_ = 0;
};

// "pre:ab per:ba", "per:a" (preperiod may be omitted), or "prefix:abab depth:4".
inline BoundaryPoint parse_boundary(std::string_view text, int rank) {
  std::string pre, per, prefix, depth;
  bool have_per = false, have_prefix = false, have_depth = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    std::size_t end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view tok = text.substr(pos, end - pos);
    pos = end;
    if (tok.empty()) continue;
    const auto colon = tok.find(':');
    if (colon == std::string_view::npos) throw InvalidInput("malformed boundary literal '" + std::string(text) + "'");
    const std::string key(tok.substr(0, colon));
    const std::string val(tok.substr(colon + 1));
    if (key == "pre")
      pre = val;
    else if (key == "per")
      per = val, have_per = true;
    else if (key == "prefix")
      prefix = val, have_prefix = true;
    else if (key == "depth")
      depth = val, have_depth = true;
    else
      throw InvalidInput("unknown boundary literal key '" + key + "'");
  }
  if (have_per && !have_prefix && !have_depth) return BoundaryPoint::periodic(parse_word(pre, rank), parse_word(per, rank));
  if (have_prefix && have_depth && !have_per && pre.empty()) {
    std::size_t d = 0;
    try {
      d = static_cast<std::size_t>(std::stoull(depth));
    } catch (const std::exception&) {
      throw InvalidInput("bad certified depth '" + depth + "'");
    }
    const auto raw = parse_letters(prefix);
    Word w = reduce(raw, rank);
    if (w.size() != raw.size()) throw InvalidInput("boundary prefix '" + prefix + "' is not reduced");
    return BoundaryPoint::truncated(std::move(w), d);
  }
  throw InvalidInput("boundary literal needs 'per:' or 'prefix:' with 'depth:', got '" + std::string(text) + "'");
}

}  // namespace rwlab
