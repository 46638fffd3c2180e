#pragma once

// Random instances for invariant checks. Uses std::mt19937_64 with an
// explicit seed; instances are reproducible for a given build.

#include <cstdint>
#include <random>
#include <vector>

#include "rwlab/freegroup/automorphism.hpp"
#include "rwlab/outer/outer_space.hpp"
#include "rwlab/tree/boundary.hpp"

namespace rwlab {

class InstanceGen {
 public:
  explicit InstanceGen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
  }

  Letter letter(int rank) {
    const int g = static_cast<int>(uniform(1, static_cast<std::uint64_t>(rank)));
    return Letter(g, uniform(0, 1) ? 1 : -1);
  }

  std::vector<Letter> raw(int rank, std::size_t len) {
    std::vector<Letter> out;
    for (std::size_t k = 0; k < len; ++k) out.push_back(letter(rank));
    return out;
  }

  // Reduced word of exactly `len` letters.
  Word word(int rank, std::size_t len) {
    std::vector<Letter> out;
    while (out.size() < len) {
      const Letter l = letter(rank);
      if (!out.empty() && out.back() == l.inverse()) continue;
      out.push_back(l);
    }
    return Word::from_reduced(std::move(out));
  }

  Word word_up_to(int rank, std::size_t max_len) { return word(rank, uniform(0, max_len)); }

  // Nontrivial cyclically reduced word.
  Word cyclic_word(int rank, std::size_t max_len) {
    for (;;) {
      Word w = word(rank, uniform(1, max_len));
      if (cyclic_cancellation(w.letters()) == 0) return w;
    }
  }

  Elementary elementary(int rank) {
    const auto all = all_elementaries(rank);
    return all[uniform(0, all.size() - 1)];
  }

  Automorphism automorphism(int rank, std::size_t steps) {
    std::vector<Elementary> trace;
    for (std::size_t k = 0; k < steps; ++k) trace.push_back(elementary(rank));
    return Automorphism::from_trace(rank, trace);
  }

  RosePoint rose(int rank, std::size_t marking_steps, std::int64_t max_weight = 9) {
    std::vector<std::int64_t> w;
    for (int k = 0; k < rank; ++k) w.push_back(static_cast<std::int64_t>(uniform(1, static_cast<std::uint64_t>(max_weight))));
    return RosePoint(std::move(w), automorphism(rank, marking_steps));
  }

  BoundaryPoint periodic_boundary(int rank, std::size_t max_pre, std::size_t max_per) {
    const Word per = cyclic_word(rank, max_per);
    for (;;) {
      const Word pre = word_up_to(rank, max_pre);
      if (!pre.empty() && pre.back() == per.front().inverse()) continue;
      return BoundaryPoint::periodic(pre, per);
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace rwlab
