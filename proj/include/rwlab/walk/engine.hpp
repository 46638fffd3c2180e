#pragma once

// Monte Carlo driver for left random walks.
//
// Outer mode: Phi_n = s_n o ... o s_1 with s_k ~ mu on Aut(F_N); records
// kappa(Phi_n) and sigma(Phi_n, g) for the tracked classes g.
// Tree mode: g_n = s_n ... s_1 with s_k ~ mu on F_N; records |g_n| (= kappa in
// the tree) and beta(g_n, x) for the tracked boundary points x. The walker
// keeps the word g_n^-1 = s_1^-1 ... s_n^-1 as a stack, whose limit is the
// boundary point bnd.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rwlab/error.hpp"
#include "rwlab/freegroup/automorphism.hpp"
#include "rwlab/freegroup/cyclic_word.hpp"
#include "rwlab/outer/outer_space.hpp"
#include "rwlab/outer/rank2_lengths.hpp"
#include "rwlab/tree/boundary.hpp"
#include "rwlab/walk/measure.hpp"
#include "rwlab/walk/philox.hpp"

namespace rwlab {

enum class WalkMode { outer, tree };

// exact: maintain Phi_n(a_i) and Phi_n(g) as words.
// lengths: rank 2 only; maintain the abelianization of Phi_n, which gives
// exact cyclic lengths of primitive classes (see rank2_lengths.hpp).
enum class Tracking { exact, lengths };

inline constexpr std::size_t kDefaultWordCap = std::size_t{1} << 24;

struct WalkConfig {
  int rank = 2;
  WalkMode mode = WalkMode::outer;
  std::uint32_t horizon = 1;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> checkpoints;
  std::vector<CyclicWord> tracked_classes;    // outer mode
  std::vector<BoundaryPoint> tracked_points;  // tree mode
  Tracking tracking = Tracking::exact;
  std::size_t word_cap = kDefaultWordCap;
  std::size_t resync_cap = 4096;  // lengths mode: exact words are kept and compared while this short
  unsigned threads = 1;

  std::size_t tracked_count() const { return mode == WalkMode::outer ? tracked_classes.size() : tracked_points.size(); }

  void validate() const {
    check_rank(rank);
    if (horizon < 1) throw InvalidInput("horizon must be at least 1");
    if (trials < 1) throw InvalidInput("trials must be at least 1");
    if (checkpoints.empty()) throw InvalidInput("checkpoint list is empty");
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
      if (checkpoints[k] < 1 || checkpoints[k] > horizon)
        throw InvalidInput("checkpoint " + std::to_string(checkpoints[k]) + " outside [1, horizon]");
      if (k > 0 && checkpoints[k] <= checkpoints[k - 1]) throw InvalidInput("checkpoints must be strictly increasing");
    }
    if (threads < 1) throw InvalidInput("threads must be at least 1");
    if (word_cap < 1) throw InvalidInput("word cap must be positive");
    for (const auto& g : tracked_classes) {
      if (g.empty()) throw InvalidInput("tracked class must be nontrivial");
      check_word_rank(g.word(), rank);
    }
    for (const auto& x : tracked_points)
      if (x.max_generator() > rank) throw InvalidInput("tracked boundary point " + x.str() + " exceeds the rank");
    if (mode == WalkMode::tree && !tracked_classes.empty())
      throw InvalidInput("tree mode tracks boundary points, not conjugacy classes");
    if (mode == WalkMode::outer && !tracked_points.empty())
      throw InvalidInput("outer mode tracks conjugacy classes, not boundary points");
    if (tracking == Tracking::lengths) {
      if (mode != WalkMode::outer || rank != 2) throw InvalidInput("length tracking needs outer mode in rank 2");
      for (const auto& g : tracked_classes) {
        if (!certify_primitive(g, 2))
          throw InvalidInput("length tracking needs primitive classes; could not certify '" + g.str() + "'");
        if (l1_norm(abelianize2(g.word())) != static_cast<long>(g.size()))
          throw InternalError("primitive class '" + g.str() + "' has length != abelianization norm");
      }
    }
  }
};

struct PathRecord {
  std::uint64_t trial = 0;
  std::vector<double> kappa;               // per checkpoint
  std::vector<std::vector<double>> sigma;  // [tracked][checkpoint]
  std::vector<std::int64_t> tracking;      // tree mode, per checkpoint; -1 when undecidable
  std::optional<BoundaryPoint> boundary;   // tree mode: truncated estimate of bnd
  std::uint64_t sigma_kappa_violations = 0;
  std::size_t max_word_length = 0;

  friend bool operator==(const PathRecord&, const PathRecord&) = default;
};

struct TrialError {
  std::uint64_t trial = 0;
  std::string message;
};

struct ExperimentResult {
  WalkConfig config;
  std::vector<PathRecord> records;  // successful trials, by trial index
  std::vector<TrialError> errors;   // failed trials, by trial index
};

// Atom index of the step-th increment (1-based) of a trial.
template <class Element>
std::size_t draw_increment(const Measure<Element>& mu, const CounterRng& rng, std::uint64_t trial, std::uint32_t step) {
  return mu.sample_index(rng.uniform(trial, step));
}

template <class Element>
std::vector<std::size_t> increment_indices(const Measure<Element>& mu, const WalkConfig& cfg, std::uint64_t trial) {
  const CounterRng rng(cfg.seed);
  std::vector<std::size_t> out;
  for (std::uint32_t n = 1; n <= cfg.horizon; ++n) out.push_back(draw_increment(mu, rng, trial, n));
  return out;
}

namespace detail {

inline std::size_t cyclic_len(std::span<const Letter> w) { return w.size() - 2 * cyclic_cancellation(w); }

// kappa ratio from generator images held as raw letter vectors.
inline Ratio kappa_ratio_raw(const std::vector<std::vector<Letter>>& images) {
  Ratio best(0, 1);
  for (const auto& w : images) {
    const Ratio r(static_cast<int128>(cyclic_len(w)), 1);
    if (r > best) best = r;
  }
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = i + 1; j < images.size(); ++j)
      for (int e : {1, -1}) {
        const Ratio r(static_cast<int128>(cyclic_length_of_product(images[i], images[j], e)), 2);
        if (r > best) best = r;
      }
  return best;
}

// Replaces w by phi(w), reusing `scratch` as the second buffer. When `cyclic`
// is set the result is trimmed to its cyclic reduction (a conjugate).
inline void apply_in_place(std::vector<Letter>& w, std::vector<Letter>& scratch, const Automorphism& phi, bool cyclic) {
  scratch.clear();
  substitute_into(scratch, phi.forward_images(), w);
  if (cyclic) {
    const std::size_t c = cyclic_cancellation(scratch);
    if (c > 0) {
      scratch.erase(scratch.end() - static_cast<std::ptrdiff_t>(c), scratch.end());
      scratch.erase(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(c));
    }
  }
  w.swap(scratch);
}

inline void check_cap(std::size_t len, const WalkConfig& cfg, std::uint64_t trial, std::uint32_t step) {
  if (len > cfg.word_cap)
    throw ResourceError("trial " + std::to_string(trial) + ", step " + std::to_string(step) + ": word length " +
                        std::to_string(len) + " exceeds the cap of " + std::to_string(cfg.word_cap) + " letters");
}

// Deterministic 1% selection of checkpoints for the from-scratch recomputation.
inline bool spot_check_selected(std::uint64_t seed, std::uint64_t trial, std::size_t checkpoint) {
  std::uint64_t h = seed ^ (trial * 0x9E3779B97F4A7C15ull) ^ (checkpoint * 0xC2B2AE3D27D4EB4Full);
  h ^= h >> 31;
  h *= 0xBF58476D1CE4E5B9ull;
  h ^= h >> 29;
  return h % 100 == 0;
}

inline PathRecord empty_record(const WalkConfig& cfg, std::uint64_t trial) {
  PathRecord rec;
  rec.trial = trial;
  rec.kappa.reserve(cfg.checkpoints.size());
  rec.sigma.assign(cfg.tracked_count(), {});
  for (auto& s : rec.sigma) s.reserve(cfg.checkpoints.size());
  return rec;
}

inline PathRecord sample_outer_exact(const OuterMeasure& mu, const WalkConfig& cfg, std::uint64_t trial) {
  const CounterRng rng(cfg.seed);
  PathRecord rec = empty_record(cfg, trial);
  std::vector<std::vector<Letter>> images;
  for (int k = 1; k <= cfg.rank; ++k) images.push_back({Letter(k, 1)});
  std::vector<std::vector<Letter>> words;
  for (const auto& g : cfg.tracked_classes) words.emplace_back(g.word().begin(), g.word().end());
  std::vector<Letter> scratch;
  std::size_t next_cp = 0;
  for (std::uint32_t n = 1; n <= cfg.horizon; ++n) {
    const Automorphism& s = mu.atoms()[draw_increment(mu, rng, trial, n)].element;
    for (auto& w : images) {
      apply_in_place(w, scratch, s, false);
      check_cap(w.size(), cfg, trial, n);
      rec.max_word_length = std::max(rec.max_word_length, w.size());
    }
    for (auto& w : words) {
      apply_in_place(w, scratch, s, true);
      check_cap(w.size(), cfg, trial, n);
      rec.max_word_length = std::max(rec.max_word_length, w.size());
    }
    if (next_cp < cfg.checkpoints.size() && cfg.checkpoints[next_cp] == n) {
      const Ratio k = kappa_ratio_raw(images);
      rec.kappa.push_back(k.log());
      const bool spot = spot_check_selected(cfg.seed, trial, next_cp);
      for (std::size_t j = 0; j < words.size(); ++j) {
        const auto& g = cfg.tracked_classes[j];
        const Ratio r(static_cast<int128>(words[j].size()), static_cast<int128>(g.size()));
        if (r > k) ++rec.sigma_kappa_violations;
        rec.sigma[j].push_back(r.log());
        if (spot) {
          std::vector<Letter> direct;
          for (Letter l : g.word()) {
            const auto& img = images[static_cast<std::size_t>(l.generator() - 1)];
            if (l.sign() > 0)
              for (Letter x : img) push_reduced(direct, x);
            else
              for (auto it = img.rbegin(); it != img.rend(); ++it) push_reduced(direct, it->inverse());
          }
          const auto a = cyclic_reduce(Word::from_reduced(std::move(direct))).cls;
          const auto b = cyclic_reduce(Word::from_reduced(words[j])).cls;
          if (a != b)
            throw InternalError("trial " + std::to_string(trial) + ", step " + std::to_string(n) +
                                ": incremental image of '" + g.str() + "' disagrees with recomputation");
        }
      }
      ++next_cp;
    }
  }
  return rec;
}

inline PathRecord sample_outer_lengths(const OuterMeasure& mu, const WalkConfig& cfg, std::uint64_t trial) {
  const CounterRng rng(cfg.seed);
  PathRecord rec = empty_record(cfg, trial);
  std::vector<Matrix2> steps;
  for (const auto& a : mu.atoms()) steps.push_back(Matrix2::of(a.element));
  std::vector<Vec2> vecs;
  for (const auto& g : cfg.tracked_classes) vecs.push_back(abelianize2(g.word()));
  Matrix2 m = Matrix2::identity();

  // Exact words alongside, while short, as an independent check of the length model.
  bool syncing = true;
  std::vector<std::vector<Letter>> images{{Letter(1, 1)}, {Letter(2, 1)}};
  std::vector<std::vector<Letter>> words;
  for (const auto& g : cfg.tracked_classes) words.emplace_back(g.word().begin(), g.word().end());
  std::vector<Letter> scratch;

  std::size_t next_cp = 0;
  for (std::uint32_t n = 1; n <= cfg.horizon; ++n) {
    const std::size_t idx = draw_increment(mu, rng, trial, n);
    m = steps[idx] * m;
    if (syncing) {
      const Automorphism& s = mu.atoms()[idx].element;
      for (auto& w : images) apply_in_place(w, scratch, s, false);
      for (auto& w : words) apply_in_place(w, scratch, s, true);
      std::size_t longest = 0;
      for (const auto& w : images) longest = std::max(longest, w.size());
      for (const auto& w : words) longest = std::max(longest, w.size());
      rec.max_word_length = std::max(rec.max_word_length, longest);
      if (longest > cfg.resync_cap) syncing = false;
    }
    if (next_cp < cfg.checkpoints.size() && cfg.checkpoints[next_cp] == n) {
      const BigRatio k = kappa_ratio2(m);
      rec.kappa.push_back(k.log());
      for (std::size_t j = 0; j < vecs.size(); ++j) {
        const BigInt len = primitive_length(m, vecs[j]);
        const BigRatio r(len, BigInt(cfg.tracked_classes[j].size()));
        if (r > k) ++rec.sigma_kappa_violations;
        rec.sigma[j].push_back(r.log());
        if (syncing && BigInt(words[j].size()) != len)
          throw InternalError("trial " + std::to_string(trial) + ", step " + std::to_string(n) +
                              ": length model disagrees with the exact word for '" + cfg.tracked_classes[j].str() + "'");
      }
      if (syncing && BigRatio(kappa_ratio_raw(images)) != k)
        throw InternalError("trial " + std::to_string(trial) + ", step " + std::to_string(n) +
                            ": length model disagrees with the exact kappa");
      ++next_cp;
    }
  }
  return rec;
}

inline std::size_t stack_common_prefix(const std::vector<Letter>& u, const std::vector<Letter>& v) {
  return common_prefix(std::span<const Letter>(u), std::span<const Letter>(v));
}

inline std::size_t point_common_prefix(const std::vector<Letter>& w, const BoundaryPoint& x) {
  std::size_t k = 0;
  while (k < w.size() && x.at(k) == w[k]) ++k;
  return k;
}

inline PathRecord sample_tree(const TreeMeasure& mu, const WalkConfig& cfg, std::uint64_t trial) {
  const CounterRng rng(cfg.seed);
  PathRecord rec = empty_record(cfg, trial);
  std::vector<Word> inverses;
  for (const auto& a : mu.atoms()) inverses.push_back(a.element.inverse());
  std::vector<Letter> pos;  // g_n^-1
  std::vector<std::vector<Letter>> snapshots;
  snapshots.reserve(cfg.checkpoints.size());
  std::size_t next_cp = 0;
  for (std::uint32_t n = 1; n <= cfg.horizon; ++n) {
    for (Letter l : inverses[draw_increment(mu, rng, trial, n)]) push_reduced(pos, l);
    rec.max_word_length = std::max(rec.max_word_length, pos.size());
    if (next_cp < cfg.checkpoints.size() && cfg.checkpoints[next_cp] == n) {
      const auto len = static_cast<std::int64_t>(pos.size());
      rec.kappa.push_back(static_cast<double>(len));
      for (std::size_t j = 0; j < cfg.tracked_points.size(); ++j) {
        const auto beta = len - 2 * static_cast<std::int64_t>(point_common_prefix(pos, cfg.tracked_points[j]));
        if (beta > len || beta < -len) ++rec.sigma_kappa_violations;
        rec.sigma[j].push_back(static_cast<double>(beta));
      }
      snapshots.push_back(pos);
      ++next_cp;
    }
  }
  // bnd: the final position, trusted up to the shortest prefix shared with
  // the positions at the last 10% (at least two) of the checkpoints.
  const std::size_t kc = cfg.checkpoints.size();
  const std::size_t window = std::min(kc, std::max<std::size_t>(2, (kc + 9) / 10));
  std::size_t depth = pos.size();
  for (std::size_t c = kc - window; c < kc; ++c) depth = std::min(depth, stack_common_prefix(snapshots[c], pos));
  rec.boundary = BoundaryPoint::truncated(Word::from_reduced(pos), depth);
  for (const auto& snap : snapshots) {
    const std::size_t cp = std::min(stack_common_prefix(snap, pos), depth);
    if (cp < snap.size() && cp < depth)
      rec.tracking.push_back(static_cast<std::int64_t>(snap.size() - cp));
    else if (snap.size() <= depth)
      rec.tracking.push_back(0);
    else
      rec.tracking.push_back(-1);
  }
  return rec;
}

}  // namespace detail

inline PathRecord sample_path(const OuterMeasure& mu, const WalkConfig& cfg, std::uint64_t trial) {
  if (cfg.mode != WalkMode::outer) throw InvalidInput("an Aut(F_N) measure needs outer mode");
  for (const auto& a : mu.atoms())
    if (a.element.rank() != cfg.rank) throw InvalidInput("measure atom rank differs from the configured rank");
  return cfg.tracking == Tracking::lengths ? detail::sample_outer_lengths(mu, cfg, trial)
                                           : detail::sample_outer_exact(mu, cfg, trial);
}

inline PathRecord sample_path(const TreeMeasure& mu, const WalkConfig& cfg, std::uint64_t trial) {
  if (cfg.mode != WalkMode::tree) throw InvalidInput("an F_N measure needs tree mode");
  for (const auto& a : mu.atoms()) check_word_rank(a.element, cfg.rank);
  return detail::sample_tree(mu, cfg, trial);
}

// Runs trials 0..trials-1 on cfg.threads workers. Each worker claims the next
// trial index from a shared counter and writes only its own result slot, so
// the output does not depend on scheduling.
template <class Element>
ExperimentResult run_experiment(const Measure<Element>& mu, const WalkConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.trials);
  std::vector<std::optional<PathRecord>> slots(n);
  std::vector<std::string> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next.fetch_add(1); t < n; t = next.fetch_add(1)) {
      try {
        slots[t] = sample_path(mu, cfg, t);
      } catch (const std::exception& e) {
        failures[t] = e.what();
        if (failures[t].empty()) failures[t] = "unknown error";
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(cfg.threads, n));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < workers; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  ExperimentResult out;
  out.config = cfg;
  for (std::size_t t = 0; t < n; ++t) {
    if (slots[t])
      out.records.push_back(std::move(*slots[t]));
    else
      out.errors.push_back({t, failures[t]});
  }
  return out;
}

}  // namespace rwlab
