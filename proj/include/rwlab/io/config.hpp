#pragma once

// Experiment configuration files (JSON). Field layout is described by
// schemas/experiment.schema.json; this reader enforces the same rules and
// reports violations with the line of the offending value.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rwlab/error.hpp"
#include "rwlab/freegroup/automorphism.hpp"
#include "rwlab/io/json_lines.hpp"
#include "rwlab/outer/outer_space.hpp"
#include "rwlab/stats/estimators.hpp"
#include "rwlab/tree/boundary.hpp"
#include "rwlab/walk/engine.hpp"
#include "rwlab/walk/measure.hpp"

namespace rwlab {

using json = nlohmann::json;

struct StatsOptions {
  DriftEstimator drift_estimator = DriftEstimator::horizon;
  std::optional<double> epsilon;  // absolute; otherwise epsilon_factor * lambda_hat
  double epsilon_factor = 0.2;
  std::vector<std::uint32_t> n_grid;  // deviation grid; empty means every checkpoint
  std::size_t observable = 0;         // 0 = kappa, k >= 1 = tracked item k-1
  std::size_t gap_class = 0;          // tracked index for the gap report
  double ks_alpha = 0.01;
  double relative_tolerance = 0.05;
  double tolerance_sigmas = 3;
};

struct DistanceSpec {
  RosePoint from;
  RosePoint to;
};

struct TreeLabOptions {
  std::vector<BoundaryPoint> x_points;
  std::optional<BoundaryPoint> tail_point;
  double alpha = 1.0;
  std::vector<std::uint64_t> n_grid;
};

struct ExperimentConfig {
  std::string path;
  json document;  // as read, with command-line overrides applied
  WalkConfig walk;
  std::optional<OuterMeasure> outer_measure;
  std::optional<TreeMeasure> tree_measure;
  StatsOptions stats;
  std::optional<DistanceSpec> distance;
  TreeLabOptions tree_lab;

  bool has_walk() const { return outer_measure.has_value() || tree_measure.has_value(); }

  Observable observable() const {
    return stats.observable == 0 ? Observable::kappa() : Observable::tracked(stats.observable - 1);
  }
};

namespace detail {

class ConfigReader {
 public:
  ConfigReader(const std::string& text, const json& doc) : lines_(text), doc_(doc) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
    throw ConfigError((pointer.empty() ? std::string("config") : pointer) + ": " + what, lines_.line(pointer));
  }

  const json& at(const std::string& pointer) const { return doc_.at(json::json_pointer(pointer)); }
  bool has(const std::string& pointer) const { return doc_.contains(json::json_pointer(pointer)); }

  std::int64_t integer(const std::string& p, std::int64_t lo, std::int64_t hi) const {
    const json& v = at(p);
    if (!v.is_number_integer()) fail(p, "expected an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(hi))
      fail(p, "must be at most " + std::to_string(hi));
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi) fail(p, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  std::uint64_t unsigned64(const std::string& p) const {
    const json& v = at(p);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail(p, "expected a nonnegative 64-bit integer");
  }

  double number(const std::string& p) const {
    const json& v = at(p);
    if (!v.is_number()) fail(p, "expected a number");
    return v.get<double>();
  }

  std::string str(const std::string& p) const {
    const json& v = at(p);
    if (!v.is_string()) fail(p, "expected a string");
    return v.get<std::string>();
  }

  const json& array(const std::string& p) const {
    const json& v = at(p);
    if (!v.is_array()) fail(p, "expected an array");
    return v;
  }

  const json& object(const std::string& p, const std::set<std::string>& allowed) const {
    const json& v = at(p);
    if (!v.is_object()) fail(p, "expected an object");
    for (const auto& [k, _] : v.items())
      if (!allowed.count(k)) fail(p + "/" + k, "unknown field '" + k + "'");
    return v;
  }

  // Runs f, turning library input errors into config errors at pointer p.
  template <class F>
  auto guarded(const std::string& p, F&& f) const {
    try {
      return f();
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidInput& e) {
      fail(p, e.what());
    }
  }

 private:
  JsonLineIndex lines_;
  const json& doc_;
};

inline Automorphism read_trace(const ConfigReader& r, const std::string& p, int rank) {
  const json& arr = r.array(p);
  std::vector<Elementary> trace;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string q = p + "/" + std::to_string(k);
    trace.push_back(r.guarded(q, [&] { return parse_elementary(r.str(q)); }));
  }
  return r.guarded(p, [&] { return Automorphism::from_trace(rank, trace); });
}

inline RosePoint read_rose(const ConfigReader& r, const std::string& p, int rank) {
  r.object(p, {"lengths", "marking_trace"});
  const json& ls = r.array(p + "/lengths");
  if (static_cast<int>(ls.size()) != rank) r.fail(p + "/lengths", "needs exactly " + std::to_string(rank) + " lengths");
  std::vector<double> lengths;
  for (std::size_t k = 0; k < ls.size(); ++k) lengths.push_back(r.number(p + "/lengths/" + std::to_string(k)));
  Automorphism marking = r.has(p + "/marking_trace") ? read_trace(r, p + "/marking_trace", rank) : Automorphism::identity(rank);
  return r.guarded(p + "/lengths", [&] { return RosePoint::from_lengths(lengths, marking); });
}

inline std::vector<std::uint32_t> read_u32_list(const ConfigReader& r, const std::string& p) {
  const json& arr = r.array(p);
  std::vector<std::uint32_t> out;
  for (std::size_t k = 0; k < arr.size(); ++k)
    out.push_back(static_cast<std::uint32_t>(r.integer(p + "/" + std::to_string(k), 1, 0xffffffffLL)));
  return out;
}

inline std::vector<std::uint32_t> every(std::uint32_t step, std::uint32_t horizon) {
  std::vector<std::uint32_t> out;
  for (std::uint64_t n = step; n <= horizon; n += step) out.push_back(static_cast<std::uint32_t>(n));
  if (out.empty() || out.back() != horizon) out.push_back(horizon);
  return out;
}

}  // namespace detail

inline const std::set<std::string>& config_fields() {
  static const std::set<std::string> f{"description", "rank",     "mode",     "measure",   "horizon",  "trials",
                                       "seed",        "checkpoints", "tracked", "tracking", "word_cap", "threads",
                                       "stats",       "distance", "tree_lab"};
  return f;
}

// Parses and validates a config document. Nothing is computed before this
// returns successfully.
inline ExperimentConfig parse_config_text(const std::string& text, const std::string& path = "<config>") {
  ExperimentConfig cfg;
  cfg.path = path;
  try {
    cfg.document = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  const detail::ConfigReader r(text, cfg.document);
  const json& doc = cfg.document;
  if (!doc.is_object()) r.fail("", "top level must be an object");
  r.object("", config_fields());
  if (!r.has("/rank")) r.fail("", "missing required field 'rank'");
  const int rank = static_cast<int>(r.integer("/rank", kMinRank, kMaxRank));
  WalkConfig& w = cfg.walk;
  w.rank = rank;

  if (r.has("/mode")) {
    const auto m = r.str("/mode");
    if (m == "outer")
      w.mode = WalkMode::outer;
    else if (m == "tree")
      w.mode = WalkMode::tree;
    else
      r.fail("/mode", "must be \"outer\" or \"tree\"");
  }

  if (r.has("/measure")) {
    const json& atoms = r.array("/measure");
    if (atoms.empty()) r.fail("/measure", "needs at least one atom");
    std::vector<OuterMeasure::Atom> outer;
    std::vector<TreeMeasure::Atom> tree;
    double total = 0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const std::string p = "/measure/" + std::to_string(k);
      if (w.mode == WalkMode::tree)
        r.object(p, {"word", "weight"});
      else
        r.object(p, {"trace", "images", "weight"});
      if (!r.has(p + "/weight")) r.fail(p, "missing 'weight'");
      const double wt = r.number(p + "/weight");
      if (!(wt > 0)) r.fail(p + "/weight", "weight must be positive");
      total += wt;
      if (w.mode == WalkMode::tree) {
        if (!r.has(p + "/word")) r.fail(p, "tree-mode atoms need 'word'");
        const std::string q = p + "/word";
        tree.push_back({r.guarded(q, [&] { return parse_word(r.str(q), rank); }), wt});
      } else {
        const bool has_trace = r.has(p + "/trace"), has_images = r.has(p + "/images");
        if (has_trace == has_images) r.fail(p, "outer-mode atoms need exactly one of 'trace' or 'images'");
        if (has_trace) {
          outer.push_back({detail::read_trace(r, p + "/trace", rank), wt});
        } else {
          const std::string q = p + "/images";
          outer.push_back({r.guarded(q, [&] { return parse_automorphism_literal(rank, r.str(q)); }), wt});
        }
      }
    }
    if (std::abs(total - 1.0) > 1e-12) r.fail("/measure", "weights must sum to 1 (got " + std::to_string(total) + ")");
    if (w.mode == WalkMode::tree)
      cfg.tree_measure.emplace(r.guarded("/measure", [&] { return TreeMeasure(std::move(tree)); }));
    else
      cfg.outer_measure.emplace(r.guarded("/measure", [&] { return OuterMeasure(std::move(outer)); }));
  }

  if (r.has("/horizon")) w.horizon = static_cast<std::uint32_t>(r.integer("/horizon", 1, 100'000'000));
  if (r.has("/trials")) w.trials = static_cast<std::uint64_t>(r.integer("/trials", 1, 100'000'000));
  if (r.has("/seed")) w.seed = r.unsigned64("/seed");
  if (r.has("/threads")) w.threads = static_cast<unsigned>(r.integer("/threads", 1, 1024));
  if (r.has("/word_cap")) w.word_cap = static_cast<std::size_t>(r.integer("/word_cap", 1, std::int64_t{1} << 40));
  if (r.has("/tracking")) {
    const auto t = r.str("/tracking");
    if (t == "exact")
      w.tracking = Tracking::exact;
    else if (t == "lengths")
      w.tracking = Tracking::lengths;
    else
      r.fail("/tracking", "must be \"exact\" or \"lengths\"");
  }
  if (r.has("/checkpoints")) {
    const json& c = doc["checkpoints"];
    if (c.is_object()) {
      r.object("/checkpoints", {"every"});
      if (!r.has("/checkpoints/every")) r.fail("/checkpoints", "object form needs 'every'");
      w.checkpoints = detail::every(static_cast<std::uint32_t>(r.integer("/checkpoints/every", 1, 0xffffffffLL)), w.horizon);
    } else {
      w.checkpoints = detail::read_u32_list(r, "/checkpoints");
      if (w.checkpoints.empty()) r.fail("/checkpoints", "checkpoint list is empty");
      for (std::size_t k = 0; k < w.checkpoints.size(); ++k) {
        const std::string p = "/checkpoints/" + std::to_string(k);
        if (w.checkpoints[k] > w.horizon) r.fail(p, "checkpoint beyond the horizon");
        if (k > 0 && w.checkpoints[k] <= w.checkpoints[k - 1]) r.fail(p, "checkpoints must be strictly increasing");
      }
    }
  } else {
    w.checkpoints = detail::every(std::max<std::uint32_t>(1, w.horizon / 20), w.horizon);
  }
  if (r.has("/tracked")) {
    const json& arr = r.array("/tracked");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string p = "/tracked/" + std::to_string(k);
      const std::string lit = r.str(p);
      if (w.mode == WalkMode::tree) {
        w.tracked_points.push_back(r.guarded(p, [&] { return parse_boundary(lit, rank); }));
      } else {
        const Word g = r.guarded(p, [&] { return parse_word(lit, rank); });
        if (g.empty()) r.fail(p, "tracked class must be nontrivial");
        w.tracked_classes.push_back(cyclic_reduce(g).cls);
      }
    }
  }
  if (cfg.has_walk()) {
    try {
      w.validate();
    } catch (const InternalError&) {
      throw;
    } catch (const InvalidInput& e) {
      r.fail("", e.what());
    }
  }

  if (r.has("/stats")) {
    r.object("/stats", {"drift_estimator", "epsilon", "epsilon_factor", "n_grid", "observable", "gap_class",
                        "ks_alpha", "relative_tolerance", "tolerance_sigmas"});
    StatsOptions& s = cfg.stats;
    if (r.has("/stats/drift_estimator")) {
      const auto e = r.str("/stats/drift_estimator");
      if (e == "horizon")
        s.drift_estimator = DriftEstimator::horizon;
      else if (e == "increment")
        s.drift_estimator = DriftEstimator::increment;
      else
        r.fail("/stats/drift_estimator", "must be \"horizon\" or \"increment\"");
    }
    if (r.has("/stats/epsilon")) {
      s.epsilon = r.number("/stats/epsilon");
      if (!(*s.epsilon > 0)) r.fail("/stats/epsilon", "must be positive");
    }
    if (r.has("/stats/epsilon_factor")) {
      s.epsilon_factor = r.number("/stats/epsilon_factor");
      if (!(s.epsilon_factor > 0)) r.fail("/stats/epsilon_factor", "must be positive");
    }
    if (r.has("/stats/n_grid")) {
      s.n_grid = detail::read_u32_list(r, "/stats/n_grid");
      for (std::size_t k = 0; k < s.n_grid.size(); ++k)
        if (std::find(w.checkpoints.begin(), w.checkpoints.end(), s.n_grid[k]) == w.checkpoints.end())
          r.fail("/stats/n_grid/" + std::to_string(k), "n = " + std::to_string(s.n_grid[k]) + " is not a checkpoint");
    }
    if (r.has("/stats/observable")) {
      const auto o = r.str("/stats/observable");
      if (o == "kappa") {
        s.observable = 0;
      } else {
        bool found = false;
        for (std::size_t j = 0; j < w.tracked_count() && !found; ++j)
          if (observable_name(w, Observable::tracked(j)) == o ||
              (w.mode == WalkMode::outer &&
               r.guarded("/stats/observable", [&] { return cyclic_reduce(parse_word(o, rank)).cls; }) == w.tracked_classes[j])) {
            s.observable = j + 1;
            found = true;
          }
        if (!found) r.fail("/stats/observable", "'" + o + "' is neither \"kappa\" nor a tracked item");
      }
    }
    if (r.has("/stats/gap_class")) {
      s.gap_class = static_cast<std::size_t>(r.integer("/stats/gap_class", 0, 1'000'000));
      if (s.gap_class >= w.tracked_count()) r.fail("/stats/gap_class", "index beyond the tracked list");
    }
    if (r.has("/stats/ks_alpha")) s.ks_alpha = r.number("/stats/ks_alpha");
    if (r.has("/stats/relative_tolerance")) s.relative_tolerance = r.number("/stats/relative_tolerance");
    if (r.has("/stats/tolerance_sigmas")) s.tolerance_sigmas = r.number("/stats/tolerance_sigmas");
  }

  if (r.has("/distance")) {
    r.object("/distance", {"from", "to"});
    if (!r.has("/distance/from") || !r.has("/distance/to")) r.fail("/distance", "needs 'from' and 'to'");
    cfg.distance.emplace(DistanceSpec{detail::read_rose(r, "/distance/from", rank), detail::read_rose(r, "/distance/to", rank)});
  }

  if (r.has("/tree_lab")) {
    r.object("/tree_lab", {"x_points", "tail_point", "alpha", "n_grid"});
    TreeLabOptions& t = cfg.tree_lab;
    if (r.has("/tree_lab/x_points")) {
      const json& arr = r.array("/tree_lab/x_points");
      for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string p = "/tree_lab/x_points/" + std::to_string(k);
        t.x_points.push_back(r.guarded(p, [&] { return parse_boundary(r.str(p), rank); }));
        if (t.x_points.back().is_truncated()) r.fail(p, "x points must be eventually periodic");
      }
    }
    if (r.has("/tree_lab/tail_point")) {
      t.tail_point = r.guarded("/tree_lab/tail_point", [&] { return parse_boundary(r.str("/tree_lab/tail_point"), rank); });
      if (t.tail_point->is_truncated()) r.fail("/tree_lab/tail_point", "must be eventually periodic");
    }
    if (r.has("/tree_lab/alpha")) {
      t.alpha = r.number("/tree_lab/alpha");
      if (!(t.alpha > 0)) r.fail("/tree_lab/alpha", "must be positive");
    }
    if (r.has("/tree_lab/n_grid")) {
      const json& arr = r.array("/tree_lab/n_grid");
      for (std::size_t k = 0; k < arr.size(); ++k)
        t.n_grid.push_back(static_cast<std::uint64_t>(r.integer("/tree_lab/n_grid/" + std::to_string(k), 1, 1'000'000)));
    }
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace rwlab
