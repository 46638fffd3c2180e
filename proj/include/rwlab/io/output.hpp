#pragma once

// Plot-ready CSV tables, a JSON summary mirroring them, and manifest.json.
// All text is produced deterministically (fixed formats, no timestamps), so
// reruns with the same config and seed are byte-identical.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <boost/version.hpp>

#include "json.hpp"

#include "rwlab/error.hpp"
#include "rwlab/experiments.hpp"
#include "rwlab/stats/estimators.hpp"
#include "rwlab/version.hpp"

namespace rwlab {

inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

// Fixed headers of every table the CLI can write.
inline const std::map<std::string, std::string>& csv_headers() {
  static const std::map<std::string, std::string> h{
      {"drift.csv", "class,lambda_hat,stderr"},
      {"clt.csv", "trial,standardized_value"},
      {"deviation.csv", "n,epsilon,probability"},
      {"gap.csv", "trial,sup_gap"},
      {"centering.csv", "x,estimate,stderr"},
      {"h2_tail.csv", "n,threshold,probability"},
  };
  return h;
}

inline std::string drift_csv(const DriftEstimate& d) {
  std::string s = csv_headers().at("drift.csv") + "\n";
  for (const auto& c : d.per_class) s += c.name + "," + fmt_double(c.estimate) + "," + fmt_double(c.std_error) + "\n";
  return s;
}

inline std::string clt_csv(const CltReport& c, const std::vector<PathRecord>& records) {
  std::string s = csv_headers().at("clt.csv") + "\n";
  for (std::size_t k = 0; k < c.standardized.size(); ++k)
    s += std::to_string(records[k].trial) + "," + fmt_double(c.standardized[k]) + "\n";
  return s;
}

inline std::string deviation_csv(const DeviationCurve& c) {
  std::string s = csv_headers().at("deviation.csv") + "\n";
  for (const auto& p : c.points) s += std::to_string(p.n) + "," + fmt_double(c.epsilon) + "," + fmt_double(p.probability) + "\n";
  return s;
}

inline std::string gap_csv(const GapReport& g, const std::vector<PathRecord>& records) {
  std::string s = csv_headers().at("gap.csv") + "\n";
  for (std::size_t k = 0; k < g.sup_gap.size(); ++k)
    s += std::to_string(records[k].trial) + "," + fmt_double(g.sup_gap[k]) + "\n";
  return s;
}

inline std::string centering_csv(const CenteringReport& c) {
  std::string s = csv_headers().at("centering.csv") + "\n";
  for (const auto& r : c.rows) s += r.x.str() + "," + fmt_double(r.estimate.mean) + "," + fmt_double(r.estimate.std_error) + "\n";
  return s;
}

inline std::string h2_csv(const TailCurve& t) {
  std::string s = csv_headers().at("h2_tail.csv") + "\n";
  for (const auto& p : t.points)
    s += std::to_string(p.n) + "," + fmt_double(p.threshold) + "," + fmt_double(p.probability) + "\n";
  return s;
}

inline nlohmann::json to_json(const DriftEstimate& d) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : d.per_class) rows.push_back({{"class", c.name}, {"lambda_hat", c.estimate}, {"stderr", c.std_error}});
  return {{"estimator", d.estimator == DriftEstimator::horizon ? "horizon" : "increment"},
          {"lambda_hat", d.lambda_hat},
          {"stderr", d.std_error},
          {"horizon", d.horizon},
          {"reference", d.reference},
          {"trials", d.trials},
          {"classes_disagree", d.classes_disagree},
          {"relative_spread", d.relative_spread},
          {"per_class", rows}};
}

inline nlohmann::json to_json(const CltReport& c) {
  nlohmann::json j{{"observable", c.name},
                   {"horizon", c.horizon},
                   {"variance_hat", c.variance_hat},
                   {"degenerate", c.degenerate},
                   {"standardized", c.standardized}};
  if (c.ks) {
    j["ks_statistic"] = c.ks->statistic;
    j["ks_p_value"] = c.ks->p_value;
  } else {
    j["ks_statistic"] = nullptr;
    j["ks_p_value"] = nullptr;
  }
  return j;
}

inline nlohmann::json to_json(const DeviationCurve& c) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : c.points) pts.push_back({{"n", p.n}, {"probability", p.probability}});
  return {{"observable", c.name},
          {"epsilon", c.epsilon},
          {"lambda_hat", c.lambda_hat},
          {"decay_rate_fit", c.decay_rate ? nlohmann::json(*c.decay_rate) : nlohmann::json(nullptr)},
          {"summable", c.summable},
          {"points", pts}};
}

inline nlohmann::json to_json(const GapReport& g) {
  return {{"class", g.name},         {"horizon", g.horizon}, {"half_horizon", g.half_horizon},
          {"median", g.median},      {"median_half", g.median_half}, {"q90", g.q90},
          {"q90_half", g.q90_half},  {"sup_gap", g.sup_gap}};
}

inline nlohmann::json to_json(const CenteringReport& c) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : c.rows)
    rows.push_back({{"x", r.x.str()},
                    {"estimate", r.estimate.mean},
                    {"stderr", r.estimate.std_error},
                    {"discrepancy", r.discrepancy},
                    {"combined_stderr", r.combined_se},
                    {"within_tolerance", r.within_tolerance}});
  return {{"lambda_hat", c.drift.lambda_hat},
          {"lambda_stderr", c.drift.std_error},
          {"tolerance_sigmas", c.tolerance_sigmas},
          {"max_pairwise_discrepancy", c.max_pairwise_discrepancy},
          {"max_discrepancy_from_drift", c.max_discrepancy_from_drift},
          {"rows", rows}};
}

inline nlohmann::json to_json(const TailCurve& t) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : t.points) pts.push_back({{"n", p.n}, {"threshold", p.threshold}, {"probability", p.probability}});
  return {{"geometric_rate", t.geometric_rate ? nlohmann::json(*t.geometric_rate) : nlohmann::json(nullptr)},
          {"points", pts}};
}

inline nlohmann::json errors_json(const std::vector<TrialError>& errors) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& e : errors) a.push_back({{"trial", e.trial}, {"message", e.message}});
  return a;
}

// Collects named outputs, then writes them and the manifest in one go.
class OutputSet {
 public:
  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
  const std::map<std::string, std::string>& files() const { return files_; }

  // Hash of the config with run-scheduling fields (threads) removed, so the
  // manifest does not depend on the worker count.
  static std::string config_hash(nlohmann::json doc) {
    doc.erase("threads");
    return hex64(fnv1a64(doc.dump()));
  }

  nlohmann::json manifest(const std::string& command, const nlohmann::json& config_doc, std::uint64_t seed) const {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [name, content] : files_)
      files.push_back({{"name", name}, {"bytes", content.size()}, {"fnv1a64", hex64(fnv1a64(content))}});
    return {{"tool", "rwlab"},
            {"version", kVersion},
            {"command", command},
            {"config_hash", config_hash(config_doc)},
            {"seed", seed},
            {"rng", "philox4x32-10"},
            {"libraries", {{"nlohmann_json", "3.11.3"}, {"boost", BOOST_LIB_VERSION}}},
            {"files", files}};
  }

  void write(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& config_doc,
             std::uint64_t seed) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
    for (const auto& [name, content] : files_) write_file(dir / name, content);
    write_file(dir / "manifest.json", manifest(command, config_doc, seed).dump(2) + "\n");
  }

  static void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot open '" + p.string() + "' for writing");
    out << content;
    if (!out) throw Error("write to '" + p.string() + "' failed");
  }

 private:
  std::map<std::string, std::string> files_;
};

// Checks that every file listed in dir/manifest.json exists with the recorded
// size and hash, that CSVs carry their fixed header and that JSON parses.
// Returns a list of problems (empty when the directory is consistent).
inline std::vector<std::string> check_output_dir(const std::filesystem::path& dir) {
  std::vector<std::string> problems;
  std::ifstream in(dir / "manifest.json", std::ios::binary);
  if (!in) return {"manifest.json missing"};
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    return {std::string("manifest.json does not parse: ") + e.what()};
  }
  for (const auto& f : m.at("files")) {
    const std::string name = f.at("name");
    std::ifstream fin(dir / name, std::ios::binary);
    if (!fin) {
      problems.push_back(name + ": missing");
      continue;
    }
    const std::string content((std::istreambuf_iterator<char>(fin)), std::istreambuf_iterator<char>());
    if (content.size() != f.at("bytes").get<std::size_t>()) problems.push_back(name + ": size differs from manifest");
    if (hex64(fnv1a64(content)) != f.at("fnv1a64").get<std::string>()) problems.push_back(name + ": hash differs from manifest");
    const auto h = csv_headers().find(name);
    if (h != csv_headers().end()) {
      if (content.compare(0, h->second.size() + 1, h->second + "\n") != 0) problems.push_back(name + ": wrong header");
      const auto cols = std::count(h->second.begin(), h->second.end(), ',');
      std::size_t start = 0;
      while (start < content.size()) {
        const auto end = content.find('\n', start);
        const std::string line = content.substr(start, end - start);
        if (std::count(line.begin(), line.end(), ',') != cols) {
          problems.push_back(name + ": row with wrong column count");
          break;
        }
        start = end == std::string::npos ? content.size() : end + 1;
      }
    } else if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
      try {
        if (!nlohmann::json::accept(content)) problems.push_back(name + ": invalid JSON");
      } catch (const std::exception&) {
        problems.push_back(name + ": invalid JSON");
      }
    }
  }
  return problems;
}

}  // namespace rwlab
