#pragma once

// Exact invariant suites behind `rwlab verify`. Every check compares integers
// or exact ratios; none uses a floating-point tolerance.

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rwlab/freegroup/automorphism.hpp"
#include "rwlab/outer/outer_space.hpp"
#include "rwlab/tree/tree_lab.hpp"
#include "rwlab/verify/random.hpp"

namespace rwlab {

struct CheckResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;
  bool passed() const { return failures == 0; }
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed()) return false;
    return true;
  }
  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
      arr.push_back({{"name", c.name}, {"passed", c.passed()}, {"cases", c.cases}, {"failures", c.failures},
                     {"first_failure", c.first_failure}});
    return {{"suite", suite}, {"passed", passed()}, {"checks", arr}};
  }
};

struct SuiteOptions {
  std::uint64_t seed = 20240917;
  std::size_t algebra_cases = 10'000;
  std::size_t cocycle_cases = 10'000;     // per rank, F_2 and F_3
  std::size_t tree_cases = 10'000;        // Busemann cocycle
  std::size_t lemma_cases = 100'000;      // lemma residuals and four-point condition
  std::size_t white_pairs_f2 = 200;
  int white_len_f2 = 12;
  std::size_t white_pairs_f3 = 50;
  int white_len_f3 = 8;
  bool corrupt_candidates = false;  // fault injection: drop the figure-eight candidates
};

namespace detail {

class Checker {
 public:
  explicit Checker(std::string name) { r_.name = std::move(name); }
  void expect(bool ok, const std::function<std::string()>& describe) {
    ++r_.cases;
    if (!ok) {
      if (r_.failures == 0) r_.first_failure = describe();
      ++r_.failures;
    }
  }
  CheckResult done() { return std::move(r_); }

 private:
  CheckResult r_;
};

// Repeated-scan reducer used as an oracle for the stack reducer.
inline std::vector<Letter> naive_reduce(std::vector<Letter> w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i + 1] == w[i].inverse()) {
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        changed = true;
        break;
      }
  }
  return w;
}

inline std::string show(const std::vector<Letter>& w) { return Word::from_reduced(w).str(); }

}  // namespace detail

inline SuiteReport algebra_suite(const SuiteOptions& opt) {
  SuiteReport rep{"algebra", {}};
  InstanceGen gen(opt.seed);
  {
    detail::Checker c("reduce-oracle");
    for (std::size_t k = 0; k < opt.algebra_cases; ++k) {
      const int rank = static_cast<int>(gen.uniform(2, 4));
      const auto raw = gen.raw(rank, 40);
      const Word w = reduce(raw, rank);
      const auto oracle = detail::naive_reduce(raw);
      c.expect(std::vector<Letter>(w.begin(), w.end()) == oracle && reduce(w.letters(), rank) == w,
               [&] { return "reduce(" + detail::show(raw) + ") = " + w.str() + ", oracle " + detail::show(oracle); });
    }
    rep.checks.push_back(c.done());
  }
  {
    detail::Checker c("conjugacy-class");
    for (std::size_t k = 0; k < opt.algebra_cases; ++k) {
      const int rank = static_cast<int>(gen.uniform(2, 4));
      const Word w = gen.word_up_to(rank, 20);
      const Word conj = gen.word_up_to(rank, 8);
      const auto a = cyclic_reduce(w);
      const auto b = cyclic_reduce(conj * w * conj.inverse());
      const bool rebuilt = a.conjugator * a.cls.word() * a.conjugator.inverse() == w;
      c.expect(a.cls == b.cls && rebuilt && cyclic_cancellation(a.cls.word().letters()) == 0,
               [&] { return "w = " + w.str() + ", c = " + conj.str(); });
    }
    rep.checks.push_back(c.done());
  }
  {
    detail::Checker c("automorphism-round-trip");
    detail::Checker sub("length-subadditivity");
    detail::Checker sym("inversion-symmetry");
    for (std::size_t k = 0; k < opt.algebra_cases; ++k) {
      const int rank = static_cast<int>(gen.uniform(2, 4));
      const Automorphism phi = gen.automorphism(rank, gen.uniform(0, 8));
      const Word w = gen.word_up_to(rank, 20);
      const Word img = apply(phi, w);
      c.expect(apply(invert(phi), img) == w && apply(phi, apply(invert(phi), w)) == w,
               [&] { return "phi = " + phi.trace_str() + ", w = " + w.str(); });
      std::size_t bound = 0;
      for (Letter l : w) bound += phi.image(l.generator()).size();
      sub.expect(img.size() <= bound, [&] { return "phi = " + phi.trace_str() + ", w = " + w.str(); });
      sym.expect(cyclic_length(w) == cyclic_length(w.inverse()), [&] { return "w = " + w.str(); });
    }
    rep.checks.push_back(c.done());
    rep.checks.push_back(sub.done());
    rep.checks.push_back(sym.done());
  }
  {
    detail::Checker assoc("composition-associativity");
    detail::Checker inv("invert-involution");
    for (std::size_t k = 0; k < opt.algebra_cases / 10; ++k) {
      const int rank = static_cast<int>(gen.uniform(2, 4));
      const Automorphism a = gen.automorphism(rank, gen.uniform(0, 5));
      const Automorphism b = gen.automorphism(rank, gen.uniform(0, 5));
      const Automorphism d = gen.automorphism(rank, gen.uniform(0, 5));
      assoc.expect(compose(compose(a, b), d).same_images(compose(a, compose(b, d))),
                   [&] { return a.trace_str() + " | " + b.trace_str() + " | " + d.trace_str(); });
      const Automorphism ab = compose(a, b);
      inv.expect(invert(invert(ab)) == ab, [&] { return ab.trace_str(); });
    }
    rep.checks.push_back(assoc.done());
    rep.checks.push_back(inv.done());
  }
  {
    detail::Checker c("elementary-inverse");
    for (int rank = 2; rank <= 4; ++rank)
      for (const auto& e : all_elementaries(rank)) {
        const Automorphism a = Automorphism::elementary(rank, e);
        c.expect(compose(a, invert(a)).is_identity() && compose(invert(a), a).is_identity(), [&] { return e.str(); });
      }
    rep.checks.push_back(c.done());
  }
  return rep;
}

inline SuiteReport outer_space_suite(const SuiteOptions& opt) {
  SuiteReport rep{"outer-space", {}};
  InstanceGen gen(opt.seed + 1);
  {
    detail::Checker c("length-cocycle");
    detail::Checker bounds("sigma-kappa-bounds");
    detail::Checker sub("kappa-subadditivity");
    for (int rank : {2, 3})
      for (std::size_t k = 0; k < opt.cocycle_cases; ++k) {
        const Automorphism phi = gen.automorphism(rank, gen.uniform(0, 6));
        const Automorphism psi = gen.automorphism(rank, gen.uniform(0, 6));
        const CyclicWord g = cyclic_reduce(gen.cyclic_word(rank, 10)).cls;
        const Ratio lhs = length_ratio(compose(phi, psi), g);
        const Ratio r1 = length_ratio(phi, apply(psi, g));
        const Ratio r2 = length_ratio(psi, g);
        // lhs = r1 * r2, compared as integers
        c.expect(lhs.num() * r1.den() * r2.den() == r1.num() * r2.num() * lhs.den(),
                 [&] { return "phi = " + phi.trace_str() + ", psi = " + psi.trace_str() + ", g = " + g.str(); });
        const Ratio kp = kappa_exact(phi);
        const Ratio kinv = kappa_exact(invert(phi));
        const Ratio s = length_ratio(phi, g);
        // -kappa(phi^-1) <= sigma <= kappa(phi)  <=>  1/K(phi^-1) <= s <= K(phi)
        bounds.expect(s <= kp && s.num() * kinv.num() >= s.den() * kinv.den(),
                      [&] { return "phi = " + phi.trace_str() + ", g = " + g.str(); });
        const Ratio kpp = kappa_exact(compose(phi, psi));
        const Ratio kps = kappa_exact(psi);
        sub.expect(kpp.num() * kp.den() * kps.den() <= kp.num() * kps.num() * kpp.den(),
                   [&] { return "phi = " + phi.trace_str() + ", psi = " + psi.trace_str(); });
      }
    rep.checks.push_back(c.done());
    rep.checks.push_back(bounds.done());
    rep.checks.push_back(sub.done());
  }
  {
    detail::Checker c("white-equality");
    auto run = [&](int rank, std::size_t pairs, int len) {
      for (std::size_t k = 0; k < pairs; ++k) {
        const RosePoint t = gen.rose(rank, gen.uniform(0, 4));
        const RosePoint u = gen.rose(rank, gen.uniform(0, 4));
        CandidateSet cand = CandidateSet::for_point(t);
        if (opt.corrupt_candidates) cand.words.resize(static_cast<std::size_t>(rank));
        const Ratio by_candidates = lipschitz_distance_exact(t, u, cand).ratio;
        const Ratio by_oracle = brute_force_distance_oracle(t, u, len).ratio;
        c.expect(by_candidates == by_oracle, [&] {
          return "rank " + std::to_string(rank) + ": candidates give " + by_candidates.str() + ", oracle " +
                 by_oracle.str() + " (T marking " + t.marking().trace_str() + ", U marking " + u.marking().trace_str() + ")";
        });
      }
    };
    run(2, opt.white_pairs_f2, opt.white_len_f2);
    run(3, opt.white_pairs_f3, opt.white_len_f3);
    rep.checks.push_back(c.done());
  }
  {
    detail::Checker iso("action-isometry");
    detail::Checker tri("triangle-inequality");
    detail::Checker self("self-distance-zero");
    detail::Checker inv("translation-length-invariance");
    for (std::size_t k = 0; k < opt.cocycle_cases; ++k) {
      const int rank = static_cast<int>(gen.uniform(2, 3));
      const RosePoint t = gen.rose(rank, gen.uniform(0, 4));
      const RosePoint u = gen.rose(rank, gen.uniform(0, 4));
      const RosePoint v = gen.rose(rank, gen.uniform(0, 4));
      const Automorphism phi = gen.automorphism(rank, gen.uniform(1, 5));
      const Ratio d = lipschitz_distance_exact(t, u).ratio;
      iso.expect(lipschitz_distance_exact(act(phi, t), act(phi, u)).ratio == d,
                 [&] { return "phi = " + phi.trace_str(); });
      const Ratio tu = d, uv = lipschitz_distance_exact(u, v).ratio, tv = lipschitz_distance_exact(t, v).ratio;
      tri.expect(tv.num() * tu.den() * uv.den() <= tu.num() * uv.num() * tv.den(), [&] { return std::string("triple"); });
      self.expect(lipschitz_distance_exact(t, t).ratio == Ratio(1, 1), [&] { return t.marking().trace_str(); });
      const Word g = gen.cyclic_word(rank, 8);
      const Word c = gen.word_up_to(rank, 5);
      const auto a = weighted_translation_length(g, t);
      inv.expect(a > 0 && weighted_translation_length(c * g * c.inverse(), t) == a &&
                     weighted_translation_length(g.inverse(), t) == a,
                 [&] { return "g = " + g.str() + ", c = " + c.str(); });
    }
    rep.checks.push_back(iso.done());
    rep.checks.push_back(tri.done());
    rep.checks.push_back(self.done());
    rep.checks.push_back(inv.done());
  }
  return rep;
}

inline SuiteReport tree_suite(const SuiteOptions& opt) {
  SuiteReport rep{"tree", {}};
  InstanceGen gen(opt.seed + 2);
  {
    detail::Checker c("busemann-cocycle");
    detail::Checker bound("busemann-bound");
    for (std::size_t k = 0; k < opt.tree_cases; ++k) {
      const int rank = static_cast<int>(gen.uniform(2, 4));
      const Word g = gen.word_up_to(rank, 12), h = gen.word_up_to(rank, 12);
      const BoundaryPoint xi = gen.periodic_boundary(rank, 6, 4);
      c.expect(busemann(g * h, xi) == busemann(g, boundary_action(h, xi)) + busemann(h, xi),
               [&] { return "g = " + g.str() + ", h = " + h.str() + ", xi = " + xi.str(); });
      const auto b = busemann(g, xi);
      bound.expect(b <= static_cast<std::int64_t>(g.size()) && -b <= static_cast<std::int64_t>(g.size()),
                   [&] { return "g = " + g.str() + ", xi = " + xi.str(); });
    }
    rep.checks.push_back(c.done());
    rep.checks.push_back(bound.done());
  }
  {
    detail::Checker res("lemma-residuals");
    detail::Checker four("four-point-delta-zero");
    detail::Checker cor("corollary-bound");
    for (std::size_t k = 0; k < opt.lemma_cases; ++k) {
      const int rank = static_cast<int>(gen.uniform(2, 4));
      const Word g = gen.word_up_to(rank, 12);
      const BoundaryPoint xi = gen.periodic_boundary(rank, 6, 4);
      const LemmaResiduals r = lemma_identities_check(g, xi);
      res.expect(r.exact_zero(), [&] {
        return "g = " + g.str() + ", xi = " + xi.str() + ": residuals " + std::to_string(r.first()) + ", " +
               std::to_string(r.second());
      });
      auto point = [&]() -> TreeOrBoundary {
        if (gen.uniform(0, 1)) return TreePoint{gen.word_up_to(rank, 10)};
        return gen.periodic_boundary(rank, 4, 3);
      };
      const TreeOrBoundary x = point(), y = point(), z = point();
      const auto xy = gromov_product(x, y), xz = gromov_product(x, z), yz = gromov_product(y, z);
      auto le = [](const GromovProduct& a, const GromovProduct& b) {
        return b.is_infinite() || (!a.is_infinite() && a.value() <= b.value());
      };
      const GromovProduct m = le(xz, yz) ? xz : yz;
      four.expect(le(m, xy), [&] { return std::string("triple violates (x|y) >= min((x|z), (y|z))"); });
      const BoundaryPoint eta = gen.periodic_boundary(rank, 6, 4);
      if (eta != xi)
        cor.expect(corollary_margin(g, xi, eta) >= 0, [&] { return "g = " + g.str() + ", x = " + xi.str() + ", y = " + eta.str(); });
    }
    rep.checks.push_back(res.done());
    rep.checks.push_back(four.done());
    rep.checks.push_back(cor.done());
  }
  {
    detail::Checker c("gromov-product-routes");
    detail::Checker wit("corollary-witness");
    for (std::size_t k = 0; k < opt.tree_cases / 10; ++k) {
      const int rank = static_cast<int>(gen.uniform(2, 3));
      const Word x = gen.word_up_to(rank, 10), y = gen.word_up_to(rank, 10);
      const auto cp = gromov_product(TreePoint{x}, TreePoint{y}).value();
      const auto d = tree_distance({x}, {y});
      const auto geo = geodesic_vertices(x, y);
      const auto via_h = twice_gromov_product_via_horofunctions(TreePoint{x}, TreePoint{y}, geo);
      c.expect(2 * cp == x.size() + y.size() - d && via_h == static_cast<std::int64_t>(2 * cp),
               [&] { return "x = " + x.str() + ", y = " + y.str(); });
      const BoundaryPoint bx = gen.periodic_boundary(rank, 3, 3), by = gen.periodic_boundary(rank, 3, 3);
      if (bx == by) continue;
      const auto w = corollary_witness(bx, by, rank, 6);
      wit.expect(w.has_value(), [&] { return "no equality witness for x = " + bx.str() + ", y = " + by.str(); });
    }
    rep.checks.push_back(c.done());
    rep.checks.push_back(wit.done());
  }
  return rep;
}

inline std::vector<std::string> suite_names() { return {"algebra", "outer-space", "tree", "all"}; }

inline std::vector<SuiteReport> run_suite(const std::string& name, const SuiteOptions& opt) {
  if (name == "algebra") return {algebra_suite(opt)};
  if (name == "outer-space") return {outer_space_suite(opt)};
  if (name == "tree") return {tree_suite(opt)};
  if (name == "all") return {algebra_suite(opt), outer_space_suite(opt), tree_suite(opt)};
  throw InvalidInput("unknown suite '" + name + "'");
}

}  // namespace rwlab
