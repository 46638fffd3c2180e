#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rwlab/freegroup/automorphism.hpp"
#include "rwlab/freegroup/word.hpp"

namespace rwlab {

inline Word inverse_of(const Word& w) { return w.inverse(); }
inline Automorphism inverse_of(const Automorphism& phi) { return invert(phi); }

// A finitely supported probability measure on a group (F_N words or Aut(F_N)
// elements). Nonelementarity of the support is the caller's responsibility.
template <class Element>
class Measure {
 public:
  struct Atom {
    Element element;
    double weight;
  };

  explicit Measure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw InvalidInput("measure needs at least one atom");
    double sum = 0;
    for (const auto& a : atoms_) {
      if (!(a.weight > 0) || !std::isfinite(a.weight)) throw InvalidInput("measure weights must be positive");
      sum += a.weight;
      cumulative_.push_back(sum);
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidInput("measure weights must sum to 1 (got " + std::to_string(sum) + ")");
    cumulative_.back() = 1.0;
  }

  // Rescales arbitrary positive weights to total mass one.
  static Measure normalized(std::vector<Atom> atoms) {
    double sum = 0;
    for (const auto& a : atoms) sum += a.weight;
    for (auto& a : atoms) a.weight /= sum;
    double check = 0;
    for (const auto& a : atoms) check += a.weight;
    // absorb the last-ulp remainder so the sum check is exact up to rounding
    if (!atoms.empty()) atoms.back().weight += 1.0 - check;
    return Measure(std::move(atoms));
  }

  static Measure uniform(std::vector<Element> elements) {
    std::vector<Atom> atoms;
    for (auto& e : elements) atoms.push_back({std::move(e), 1.0});
    return normalized(std::move(atoms));
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  // Atom index selected by a uniform variate u in [0, 1).
  std::size_t sample_index(double u) const {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

// mu-check(g) = mu(g^-1)
template <class Element>
Measure<Element> reflected(const Measure<Element>& mu) {
  std::vector<typename Measure<Element>::Atom> atoms;
  atoms.reserve(mu.size());
  for (const auto& a : mu.atoms()) atoms.push_back({inverse_of(a.element), a.weight});
  return Measure<Element>(std::move(atoms));
}

using TreeMeasure = Measure<Word>;
using OuterMeasure = Measure<Automorphism>;

}  // namespace rwlab
