#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mot/errors.hpp"
#include "mot/rational.hpp"

namespace mot {

/// Finite measure on the real line: strictly increasing atoms, each with a
/// strictly positive weight. Total mass need not be one.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  std::span<const Rational> atoms() const noexcept { return atoms_; }
  std::span<const Rational> weights() const noexcept { return weights_; }
  const Rational& atom(std::size_t k) const { return atoms_.at(k); }
  const Rational& weight(std::size_t k) const { return weights_.at(k); }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  Rational total_mass() const {
    Rational sum = 0;
    for (const auto& w : weights_) sum += w;
    return sum;
  }

  bool is_probability() const { return total_mass() == 1; }

  /// Index of `x` among the atoms, if it is one.
  std::optional<std::size_t> index_of(const Rational& x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x);
    if (it == atoms_.end() || *it != x) return std::nullopt;
    return static_cast<std::size_t>(it - atoms_.begin());
  }

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

  friend DiscreteMeasure make_measure(std::vector<std::pair<Rational, Rational>> pairs);

 private:
  std::vector<Rational> atoms_;
  std::vector<Rational> weights_;
};

/// Builds the canonical measure: sorted, duplicates merged, zero weights
/// dropped. Throws InvalidArgument on a negative weight and EmptyMeasure when
/// nothing is left.
inline DiscreteMeasure make_measure(std::vector<std::pair<Rational, Rational>> pairs) {
  for (auto& [x, w] : pairs) {
    // Values built from raw numerator/denominator pairs may be unreduced.
    x.canonicalize();
    w.canonicalize();
    if (sgn(w) < 0) {
      throw InvalidArgument("negative weight " + to_string(w) + " at atom " + to_string(x));
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  DiscreteMeasure m;
  for (auto& [x, w] : pairs) {
    if (!m.atoms_.empty() && m.atoms_.back() == x) {
      m.weights_.back() += w;
    } else {
      m.atoms_.push_back(std::move(x));
      m.weights_.push_back(std::move(w));
    }
  }
  std::size_t kept = 0;
  for (std::size_t k = 0; k < m.atoms_.size(); ++k) {
    if (sgn(m.weights_[k]) == 0) continue;
    if (kept != k) {
      m.atoms_[kept] = std::move(m.atoms_[k]);
      m.weights_[kept] = std::move(m.weights_[k]);
    }
    ++kept;
  }
  m.atoms_.resize(kept);
  m.weights_.resize(kept);
  if (kept == 0) throw EmptyMeasure();
  return m;
}

/// Convenience overload for parallel atom/weight lists.
inline DiscreteMeasure make_measure(std::span<const Rational> atoms,
                                    std::span<const Rational> weights) {
  if (atoms.size() != weights.size()) {
    throw DimensionMismatch("atom and weight lists differ in length");
  }
  std::vector<std::pair<Rational, Rational>> pairs;
  pairs.reserve(atoms.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) pairs.emplace_back(atoms[k], weights[k]);
  return make_measure(std::move(pairs));
}

/// Normalized first moment.
inline Rational mean(const DiscreteMeasure& m) {
  Rational first = 0;
  for (std::size_t k = 0; k < m.size(); ++k) first += m.atom(k) * m.weight(k);
  return first / m.total_mass();
}

/// C(k) = sum of max(x - k, 0) * w over the atoms.
inline Rational call_price(const DiscreteMeasure& m, const Rational& strike) {
  Rational price = 0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m.atom(k) > strike) price += (m.atom(k) - strike) * m.weight(k);
  }
  return price;
}

/// Image of the measure under x -> -x.
inline DiscreteMeasure reflect(const DiscreteMeasure& m) {
  std::vector<std::pair<Rational, Rational>> pairs;
  pairs.reserve(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) pairs.emplace_back(-m.atom(k), m.weight(k));
  return make_measure(std::move(pairs));
}

struct OrderReport {
  bool mass_equal = false;
  bool mean_equal = false;
  bool call_dominated = false;
  bool ordered = false;
  /// First strike (in increasing order) where C_mu(k) > C_nu(k).
  std::optional<Rational> violating_strike;
};

/// Convex-order test via call-curve dominance on the union of supports.
/// Both curves are piecewise linear with kinks only at atoms, so checking
/// the kinks decides dominance everywhere once mass and mean agree.
inline OrderReport check_convex_order(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  OrderReport report;
  report.mass_equal = mu.total_mass() == nu.total_mass();
  report.mean_equal = mean(mu) == mean(nu);

  std::vector<Rational> strikes(mu.atoms().begin(), mu.atoms().end());
  strikes.insert(strikes.end(), nu.atoms().begin(), nu.atoms().end());
  std::sort(strikes.begin(), strikes.end());
  strikes.erase(std::unique(strikes.begin(), strikes.end()), strikes.end());

  report.call_dominated = true;
  for (const auto& k : strikes) {
    if (call_price(mu, k) > call_price(nu, k)) {
      report.call_dominated = false;
      report.violating_strike = k;
      break;
    }
  }
  report.ordered = report.mass_equal && report.mean_equal && report.call_dominated;
  return report;
}

}  // namespace mot
