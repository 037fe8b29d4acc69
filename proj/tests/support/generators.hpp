#pragma once

// Random instance generators for the property suites. Everything is seeded
// explicitly so failures replay.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "mot/mot.hpp"

namespace mot::testing {

using Rng = std::mt19937_64;

inline long uniform(Rng& rng, long lo, long hi) {
  return std::uniform_int_distribution<long>(lo, hi)(rng);
}

/// k / d in lowest terms.
inline Rational frac(long k, long d) {
  Rational r(k, d);
  r.canonicalize();
  return r;
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

struct Instance {
  DiscreteMeasure mu;
  DiscreteMeasure nu;
};

/// Probability measure with `n` distinct atoms on the grid (1/2)Z within
/// [-lim, lim] and random integer weights, normalized.
inline DiscreteMeasure random_measure(Rng& rng, std::size_t n, long lim = 12) {
  std::map<Rational, Rational> atoms;
  while (atoms.size() < n) atoms.emplace(frac(uniform(rng, -2 * lim, 2 * lim), 2), 0);
  Rational total = 0;
  for (auto& [x, w] : atoms) {
    w = uniform(rng, 1, 9);
    total += w;
  }
  std::vector<std::pair<Rational, Rational>> pairs;
  for (auto& [x, w] : atoms) pairs.emplace_back(x, w / total);
  return make_measure(std::move(pairs));
}

/// Replaces mass w at x by a mean-preserving spread onto x - a and x + b.
inline void spread(std::map<Rational, Rational>& out, const Rational& x, const Rational& w,
                   const Rational& a, const Rational& b) {
  out[x - a] += w * b / (a + b);
  out[x + b] += w * a / (a + b);
}

/// Convex-ordered pair built by mean-preserving splits: nu is obtained
/// from mu by spreading some atoms symmetrically, some asymmetrically, some
/// only partially, and some onto a neighbour of another atom. Sizes stay
/// within 1..max_n and 1..max_m.
inline Instance split_instance(Rng& rng, std::size_t max_n, std::size_t max_m) {
  for (;;) {
    const std::size_t n = static_cast<std::size_t>(uniform(rng, 1, static_cast<long>(max_n)));
    DiscreteMeasure mu = random_measure(rng, n);
    std::map<Rational, Rational> nu;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      const Rational& x = mu.atom(j);
      const Rational& w = mu.weight(j);
      const Rational a = frac(uniform(rng, 1, 8), 2);
      const Rational b = frac(uniform(rng, 1, 8), 2);
      switch (uniform(rng, 0, 4)) {
        case 0:  // keep
          nu[x] += w;
          break;
        case 1:  // symmetric
          spread(nu, x, w, a, a);
          break;
        case 2:  // asymmetric
          spread(nu, x, w, a, b);
          break;
        case 3: {  // partial: part stays, part spreads
          const Rational keep = frac(uniform(rng, 1, 3), 4);
          nu[x] += w * keep;
          spread(nu, x, w * (1 - keep), a, b);
          break;
        }
        default: {  // onto an existing atom of mu on the left, if any
          if (j > 0) {
            const Rational left = x - mu.atom(j - 1);
            spread(nu, x, w, left, b);
          } else {
            spread(nu, x, w, a, b);
          }
        }
      }
    }
    // A second round occasionally spreads one atom of nu further.
    if (coin(rng, 0.3) && !nu.empty()) {
      auto it = std::next(nu.begin(), uniform(rng, 0, static_cast<long>(nu.size()) - 1));
      const Rational x = it->first;
      const Rational w = it->second;
      nu.erase(it);
      spread(nu, x, w, frac(uniform(rng, 1, 4), 2), frac(uniform(rng, 1, 4), 2));
    }
    if (nu.size() > max_m) continue;
    std::vector<std::pair<Rational, Rational>> pairs(nu.begin(), nu.end());
    return {std::move(mu), make_measure(std::move(pairs))};
  }
}

/// Convex-ordered pair read off a random sparse coupling: every y atom is
/// assigned at least one x row, rows get random extra entries, and x_j is
/// the barycenter of its row, so the coupling is a martingale by
/// construction. Used where sizes are too large for split chains.
inline Instance coupling_instance(Rng& rng, std::size_t n, std::size_t m, std::size_t extra) {
  for (;;) {
    std::map<Rational, int> ys;
    while (ys.size() < m) ys.emplace(frac(uniform(rng, -40L * long(m), 40L * long(m)), 4), 0);
    std::vector<Rational> y;
    for (const auto& [v, _] : ys) y.push_back(v);
    std::vector<std::map<std::size_t, Rational>> rows(n);
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 0; k < m; ++k) {
      // Every row and every column gets at least one entry.
      const std::size_t j = k < n ? k : static_cast<std::size_t>(uniform(rng, 0, long(n) - 1));
      rows[j][order[k]] += uniform(rng, 1, 20);
    }
    for (std::size_t k = m; k < n; ++k) rows[k][order[uniform(rng, 0, long(m) - 1)]] += uniform(rng, 1, 20);
    for (std::size_t e = 0; e < extra; ++e) {
      rows[uniform(rng, 0, long(n) - 1)][uniform(rng, 0, long(m) - 1)] += uniform(rng, 1, 20);
    }
    Rational total = 0;
    for (const auto& row : rows)
      for (const auto& [i, q] : row) total += q;
    std::vector<std::pair<Rational, Rational>> mu_pairs;
    std::map<std::size_t, Rational> col;
    std::map<Rational, int> seen;
    bool distinct = true;
    for (const auto& row : rows) {
      Rational w = 0, moment = 0;
      for (const auto& [i, q] : row) {
        w += q;
        moment += q * y[i];
        col[i] += q;
      }
      const Rational x = moment / w;
      distinct = distinct && seen.emplace(x, 0).second;
      mu_pairs.emplace_back(x, w / total);
    }
    if (!distinct) continue;
    std::vector<std::pair<Rational, Rational>> nu_pairs;
    for (const auto& [i, q] : col) nu_pairs.emplace_back(y[i], q / total);
    return {make_measure(std::move(mu_pairs)), make_measure(std::move(nu_pairs))};
  }
}

inline PayoffGrid builtin(const Instance& inst, const char* name) {
  return grid_from_builtin(name, {}, inst.mu.atoms(), inst.nu.atoms());
}

/// Constraint check written independently of check_plan: marginals,
/// martingale property and nonnegativity, summed directly.
inline bool is_martingale_plan(const Matrix<Rational>& q, const DiscreteMeasure& mu,
                               const DiscreteMeasure& nu) {
  if (q.rows() != mu.size() || q.cols() != nu.size()) return false;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    Rational mass = 0, moment = 0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
      if (sgn(q(j, i)) < 0) return false;
      mass += q(j, i);
      moment += q(j, i) * nu.atom(i);
    }
    if (mass != mu.weight(j) || moment != mass * mu.atom(j)) return false;
  }
  for (std::size_t i = 0; i < nu.size(); ++i) {
    Rational mass = 0;
    for (std::size_t j = 0; j < mu.size(); ++j) mass += q(j, i);
    if (mass != nu.weight(i)) return false;
  }
  return true;
}

/// Brute-force search for x < x', y- < y' < y+ with q(x, y-), q(x, y+),
/// q(x', y') all positive.
inline bool has_left_crossing(const Matrix<Rational>& q) {
  for (std::size_t j = 0; j < q.rows(); ++j)
    for (std::size_t j2 = j + 1; j2 < q.rows(); ++j2)
      for (std::size_t lo = 0; lo < q.cols(); ++lo)
        for (std::size_t mid = lo + 1; mid < q.cols(); ++mid)
          for (std::size_t hi = mid + 1; hi < q.cols(); ++hi)
            if (sgn(q(j, lo)) > 0 && sgn(q(j, hi)) > 0 && sgn(q(j2, mid)) > 0) return true;
  return false;
}

}  // namespace mot::testing
