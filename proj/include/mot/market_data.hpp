#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mot/errors.hpp"
#include "mot/measure.hpp"
#include "mot/rational.hpp"

namespace mot {

struct CallQuote {
  Rational strike;
  Rational price;

  friend bool operator==(const CallQuote&, const CallQuote&) = default;
};

/// Call prices at one maturity, strikes strictly increasing, plus the
/// forward (the common mean of every maturity's marginal).
struct CallQuoteSet {
  std::vector<CallQuote> quotes;
  Rational forward;

  friend bool operator==(const CallQuoteSet&, const CallQuoteSet&) = default;
};

/// Reads the marginal off a kink-complete call curve. The quotes are taken
/// as the exact piecewise-linear call function of a discrete measure, so
/// the mass at strike k is the jump of the slope there, i.e. the right
/// derivative convention P(X <= k) = 1 + C'(k+). The curve must be pinned
/// at both ends: C(k_0) = forward - k_0 (all mass at or above k_0) and a
/// zero price at the last strike.
inline DiscreteMeasure extract_marginal(const CallQuoteSet& set) {
  const auto& q = set.quotes;
  if (q.empty()) throw IncompleteCurve("no quotes");
  for (std::size_t r = 0; r < q.size(); ++r) {
    if (sgn(q[r].price) < 0) {
      throw ArbitrageViolation("negative call price at strike " + to_string(q[r].strike));
    }
    if (r > 0 && !(q[r - 1].strike < q[r].strike)) {
      throw ArbitrageViolation("strikes must be strictly increasing (at " +
                               to_string(q[r].strike) + ")");
    }
    if (r > 0 && q[r].price > q[r - 1].price) {
      throw ArbitrageViolation("call price increases with strike at " + to_string(q[r].strike));
    }
  }

  // Slopes between consecutive quotes, with the implied -1 on the far left
  // and 0 on the far right.
  std::vector<Rational> slope;
  slope.reserve(q.size() + 1);
  slope.emplace_back(-1);
  for (std::size_t r = 0; r + 1 < q.size(); ++r) {
    Rational s = (q[r + 1].price - q[r].price) / (q[r + 1].strike - q[r].strike);
    if (s < -1 || sgn(s) > 0) {
      throw ArbitrageViolation("slope " + to_string(s) + " after strike " + to_string(q[r].strike) +
                               " lies outside [-1, 0]");
    }
    if (s < slope.back()) {
      throw ArbitrageViolation("call curve is concave at strike " + to_string(q[r].strike));
    }
    slope.push_back(std::move(s));
  }
  slope.emplace_back(0);

  if (q.front().price != set.forward - q.front().strike) {
    throw IncompleteCurve("price at the lowest strike " + to_string(q.front().strike) +
                          " must equal forward - strike = " +
                          to_string(Rational(set.forward - q.front().strike)));
  }
  if (sgn(q.back().price) != 0) {
    throw IncompleteCurve("price at the highest strike " + to_string(q.back().strike) +
                          " must be zero");
  }

  std::vector<std::pair<Rational, Rational>> atoms;
  for (std::size_t r = 0; r < q.size(); ++r) {
    Rational jump = slope[r + 1] - slope[r];
    if (sgn(jump) < 0) {
      throw ArbitrageViolation("call curve is concave at strike " + to_string(q[r].strike));
    }
    atoms.emplace_back(q[r].strike, std::move(jump));
  }
  return make_measure(std::move(atoms));
}

/// Call prices of `m` at every atom and one unit below the lowest atom.
inline CallQuoteSet quotes_from_measure(const DiscreteMeasure& m) {
  if (!m.is_probability()) throw InvalidArgument("quotes are generated for probability measures");
  CallQuoteSet set;
  set.forward = mean(m);
  const Rational below = m.atom(0) - 1;
  set.quotes.push_back({below, call_price(m, below)});
  for (const auto& x : m.atoms()) set.quotes.push_back({x, call_price(m, x)});
  return set;
}

}  // namespace mot
