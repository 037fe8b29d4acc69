#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mot/errors.hpp"
#include "mot/matrix.hpp"
#include "mot/measure.hpp"
#include "mot/rational.hpp"
#include "mot/transport_plan.hpp"

namespace mot {

/// Which rule of the construction fired in one step.
enum class StepCase {
  kCoincideXExhausted,  // x lies on an atom of nu and its mass fits there
  kCoincideYExhausted,  // x lies on an atom of nu that is too small
  kBracketXExhausted,   // x strictly between two atoms, both can absorb it
  kBracketLowExhausted,   // lower neighbour runs out first
  kBracketHighExhausted,  // upper neighbour runs out first
};

inline const char* to_string(StepCase c) {
  switch (c) {
    case StepCase::kCoincideXExhausted: return "I.1";
    case StepCase::kCoincideYExhausted: return "I.2";
    case StepCase::kBracketXExhausted: return "II.1";
    case StepCase::kBracketLowExhausted: return "II.2";
    case StepCase::kBracketHighExhausted: return "II.3";
  }
  return "?";
}

/// Masses sent from x to its bracketing atoms y_lo < x < y_hi so that both
/// the mass and the barycenter are preserved:
///   lo + hi = mass,  lo * y_lo + hi * y_hi = mass * x.
struct SplitSolution {
  Rational lo;
  Rational hi;
};

inline SplitSolution solve_split(const Rational& mass, const Rational& x, const Rational& y_lo,
                                 const Rational& y_hi) {
  const Rational width = y_hi - y_lo;
  SplitSolution s;
  s.lo = mass * (y_hi - x) / width;
  s.hi = mass * (x - y_lo) / width;
  return s;
}

/// One transfer of the construction, in original atom indices.
struct PlanStep {
  StepCase kind = StepCase::kCoincideXExhausted;
  /// The step was the "both neighbours too small" situation, resolved to
  /// the low or high rule by comparing scaling ratios.
  bool both_short = false;
  std::size_t x = 0;
  std::size_t lo = 0;  // the coinciding atom for the coincide rules
  std::optional<std::size_t> hi;
  Rational mass_lo;
  Rational mass_hi;
  bool crossed_x = false;
  std::vector<std::size_t> crossed_y;
};

struct MonotoneOptions {
  /// Re-check convex order of the remaining masses after every step.
  bool check_invariants = false;
};

struct MonotoneResult {
  TransportPlan plan;
  std::vector<PlanStep> steps;
};

namespace detail {

inline void require_monotone_inputs(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.empty() || nu.empty()) throw EmptyMeasure();
  if (!mu.is_probability() || !nu.is_probability()) {
    throw InvalidArgument("monotone plans are built for probability measures");
  }
  const OrderReport order = check_convex_order(mu, nu);
  if (!order.ordered) {
    std::string why = !order.mass_equal   ? "masses differ"
                      : !order.mean_equal ? "means differ"
                                          : "call prices of mu exceed those of nu at strike " +
                                                to_string(*order.violating_strike);
    throw NotInConvexOrder("mu is not dominated by nu in convex order: " + why);
  }
}

inline void check_remaining_order(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const std::vector<Rational>& omega,
                                  const std::vector<Rational>& theta, std::size_t step) {
  std::vector<std::pair<Rational, Rational>> left, right;
  for (std::size_t j = 0; j < omega.size(); ++j)
    if (sgn(omega[j]) > 0) left.emplace_back(mu.atom(j), omega[j]);
  for (std::size_t i = 0; i < theta.size(); ++i)
    if (sgn(theta[i]) > 0) right.emplace_back(nu.atom(i), theta[i]);
  if (left.empty() && right.empty()) return;
  if (left.empty() || right.empty() ||
      !check_convex_order(make_measure(std::move(left)), make_measure(std::move(right))).ordered) {
    throw InternalInvariantViolation("remaining masses leave convex order after step " +
                                     std::to_string(step));
  }
}

}  // namespace detail

/// Builds the left-monotone martingale coupling of mu and nu together with
/// the sequence of steps that produced it.
///
/// The smallest atom x of mu that still carries mass is coupled with nu:
/// onto the atom y = x if there is one, otherwise onto its two nearest
/// remaining neighbours y_lo < x < y_hi in the barycentric proportion of
/// solve_split, scaled down when a neighbour cannot take its share. Every
/// step empties at least one atom, so there are at most N + M - 1 steps.
inline MonotoneResult build_left_monotone_traced(const DiscreteMeasure& mu,
                                                 const DiscreteMeasure& nu,
                                                 const MonotoneOptions& options = {}) {
  detail::require_monotone_inputs(mu, nu);
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();

  std::vector<Rational> omega(mu.weights().begin(), mu.weights().end());
  std::vector<Rational> theta(nu.weights().begin(), nu.weights().end());
  MonotoneResult result{TransportPlan{Matrix<Rational>(n, m), mu, nu}, {}};
  auto& q = result.plan.q;
  const auto ys = nu.atoms();

  std::size_t j = 0;
  while (true) {
    while (j < n && sgn(omega[j]) == 0) ++j;
    if (j == n) break;
    const Rational& x = mu.atom(j);

    PlanStep step;
    step.x = j;
    const std::size_t pos = static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), x) - ys.begin());

    if (pos < m && ys[pos] == x && sgn(theta[pos]) > 0) {
      const std::size_t l = pos;
      step.lo = l;
      if (omega[j] <= theta[l]) {
        step.kind = StepCase::kCoincideXExhausted;
        step.mass_lo = omega[j];
      } else {
        step.kind = StepCase::kCoincideYExhausted;
        step.mass_lo = theta[l];
      }
      q(j, l) += step.mass_lo;
      omega[j] -= step.mass_lo;
      theta[l] -= step.mass_lo;
    } else {
      std::optional<std::size_t> lo, hi;
      for (std::size_t i = pos; i-- > 0;) {
        if (sgn(theta[i]) > 0) {
          lo = i;
          break;
        }
      }
      for (std::size_t i = pos; i < m; ++i) {
        if (sgn(theta[i]) > 0 && ys[i] != x) {
          hi = i;
          break;
        }
      }
      if (!lo || !hi) {
        throw InternalInvariantViolation("atom " + to_string(x) +
                                         " has remaining nu mass on one side only");
      }
      step.lo = *lo;
      step.hi = *hi;
      const SplitSolution want = solve_split(omega[j], x, ys[*lo], ys[*hi]);
      const bool lo_fits = want.lo <= theta[*lo];
      const bool hi_fits = want.hi <= theta[*hi];
      if (lo_fits && hi_fits) {
        step.kind = StepCase::kBracketXExhausted;
        step.mass_lo = want.lo;
        step.mass_hi = want.hi;
      } else {
        bool use_low;
        if (!lo_fits && !hi_fits) {
          step.both_short = true;
          // min(theta_lo / want_lo, theta_hi / want_hi); ties go to the low rule
          use_low = theta[*lo] * want.hi <= theta[*hi] * want.lo;
        } else {
          use_low = !lo_fits;
        }
        if (use_low) {
          step.kind = StepCase::kBracketLowExhausted;
          const Rational ratio = theta[*lo] / want.lo;
          step.mass_lo = theta[*lo];
          step.mass_hi = ratio * want.hi;
        } else {
          step.kind = StepCase::kBracketHighExhausted;
          const Rational ratio = theta[*hi] / want.hi;
          step.mass_lo = ratio * want.lo;
          step.mass_hi = theta[*hi];
        }
      }
      q(j, *lo) += step.mass_lo;
      q(j, *hi) += step.mass_hi;
      omega[j] -= step.mass_lo + step.mass_hi;
      theta[*lo] -= step.mass_lo;
      theta[*hi] -= step.mass_hi;
    }

    step.crossed_x = sgn(omega[j]) == 0;
    if (sgn(theta[step.lo]) == 0) step.crossed_y.push_back(step.lo);
    if (step.hi && sgn(theta[*step.hi]) == 0) step.crossed_y.push_back(*step.hi);
    if (!step.crossed_x && step.crossed_y.empty()) {
      throw InternalInvariantViolation("step " + std::to_string(result.steps.size()) +
                                       " crossed no atom");
    }
    result.steps.push_back(std::move(step));

    if (options.check_invariants) {
      detail::check_remaining_order(mu, nu, omega, theta, result.steps.size());
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (sgn(theta[i]) != 0) {
      throw InternalInvariantViolation("mass of nu left at atom " + to_string(ys[i]));
    }
  }
  return result;
}

inline TransportPlan build_left_monotone(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                         const MonotoneOptions& options = {}) {
  return build_left_monotone_traced(mu, nu, options).plan;
}

/// Maps a plan on the reflected supports (x -> -x, y -> -y) back.
inline TransportPlan reflect(const TransportPlan& plan) {
  const std::size_t n = plan.q.rows();
  const std::size_t m = plan.q.cols();
  TransportPlan out{Matrix<Rational>(n, m), reflect(plan.mu), reflect(plan.nu)};
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) out.q(n - 1 - j, m - 1 - i) = plan.q(j, i);
  return out;
}

/// Right-monotone coupling: the left-monotone coupling of the reflected
/// marginals, reflected back.
inline TransportPlan build_right_monotone(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                          const MonotoneOptions& options = {}) {
  return reflect(build_left_monotone(reflect(mu), reflect(nu), options));
}

/// Atom indices of a forbidden configuration: x_j is coupled with y_lo and
/// y_hi, x_j2 with y_mid, and y_lo < y_mid < y_hi.
struct ForbiddenWitness {
  std::size_t j = 0;      // the atom sending mass to both ends
  std::size_t j2 = 0;     // the atom sending mass in between
  std::size_t lo = 0;
  std::size_t mid = 0;
  std::size_t hi = 0;
};

namespace detail {

inline std::optional<ForbiddenWitness> find_crossing(const TransportPlan& plan, bool left) {
  const std::size_t n = plan.q.rows();
  const std::size_t m = plan.q.cols();
  for (std::size_t j = 0; j < n; ++j) {
    std::optional<std::size_t> first, last;
    for (std::size_t i = 0; i < m; ++i) {
      if (sgn(plan.q(j, i)) > 0) {
        if (!first) first = i;
        last = i;
      }
    }
    if (!first || *first == *last) continue;
    // Left monotone: atoms above x_j must avoid (y_first, y_last);
    // right monotone: atoms below x_j must.
    const std::size_t begin = left ? j + 1 : 0;
    const std::size_t end = left ? n : j;
    for (std::size_t j2 = begin; j2 < end; ++j2) {
      for (std::size_t i = *first + 1; i < *last; ++i) {
        if (sgn(plan.q(j2, i)) > 0) return ForbiddenWitness{j, j2, *first, i, *last};
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Searches the support for x < x' with x coupled to y- < y+ and x' coupled
/// to some y' strictly between them.
inline std::optional<ForbiddenWitness> verify_left_monotone(const TransportPlan& plan) {
  return detail::find_crossing(plan, true);
}

/// Mirror image: x > x' with x coupled to y- < y+ and x' to y' in between.
inline std::optional<ForbiddenWitness> verify_right_monotone(const TransportPlan& plan) {
  return detail::find_crossing(plan, false);
}

}  // namespace mot
