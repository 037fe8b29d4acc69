#pragma once

#include <optional>
#include <string>

#include "mot/errors.hpp"
#include "mot/matrix.hpp"
#include "mot/measure.hpp"
#include "mot/payoff.hpp"
#include "mot/rational.hpp"

namespace mot {

/// Coupling of mu (rows) and nu (columns): q(j, i) is the mass moved from
/// x_j to y_i.
struct TransportPlan {
  Matrix<Rational> q;
  DiscreteMeasure mu;
  DiscreteMeasure nu;

  friend bool operator==(const TransportPlan&, const TransportPlan&) = default;
};

/// Result of checking the three constraint families of a martingale plan.
struct PlanCheck {
  bool shape_ok = true;
  bool nonnegative = true;
  bool rows_match_mu = true;
  bool cols_match_nu = true;
  bool martingale = true;
  /// Human-readable description of the first failure.
  std::optional<std::string> first_failure;

  bool ok() const { return shape_ok && nonnegative && rows_match_mu && cols_match_nu && martingale; }
};

inline PlanCheck check_plan(const TransportPlan& plan) {
  PlanCheck check;
  const std::size_t n = plan.mu.size();
  const std::size_t m = plan.nu.size();
  auto note = [&](std::string what) {
    if (!check.first_failure) check.first_failure = std::move(what);
  };
  if (plan.q.rows() != n || plan.q.cols() != m) {
    check.shape_ok = false;
    note("plan matrix does not match the supports");
    return check;
  }
  for (std::size_t j = 0; j < n; ++j) {
    Rational row_sum = 0;
    Rational drift = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const Rational& mass = plan.q(j, i);
      if (sgn(mass) < 0) {
        check.nonnegative = false;
        note("negative mass at (" + std::to_string(j) + ", " + std::to_string(i) + ")");
      }
      row_sum += mass;
      drift += mass * (plan.nu.atom(i) - plan.mu.atom(j));
    }
    if (row_sum != plan.mu.weight(j)) {
      check.rows_match_mu = false;
      note("row " + std::to_string(j) + " sums to " + to_string(row_sum));
    }
    if (sgn(drift) != 0) {
      check.martingale = false;
      note("row " + std::to_string(j) + " violates the martingale condition");
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    Rational col_sum = 0;
    for (std::size_t j = 0; j < n; ++j) col_sum += plan.q(j, i);
    if (col_sum != plan.nu.weight(i)) {
      check.cols_match_nu = false;
      note("column " + std::to_string(i) + " sums to " + to_string(col_sum));
    }
  }
  return check;
}

/// Expected payoff sum q(j,i) c(j,i) under the plan.
inline Rational plan_value(const TransportPlan& plan, const PayoffGrid& grid) {
  if (grid.rows() != plan.q.rows() || grid.cols() != plan.q.cols()) {
    throw DimensionMismatch("payoff grid does not match the plan");
  }
  Rational value = 0;
  for (std::size_t j = 0; j < plan.q.rows(); ++j)
    for (std::size_t i = 0; i < plan.q.cols(); ++i)
      if (sgn(plan.q(j, i)) != 0) value += plan.q(j, i) * grid(j, i);
  return value;
}

}  // namespace mot
