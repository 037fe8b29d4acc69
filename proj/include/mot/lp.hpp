#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mot/errors.hpp"
#include "mot/matrix.hpp"
#include "mot/measure.hpp"
#include "mot/payoff.hpp"
#include "mot/rational.hpp"
#include "mot/transport_plan.hpp"

namespace mot {

enum class RowKind { Eq, Ge, Le };
enum class Sense { Max, Min };
enum class VarBound { NonNeg, Free };
enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

/// optimize objective . x  subject to  row_k(constraints) x  {=,>=,<=}  rhs_k.
struct LinearProgram {
  Sense sense = Sense::Max;
  std::vector<Rational> objective;
  Matrix<Rational> constraints;
  std::vector<Rational> rhs;
  std::vector<RowKind> row_kinds;
  std::vector<VarBound> bounds;

  std::size_t num_vars() const noexcept { return objective.size(); }
  std::size_t num_rows() const noexcept { return rhs.size(); }

  void validate() const {
    if (constraints.cols() != objective.size() && constraints.rows() != 0) {
      throw DimensionMismatch("constraint matrix has " + std::to_string(constraints.cols()) +
                              " columns for " + std::to_string(objective.size()) + " variables");
    }
    if (constraints.rows() != rhs.size() || row_kinds.size() != rhs.size()) {
      throw DimensionMismatch("row count disagrees between matrix, rhs and row kinds");
    }
    if (bounds.size() != objective.size()) {
      throw DimensionMismatch("one bound kind per variable is required");
    }
  }
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rational> primal;
  Rational objective_value;
  /// One multiplier per constraint row, with objective_value == duals . rhs.
  /// For a maximization the multipliers are feasible for the dual
  /// minimization (and vice versa).
  std::vector<Rational> duals;
  std::size_t pivots = 0;
};

namespace detail {

/// Dense simplex tableau over the rationals. Row r reads
/// sum_k t(r, k) x_k = b[r] with basis[r] the basic column of row r.
class SimplexTableau {
 public:
  SimplexTableau(std::size_t rows, std::size_t cols)
      : t_(rows, cols), b_(rows), basis_(rows, 0), reduced_(cols) {}

  Matrix<Rational>& t() { return t_; }
  std::vector<Rational>& b() { return b_; }
  std::vector<std::size_t>& basis() { return basis_; }
  std::size_t rows() const { return t_.rows(); }
  std::size_t cols() const { return t_.cols(); }
  std::size_t pivots() const { return pivots_; }

  /// Loads reduced costs d_k = cost_k - sum_r cost_{basis[r]} t(r, k).
  void price(const std::vector<Rational>& cost) {
    reduced_ = cost;
    for (std::size_t r = 0; r < rows(); ++r) {
      const Rational& cb = cost[basis_[r]];
      if (sgn(cb) == 0) continue;
      auto row = t_.row(r);
      for (std::size_t k = 0; k < cols(); ++k)
        if (sgn(row[k]) != 0) reduced_[k] -= cb * row[k];
    }
  }

  /// Minimizes with Bland's rule; columns >= `enter_limit` never enter.
  /// Returns false when the objective is unbounded below.
  bool minimize(std::size_t enter_limit) {
    Rational best;
    Rational ratio;
    for (;;) {
      std::size_t enter = enter_limit;
      for (std::size_t k = 0; k < enter_limit; ++k) {
        if (sgn(reduced_[k]) < 0) {
          enter = k;
          break;
        }
      }
      if (enter == enter_limit) return true;

      std::optional<std::size_t> leave;
      for (std::size_t r = 0; r < rows(); ++r) {
        const Rational& a = t_(r, enter);
        if (sgn(a) <= 0) continue;
        ratio = b_[r] / a;
        if (!leave || ratio < best || (ratio == best && basis_[r] < basis_[*leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, enter);
    }
  }

  void pivot(std::size_t pr, std::size_t pc) {
    ++pivots_;
    auto prow = t_.row(pr);
    nonzero_.clear();
    for (std::size_t k = 0; k < cols(); ++k)
      if (sgn(prow[k]) != 0) nonzero_.push_back(k);

    const Rational inv = 1 / Rational(prow[pc]);
    for (std::size_t k : nonzero_) prow[k] *= inv;
    b_[pr] *= inv;

    Rational factor;
    for (std::size_t r = 0; r < rows(); ++r) {
      if (r == pr || sgn(t_(r, pc)) == 0) continue;
      factor = t_(r, pc);
      auto row = t_.row(r);
      for (std::size_t k : nonzero_) row[k] -= factor * prow[k];
      b_[r] -= factor * b_[pr];
    }
    if (sgn(reduced_[pc]) != 0) {
      factor = reduced_[pc];
      for (std::size_t k : nonzero_) reduced_[k] -= factor * prow[k];
    }
    basis_[pr] = pc;
  }

 private:
  Matrix<Rational> t_;
  std::vector<Rational> b_;
  std::vector<std::size_t> basis_;
  std::vector<Rational> reduced_;
  std::vector<std::size_t> nonzero_;
  std::size_t pivots_ = 0;
};

}  // namespace detail

/// Exact two-phase primal simplex with Bland's anti-cycling rule.
inline LpSolution solve_lp(const LinearProgram& lp) {
  lp.validate();
  const std::size_t n = lp.num_vars();
  const std::size_t m = lp.num_rows();

  // Free variables are split as x = x+ - x-.
  std::vector<std::size_t> pos_col(n), neg_col(n, static_cast<std::size_t>(-1));
  std::size_t cols = 0;
  for (std::size_t v = 0; v < n; ++v) {
    pos_col[v] = cols++;
    if (lp.bounds[v] == VarBound::Free) neg_col[v] = cols++;
  }

  // Rows are negated where needed so that every right-hand side is >= 0.
  std::vector<int> row_sign(m, 1);
  std::vector<std::size_t> slack_col(m, static_cast<std::size_t>(-1));
  std::vector<int> slack_coef(m, 0);
  for (std::size_t r = 0; r < m; ++r) {
    if (sgn(lp.rhs[r]) < 0) row_sign[r] = -1;
    if (lp.row_kinds[r] != RowKind::Eq) {
      slack_col[r] = cols++;
      slack_coef[r] = (lp.row_kinds[r] == RowKind::Le ? 1 : -1) * row_sign[r];
    }
  }
  const std::size_t artificial_begin = cols;
  std::vector<std::size_t> identity_col(m);
  for (std::size_t r = 0; r < m; ++r) {
    identity_col[r] = slack_coef[r] == 1 ? slack_col[r] : cols++;
  }
  const bool has_artificials = cols > artificial_begin;

  detail::SimplexTableau tab(m, cols);
  for (std::size_t r = 0; r < m; ++r) {
    auto row = tab.t().row(r);
    const auto src = lp.constraints.row(r);
    for (std::size_t v = 0; v < n; ++v) {
      if (sgn(src[v]) == 0) continue;
      row[pos_col[v]] = row_sign[r] < 0 ? Rational(-src[v]) : src[v];
      if (neg_col[v] != static_cast<std::size_t>(-1)) row[neg_col[v]] = -row[pos_col[v]];
    }
    if (slack_coef[r] != 0) row[slack_col[r]] = slack_coef[r];
    row[identity_col[r]] = 1;
    tab.b()[r] = row_sign[r] < 0 ? Rational(-lp.rhs[r]) : lp.rhs[r];
    tab.basis()[r] = identity_col[r];
  }

  LpSolution sol;
  if (has_artificials) {
    std::vector<Rational> phase1(cols, Rational(0));
    for (std::size_t k = artificial_begin; k < cols; ++k) phase1[k] = 1;
    tab.price(phase1);
    tab.minimize(cols);
    Rational infeasibility = 0;
    for (std::size_t r = 0; r < m; ++r)
      if (tab.basis()[r] >= artificial_begin) infeasibility += tab.b()[r];
    if (sgn(infeasibility) > 0) {
      sol.status = LpStatus::Infeasible;
      sol.pivots = tab.pivots();
      return sol;
    }
    // Artificials still basic sit at zero; pivot them out where possible.
    // A row with no nonzero real entry is redundant and stays put.
    for (std::size_t r = 0; r < m; ++r) {
      if (tab.basis()[r] < artificial_begin) continue;
      for (std::size_t k = 0; k < artificial_begin; ++k) {
        if (sgn(tab.t()(r, k)) != 0) {
          tab.pivot(r, k);
          break;
        }
      }
    }
  }

  const int flip = lp.sense == Sense::Max ? -1 : 1;
  std::vector<Rational> cost(cols, Rational(0));
  for (std::size_t v = 0; v < n; ++v) {
    cost[pos_col[v]] = flip * lp.objective[v];
    if (neg_col[v] != static_cast<std::size_t>(-1)) cost[neg_col[v]] = -cost[pos_col[v]];
  }
  tab.price(cost);
  const bool bounded = tab.minimize(artificial_begin);
  sol.pivots = tab.pivots();
  if (!bounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  std::vector<Rational> column_value(cols, Rational(0));
  for (std::size_t r = 0; r < m; ++r) column_value[tab.basis()[r]] = tab.b()[r];
  sol.status = LpStatus::Optimal;
  sol.primal.assign(n, Rational(0));
  sol.objective_value = 0;
  for (std::size_t v = 0; v < n; ++v) {
    sol.primal[v] = column_value[pos_col[v]];
    if (neg_col[v] != static_cast<std::size_t>(-1)) sol.primal[v] -= column_value[neg_col[v]];
    sol.objective_value += lp.objective[v] * sol.primal[v];
  }
  sol.duals.assign(m, Rational(0));
  for (std::size_t i = 0; i < m; ++i) {
    Rational y = 0;
    for (std::size_t r = 0; r < m; ++r) {
      const Rational& cb = cost[tab.basis()[r]];
      if (sgn(cb) != 0) y += cb * tab.t()(r, identity_col[i]);
    }
    sol.duals[i] = (row_sign[i] * flip) * y;
  }
  return sol;
}

namespace detail {

inline void require_supports(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const PayoffGrid& grid) {
  if (grid.rows() != mu.size() || grid.cols() != nu.size()) {
    throw DimensionMismatch("payoff grid is " + std::to_string(grid.rows()) + "x" +
                            std::to_string(grid.cols()) + " but the measures have " +
                            std::to_string(mu.size()) + " and " + std::to_string(nu.size()) +
                            " atoms");
  }
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (grid.xs()[j] != mu.atom(j)) throw DimensionMismatch("payoff rows do not match supp(mu)");
  for (std::size_t i = 0; i < nu.size(); ++i)
    if (grid.ys()[i] != nu.atom(i)) throw DimensionMismatch("payoff columns do not match supp(nu)");
}

}  // namespace detail

/// Martingale transport problem over q(j, i) >= 0, variable j*M + i.
/// Rows: N row marginals, M column marginals, N martingale rows, in that
/// order. Max gives the upper price bound, Min the lower one.
inline LinearProgram build_primal(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const PayoffGrid& grid, Sense sense) {
  detail::require_supports(mu, nu, grid);
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  LinearProgram lp;
  lp.sense = sense;
  lp.objective.resize(n * m);
  lp.bounds.assign(n * m, VarBound::NonNeg);
  lp.constraints = Matrix<Rational>(2 * n + m, n * m);
  lp.rhs.assign(2 * n + m, Rational(0));
  lp.row_kinds.assign(2 * n + m, RowKind::Eq);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t v = j * m + i;
      lp.objective[v] = grid(j, i);
      lp.constraints(j, v) = 1;
      lp.constraints(n + i, v) = 1;
      lp.constraints(n + m + j, v) = nu.atom(i) - mu.atom(j);
    }
    lp.rhs[j] = mu.weight(j);
  }
  for (std::size_t i = 0; i < m; ++i) lp.rhs[n + i] = nu.weight(i);
  return lp;
}

/// Superhedging problem over the free variables (phi_0..phi_{N-1},
/// h_0..h_{N-1}, psi_0..psi_{M-1}); row j*M + i reads
/// phi_j + psi_i + h_j (y_i - x_j) >= c(j, i).
inline LinearProgram build_dual(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                const PayoffGrid& grid) {
  detail::require_supports(mu, nu, grid);
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  const std::size_t vars = 2 * n + m;
  LinearProgram lp;
  lp.sense = Sense::Min;
  lp.objective.assign(vars, Rational(0));
  for (std::size_t j = 0; j < n; ++j) lp.objective[j] = mu.weight(j);
  for (std::size_t i = 0; i < m; ++i) lp.objective[2 * n + i] = nu.weight(i);
  lp.bounds.assign(vars, VarBound::Free);
  lp.constraints = Matrix<Rational>(n * m, vars);
  lp.rhs.resize(n * m);
  lp.row_kinds.assign(n * m, RowKind::Ge);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t r = j * m + i;
      lp.constraints(r, j) = 1;
      lp.constraints(r, n + j) = nu.atom(i) - mu.atom(j);
      lp.constraints(r, 2 * n + i) = 1;
      lp.rhs[r] = grid(j, i);
    }
  }
  return lp;
}

/// Reads an optimal solution of build_primal back as a plan.
inline TransportPlan plan_from_primal(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                      const LpSolution& sol) {
  if (sol.status != LpStatus::Optimal) throw InvalidArgument("LP solution is not optimal");
  if (sol.primal.size() != mu.size() * nu.size()) {
    throw DimensionMismatch("LP solution does not match the supports");
  }
  TransportPlan plan{Matrix<Rational>(mu.size(), nu.size()), mu, nu};
  for (std::size_t j = 0; j < mu.size(); ++j)
    for (std::size_t i = 0; i < nu.size(); ++i) plan.q(j, i) = sol.primal[j * nu.size() + i];
  return plan;
}

}  // namespace mot
