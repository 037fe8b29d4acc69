#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mot/affine_expr.hpp"
#include "mot/errors.hpp"
#include "mot/lp.hpp"
#include "mot/measure.hpp"
#include "mot/monotone_plan.hpp"
#include "mot/payoff.hpp"
#include "mot/rational.hpp"
#include "mot/transport_plan.hpp"

namespace mot {

/// Semi-static superhedge: static claims phi(X) and psi(Y) plus h(X) units
/// of the underlying held from t to T.
struct HedgePortfolio {
  std::vector<Rational> phi;
  std::vector<Rational> psi;
  std::vector<Rational> h;

  /// Price of the static legs, sum w_j phi_j + sum v_i psi_i.
  Rational cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
    if (phi.size() != mu.size() || psi.size() != nu.size()) {
      throw DimensionMismatch("portfolio does not match the marginals");
    }
    Rational total = 0;
    for (std::size_t j = 0; j < phi.size(); ++j) total += mu.weight(j) * phi[j];
    for (std::size_t i = 0; i < psi.size(); ++i) total += nu.weight(i) * psi[i];
    return total;
  }

  friend bool operator==(const HedgePortfolio&, const HedgePortfolio&) = default;
};

/// Symbol ids used by the symbolic hedge: the 2N + M hedge variables first
/// (phi, then h, then psi), then one symbol per payoff cell c(j, i).
struct HedgeSymbols {
  std::size_t n = 0;
  std::size_t m = 0;

  AffineExpr::Symbol phi(std::size_t j) const { return j; }
  AffineExpr::Symbol h(std::size_t j) const { return n + j; }
  AffineExpr::Symbol psi(std::size_t i) const { return 2 * n + i; }
  AffineExpr::Symbol payoff(std::size_t j, std::size_t i) const { return 2 * n + m + j * m + i; }
  std::size_t num_vars() const { return 2 * n + m; }
  bool is_payoff(AffineExpr::Symbol s) const { return s >= num_vars(); }
};

/// Hedge variables expressed through the payoff symbols and the variables
/// left free by the construction.
struct SymbolicHedge {
  HedgeSymbols symbols;
  std::vector<AffineExpr> values;  // one per hedge variable
  std::vector<bool> fixed;

  const AffineExpr& phi(std::size_t j) const { return values.at(symbols.phi(j)); }
  const AffineExpr& h(std::size_t j) const { return values.at(symbols.h(j)); }
  const AffineExpr& psi(std::size_t i) const { return values.at(symbols.psi(i)); }

  std::vector<std::size_t> free_vars() const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < fixed.size(); ++v)
      if (!fixed[v]) out.push_back(v);
    return out;
  }
};

/// Replays the steps of the left-monotone construction and, at every
/// crossing, fixes one hedge variable so that the superhedging inequality
/// is tight on the cell that just received mass:
///   coincide, x exhausted:  phi_j  = c(j,l) - psi_l
///   coincide, y exhausted:  psi_l  = c(j,l) - phi_j
///   bracket, x exhausted:   (phi_j, h_j) from the two tight cells (j,lo), (j,hi)
///   bracket, y exhausted:   psi_y  = c(j,y) - phi_j - h_j (y - x_j) for the emptied y
/// Later fixes are substituted into earlier ones; the result depends only
/// on the still-free variables and the payoff symbols.
inline SymbolicHedge symbolic_dual_hedge(const MonotoneResult& primal) {
  const DiscreteMeasure& mu = primal.plan.mu;
  const DiscreteMeasure& nu = primal.plan.nu;
  HedgeSymbols sym{mu.size(), nu.size()};
  const std::size_t vars = sym.num_vars();

  std::vector<std::optional<AffineExpr>> definition(vars);
  std::vector<std::size_t> order;
  auto fix = [&](AffineExpr::Symbol v, AffineExpr value) {
    if (definition[v]) {
      throw InternalInvariantViolation("hedge variable " + std::to_string(v) + " fixed twice");
    }
    definition[v] = std::move(value);
    order.push_back(v);
  };
  using E = AffineExpr;
  auto tight_psi = [&](std::size_t j, std::size_t i) {
    // psi_i = c(j,i) - phi_j - h_j (y_i - x_j)
    return E::symbol(sym.payoff(j, i)) - E::symbol(sym.phi(j)) -
           E::symbol(sym.h(j), Rational(nu.atom(i) - mu.atom(j)));
  };

  for (const PlanStep& step : primal.steps) {
    const std::size_t j = step.x;
    switch (step.kind) {
      case StepCase::kCoincideXExhausted:
        fix(sym.phi(j), E::symbol(sym.payoff(j, step.lo)) - E::symbol(sym.psi(step.lo)));
        break;
      case StepCase::kCoincideYExhausted:
        fix(sym.psi(step.lo), E::symbol(sym.payoff(j, step.lo)) - E::symbol(sym.phi(j)));
        break;
      case StepCase::kBracketXExhausted: {
        const std::size_t lo = step.lo;
        const std::size_t hi = *step.hi;
        const Rational width = nu.atom(hi) - nu.atom(lo);
        E slope = (E::symbol(sym.payoff(j, hi)) - E::symbol(sym.payoff(j, lo)) -
                   E::symbol(sym.psi(hi)) + E::symbol(sym.psi(lo))) *
                  Rational(1 / width);
        E level = E::symbol(sym.payoff(j, lo)) - E::symbol(sym.psi(lo)) -
                  slope * Rational(nu.atom(lo) - mu.atom(j));
        fix(sym.h(j), std::move(slope));
        fix(sym.phi(j), std::move(level));
        break;
      }
      case StepCase::kBracketLowExhausted:
      case StepCase::kBracketHighExhausted:
        for (std::size_t i : step.crossed_y) fix(sym.psi(i), tight_psi(j, i));
        break;
    }
  }

  // A definition only mentions variables that were still pending when it
  // was made, so resolving in reverse order of fixing is enough.
  SymbolicHedge out{sym, std::vector<AffineExpr>(vars), std::vector<bool>(vars, false)};
  for (std::size_t v = 0; v < vars; ++v) {
    if (!definition[v]) out.values[v] = E::symbol(v);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    E value = *definition[*it];
    std::vector<AffineExpr::Symbol> pending;
    for (const auto& [id, c] : value.terms())
      if (!sym.is_payoff(id) && definition[id]) pending.push_back(id);
    for (AffineExpr::Symbol later : pending) {
      if (!out.fixed[later]) throw InternalInvariantViolation("hedge definitions are cyclic");
      value = value.substituted(later, out.values[later]);
    }
    out.values[*it] = std::move(value);
    out.fixed[*it] = true;
  }
  return out;
}

inline SymbolicHedge symbolic_dual_hedge(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                         const MonotoneOptions& options = {}) {
  return symbolic_dual_hedge(build_left_monotone_traced(mu, nu, options));
}

struct HedgeOptions {
  MonotoneOptions monotone;
  /// On an infeasible completion return the full LP dual instead of throwing.
  bool allow_fallback = true;
};

struct DualHedgeResult {
  HedgePortfolio portfolio;
  /// The portfolio came from solving the full superhedging LP because the
  /// monotone construction could not be completed.
  bool fallback = false;
  std::optional<std::string> fallback_reason;
  std::vector<std::size_t> completed_vars;  // variables chosen by the completion LP
};

namespace detail {

inline HedgePortfolio portfolio_from_dual_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                             const PayoffGrid& grid) {
  const LpSolution sol = solve_lp(build_dual(mu, nu, grid));
  if (sol.status != LpStatus::Optimal) {
    throw InternalInvariantViolation(std::string("superhedging LP is ") + to_string(sol.status));
  }
  const std::size_t n = mu.size();
  HedgePortfolio p;
  p.phi.assign(sol.primal.begin(), sol.primal.begin() + n);
  p.h.assign(sol.primal.begin() + n, sol.primal.begin() + 2 * n);
  p.psi.assign(sol.primal.begin() + 2 * n, sol.primal.end());
  return p;
}

}  // namespace detail

/// Superhedge of the upper bound built alongside the left-monotone plan.
/// Variables the construction leaves free are chosen by a reduced LP over
/// the superhedging inequalities. If that LP is infeasible (the payoff
/// does not make the left-monotone plan optimal) the full LP dual is
/// returned and flagged, or CompletionInfeasible is thrown when fallback
/// is disabled.
inline DualHedgeResult build_dual_hedge(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                        const PayoffGrid& grid, const HedgeOptions& options = {}) {
  detail::require_supports(mu, nu, grid);
  const SymbolicHedge symbolic = symbolic_dual_hedge(mu, nu, options.monotone);
  const HedgeSymbols& sym = symbolic.symbols;
  const std::size_t n = sym.n;
  const std::size_t m = sym.m;

  // Substitute payoff values; what remains mentions free variables only.
  std::vector<AffineExpr> values(sym.num_vars());
  for (std::size_t v = 0; v < sym.num_vars(); ++v) {
    AffineExpr e = symbolic.values[v].constant();
    for (const auto& [id, c] : symbolic.values[v].terms()) {
      if (sym.is_payoff(id)) {
        const std::size_t cell = id - sym.num_vars();
        e += AffineExpr(Rational(c * grid(cell / m, cell % m)));
      } else {
        e += AffineExpr::symbol(id, c);
      }
    }
    values[v] = std::move(e);
  }

  const std::vector<std::size_t> free = symbolic.free_vars();
  std::vector<std::size_t> column(sym.num_vars(), 0);
  for (std::size_t k = 0; k < free.size(); ++k) column[free[k]] = k;

  std::optional<std::string> failure;
  LinearProgram completion;
  completion.sense = Sense::Min;
  completion.objective.assign(free.size(), Rational(0));
  completion.bounds.assign(free.size(), VarBound::Free);
  std::vector<std::vector<Rational>> rows;
  for (std::size_t j = 0; j < n && !failure; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      AffineExpr slack = values[sym.phi(j)] + values[sym.psi(i)] +
                         values[sym.h(j)] * Rational(nu.atom(i) - mu.atom(j)) -
                         AffineExpr(grid(j, i));
      if (slack.is_constant()) {
        if (sgn(slack.constant()) < 0) {
          failure = "inequality (" + std::to_string(j) + ", " + std::to_string(i) +
                    ") is violated by the fixed variables";
          break;
        }
        continue;
      }
      std::vector<Rational> row(free.size(), Rational(0));
      for (const auto& [id, c] : slack.terms()) row[column[id]] = c;
      rows.push_back(std::move(row));
      completion.rhs.push_back(-slack.constant());
      completion.row_kinds.push_back(RowKind::Ge);
    }
  }
  AffineExpr objective;
  for (std::size_t j = 0; j < n; ++j) objective += values[sym.phi(j)] * mu.weight(j);
  for (std::size_t i = 0; i < m; ++i) objective += values[sym.psi(i)] * nu.weight(i);
  for (const auto& [id, c] : objective.terms()) completion.objective[column[id]] = c;

  std::vector<Rational> free_value(free.size(), Rational(0));
  if (!failure && !free.empty()) {
    completion.constraints = Matrix<Rational>(rows.size(), free.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t k = 0; k < free.size(); ++k) completion.constraints(r, k) = rows[r][k];
    const LpSolution sol = solve_lp(completion);
    if (sol.status == LpStatus::Optimal) {
      free_value = sol.primal;
    } else {
      failure = std::string("completion LP is ") + to_string(sol.status);
    }
  }

  DualHedgeResult result;
  if (failure) {
    if (!options.allow_fallback) throw CompletionInfeasible(*failure);
    result.portfolio = detail::portfolio_from_dual_lp(mu, nu, grid);
    result.fallback = true;
    result.fallback_reason = std::move(failure);
    return result;
  }

  auto lookup = [&](AffineExpr::Symbol id) { return free_value[column[id]]; };
  result.portfolio.phi.resize(n);
  result.portfolio.h.resize(n);
  result.portfolio.psi.resize(m);
  for (std::size_t j = 0; j < n; ++j) {
    result.portfolio.phi[j] = values[sym.phi(j)].evaluate(lookup);
    result.portfolio.h[j] = values[sym.h(j)].evaluate(lookup);
  }
  for (std::size_t i = 0; i < m; ++i) result.portfolio.psi[i] = values[sym.psi(i)].evaluate(lookup);
  result.completed_vars = free;
  return result;
}

struct HedgeReport {
  bool feasible = true;
  /// First cell (j, i) where phi_j + psi_i + h_j (y_i - x_j) < c(j, i).
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;
  Rational cost;
  /// cost - plan value, when a plan was supplied.
  std::optional<Rational> gap;
  /// Tightness on every cell the plan charges, when a plan was supplied.
  std::optional<bool> slackness_ok;
};

inline HedgeReport verify_hedge(const HedgePortfolio& portfolio, const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu, const PayoffGrid& grid,
                                const TransportPlan* plan = nullptr) {
  detail::require_supports(mu, nu, grid);
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  if (portfolio.phi.size() != n || portfolio.h.size() != n || portfolio.psi.size() != m) {
    throw DimensionMismatch("portfolio does not match the marginals");
  }
  if (plan && (plan->q.rows() != n || plan->q.cols() != m)) {
    throw DimensionMismatch("plan does not match the marginals");
  }
  HedgeReport report;
  report.cost = portfolio.cost(mu, nu);
  if (plan) report.slackness_ok = true;
  Rational payout;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      payout = portfolio.phi[j] + portfolio.psi[i] + portfolio.h[j] * (nu.atom(i) - mu.atom(j));
      const int s = sgn(Rational(payout - grid(j, i)));
      if (s < 0 && report.feasible) {
        report.feasible = false;
        report.first_violation = std::pair{j, i};
      }
      if (plan && s != 0 && sgn(plan->q(j, i)) > 0) report.slackness_ok = false;
    }
  }
  if (plan) report.gap = report.cost - plan_value(*plan, grid);
  return report;
}

}  // namespace mot
