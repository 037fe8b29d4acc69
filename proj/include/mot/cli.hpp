#pragma once

#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mot/dual_hedge.hpp"
#include "mot/errors.hpp"
#include "mot/io.hpp"
#include "mot/lp.hpp"
#include "mot/market_data.hpp"
#include "mot/measure.hpp"
#include "mot/monotone_plan.hpp"
#include "mot/payoff.hpp"

namespace mot::cli {

using nlohmann::json;

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInputError = 2;

struct CommandResult {
  int exit_code = kExitOk;
  json output = json::object();
  std::vector<std::string> diagnostics;  // goes to stderr
};

enum class Bound { Upper, Lower };
enum class Method { Monotone, Lp, Both };

struct CommandOptions {
  bool debug_invariants = false;
};

/// Writes `key` as an exact rational string and `key_decimal` for display.
inline void put_value(json& out, const std::string& key, const Rational& r) {
  out[key] = to_string(r);
  out[key + "_decimal"] = to_decimal(r);
}

inline json smc_to_json(const SmcReport& r) {
  json out = {{"holds_strict", r.holds_strict}, {"holds_weak", r.holds_weak}};
  if (r.first_violation) {
    const auto& w = *r.first_violation;
    out["witness"] = {{"j", w.j}, {"j2", w.j2}, {"lo", w.lo}, {"mid", w.mid}, {"hi", w.hi},
                      {"scaled_value", to_string(w.scaled_value)}};
  }
  return out;
}

inline json order_to_json(const OrderReport& r) {
  json out = {{"ordered", r.ordered},
              {"mass_equal", r.mass_equal},
              {"mean_equal", r.mean_equal},
              {"call_dominated", r.call_dominated}};
  if (r.violating_strike) out["violating_strike"] = to_string(*r.violating_strike);
  return out;
}

inline json witness_to_json(const ForbiddenWitness& w, const TransportPlan& plan) {
  return {{"x", to_string(plan.mu.atom(w.j))},      {"x_prime", to_string(plan.mu.atom(w.j2))},
          {"y_minus", to_string(plan.nu.atom(w.lo))}, {"y_prime", to_string(plan.nu.atom(w.mid))},
          {"y_plus", to_string(plan.nu.atom(w.hi))}};
}

/// Runs a command body, mapping library errors onto exit codes:
/// 2 for unreadable or malformed input, 1 for domain violations.
inline CommandResult guarded(const std::function<CommandResult()>& body) {
  auto fail = [](int code, const std::string& kind, const std::string& what) {
    CommandResult r;
    r.exit_code = code;
    r.output = {{"error", kind}, {"message", what}};
    r.diagnostics.push_back(kind + ": " + what);
    return r;
  };
  try {
    return body();
  } catch (const ParseError& e) {
    return fail(kExitInputError, "ParseError", e.what());
  } catch (const DimensionMismatch& e) {
    return fail(kExitInputError, "DimensionMismatch", e.what());
  } catch (const UnknownPayoff& e) {
    return fail(kExitInputError, "UnknownPayoff", e.what());
  } catch (const EmptyMeasure& e) {
    return fail(kExitInputError, "EmptyMeasure", e.what());
  } catch (const InvalidArgument& e) {
    return fail(kExitInputError, "InvalidArgument", e.what());
  } catch (const NotInConvexOrder& e) {
    return fail(kExitViolation, "NotInConvexOrder", e.what());
  } catch (const ArbitrageViolation& e) {
    return fail(kExitViolation, "ArbitrageViolation", e.what());
  } catch (const IncompleteCurve& e) {
    return fail(kExitViolation, "IncompleteCurve", e.what());
  } catch (const CompletionInfeasible& e) {
    return fail(kExitViolation, "CompletionInfeasible", e.what());
  } catch (const InternalInvariantViolation& e) {
    return fail(kExitViolation, "InternalInvariantViolation", e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(kExitInputError, "ParseError", e.what());
  }
}

inline CommandResult check_order(const json& instance_doc) {
  return guarded([&] {
    const io::Instance inst = io::parse_instance(instance_doc);
    const OrderReport report = check_convex_order(inst.mu, inst.nu);
    CommandResult r;
    r.output = order_to_json(report);
    r.exit_code = report.ordered ? kExitOk : kExitViolation;
    return r;
  });
}

namespace detail {

inline void require_ordered(const io::Instance& inst) {
  const OrderReport order = check_convex_order(inst.mu, inst.nu);
  if (!order.ordered) {
    throw NotInConvexOrder(!order.mass_equal   ? "mu and nu have different total mass"
                           : !order.mean_equal ? "mu and nu have different means"
                                               : "C_mu exceeds C_nu at strike " +
                                                     to_string(*order.violating_strike));
  }
  if (!inst.mu.is_probability()) throw InvalidArgument("mu and nu must be probability measures");
}

}  // namespace detail

/// Price bound for the instance's payoff. The monotone method uses the
/// left- or right-monotone coupling, whichever the Spence-Mirrlees type
/// check certifies for the requested bound; the LP method solves the
/// transport problem directly; "both" runs the two and compares.
inline CommandResult solve(const json& instance_doc, Bound bound, Method method,
                           const CommandOptions& options = {}) {
  return guarded([&] {
    const io::Instance inst = io::parse_instance(instance_doc);
    detail::require_ordered(inst);
    const SmcReport smc = check_smc(inst.grid);
    const SmcReport smc_negated = check_smc(inst.grid.negated());

    CommandResult r;
    json warnings = json::array();
    r.output["bound"] = bound == Bound::Upper ? "upper" : "lower";
    r.output["method"] = method == Method::Monotone ? "monotone"
                         : method == Method::Lp     ? "lp"
                                                    : "both";
    r.output["payoff"] = inst.payoff_label;
    r.output["smc"] = smc_to_json(smc);
    r.output["smc_negated"] = smc_to_json(smc_negated);

    std::optional<Rational> monotone_value;
    if (method != Method::Lp) {
      // c satisfying the condition: left plan maximizes, right plan minimizes.
      // -c satisfying it: the roles swap.
      bool use_left;
      bool certified = true;
      if (smc.holds_strict) {
        use_left = bound == Bound::Upper;
      } else if (smc_negated.holds_strict) {
        use_left = bound == Bound::Lower;
      } else {
        use_left = bound == Bound::Upper;
        certified = false;
      }
      MonotoneOptions mo{options.debug_invariants};
      const TransportPlan plan =
          use_left ? build_left_monotone(inst.mu, inst.nu, mo) : build_right_monotone(inst.mu, inst.nu, mo);
      if (!certified) {
        warnings.push_back("payoff does not satisfy the strict monotonicity condition for either "
                           "sign; the " + std::string(use_left ? "left" : "right") +
                           "-monotone plan is feasible but may not be optimal");
      }
      monotone_value = plan_value(plan, inst.grid);
      r.output["plan_kind"] = use_left ? "left_monotone" : "right_monotone";
      r.output["plan"] = io::plan_to_json(plan);
      put_value(r.output, "value", *monotone_value);
    }
    if (method != Method::Monotone) {
      const LpSolution sol = solve_lp(
          build_primal(inst.mu, inst.nu, inst.grid, bound == Bound::Upper ? Sense::Max : Sense::Min));
      if (sol.status != LpStatus::Optimal) {
        throw InternalInvariantViolation(std::string("transport LP is ") + to_string(sol.status));
      }
      put_value(r.output, "lp_value", sol.objective_value);
      if (method == Method::Lp) {
        r.output["plan_kind"] = "lp";
        r.output["plan"] = io::plan_to_json(plan_from_primal(inst.mu, inst.nu, sol));
        put_value(r.output, "value", sol.objective_value);
      } else {
        r.output["agreement"] = *monotone_value == sol.objective_value;
        if (*monotone_value != sol.objective_value) {
          warnings.push_back("monotone plan value differs from the LP optimum");
        }
      }
    }
    r.output["warnings"] = warnings;
    for (const auto& w : warnings) r.diagnostics.push_back("warning: " + w.get<std::string>());
    return r;
  });
}

/// Superhedge of the upper bound, with its verification report.
inline CommandResult hedge(const json& instance_doc, const CommandOptions& options = {}) {
  return guarded([&] {
    const io::Instance inst = io::parse_instance(instance_doc);
    detail::require_ordered(inst);
    const SmcReport smc = check_smc(inst.grid);

    HedgeOptions ho;
    ho.monotone.check_invariants = options.debug_invariants;
    const DualHedgeResult result = build_dual_hedge(inst.mu, inst.nu, inst.grid, ho);

    // The gap is measured against an optimal plan: the left-monotone one
    // when the construction went through, the LP optimum otherwise.
    TransportPlan reference;
    if (result.fallback) {
      const LpSolution sol = solve_lp(build_primal(inst.mu, inst.nu, inst.grid, Sense::Max));
      reference = plan_from_primal(inst.mu, inst.nu, sol);
    } else {
      reference = build_left_monotone(inst.mu, inst.nu, ho.monotone);
    }
    const HedgeReport report = verify_hedge(result.portfolio, inst.mu, inst.nu, inst.grid, &reference);

    CommandResult r;
    json warnings = json::array();
    if (!smc.holds_strict) {
      warnings.push_back("payoff does not satisfy the strict monotonicity condition");
    }
    if (result.fallback) {
      warnings.push_back("monotone hedge could not be completed (" + *result.fallback_reason +
                         "); returned the LP superhedge");
    }
    r.output = {{"payoff", inst.payoff_label},
                {"portfolio", io::portfolio_to_json(result.portfolio)},
                {"fallback", result.fallback},
                {"smc", smc_to_json(smc)},
                {"warnings", warnings}};
    json rep = {{"feasible", report.feasible},
                {"gap", to_string(*report.gap)},
                {"slackness_ok", *report.slackness_ok}};
    put_value(rep, "cost", report.cost);
    put_value(rep, "plan_value", plan_value(reference, inst.grid));
    r.output["report"] = std::move(rep);
    if (result.fallback_reason) r.output["fallback_reason"] = *result.fallback_reason;
    for (const auto& w : warnings) r.diagnostics.push_back("warning: " + w.get<std::string>());
    return r;
  });
}

/// Marginals implied by each maturity's call quotes plus the convex-order
/// matrix between them; exit 1 if consecutive maturities are not ordered.
inline CommandResult extract(const json& quote_doc) {
  return guarded([&] {
    const auto sets = io::parse_quote_file(quote_doc);
    std::vector<DiscreteMeasure> marginals;
    json listing = json::array();
    for (const auto& [label, set] : sets) {
      DiscreteMeasure m = extract_marginal(set);
      listing.push_back({{"label", label},
                         {"forward", to_string(set.forward)},
                         {"measure", io::measure_to_json(m, "x")},
                         {"mean", to_string(mean(m))}});
      marginals.push_back(std::move(m));
    }
    json matrix = json::array();
    for (const auto& a : marginals) {
      json row = json::array();
      for (const auto& b : marginals) row.push_back(check_convex_order(a, b).ordered);
      matrix.push_back(std::move(row));
    }
    bool consecutive = true;
    for (std::size_t k = 0; k + 1 < marginals.size(); ++k) {
      consecutive = consecutive && check_convex_order(marginals[k], marginals[k + 1]).ordered;
    }
    CommandResult r;
    r.output = {{"maturities", std::move(listing)},
                {"order_matrix", std::move(matrix)},
                {"consecutive_ordered", consecutive}};
    if (!consecutive) {
      r.exit_code = kExitViolation;
      r.diagnostics.push_back("calendar arbitrage: consecutive maturities are not in convex order");
    }
    return r;
  });
}

/// Checks a plan file: martingale-plan constraints and left monotonicity.
inline CommandResult verify_plan(const json& instance_doc, const json& plan_doc) {
  return guarded([&] {
    const io::Instance inst = io::parse_instance(instance_doc);
    const TransportPlan plan = io::plan_from_json(plan_doc, inst.mu, inst.nu);
    const PlanCheck check = check_plan(plan);
    const auto witness = verify_left_monotone(plan);

    CommandResult r;
    r.output = {{"kind", "plan"},
                {"constraints_ok", check.ok()},
                {"nonnegative", check.nonnegative},
                {"rows_match_mu", check.rows_match_mu},
                {"cols_match_nu", check.cols_match_nu},
                {"martingale", check.martingale},
                {"left_monotone", !witness.has_value()}};
    put_value(r.output, "value", plan_value(plan, inst.grid));
    if (check.first_failure) r.output["first_failure"] = *check.first_failure;
    if (witness) r.output["witness"] = witness_to_json(*witness, plan);
    r.exit_code = check.ok() && !witness ? kExitOk : kExitViolation;
    return r;
  });
}

/// Checks a hedge file: superhedging inequalities, cost, and the gap to
/// the optimal upper bound.
inline CommandResult verify_hedge_file(const json& instance_doc, const json& hedge_doc) {
  return guarded([&] {
    const io::Instance inst = io::parse_instance(instance_doc);
    detail::require_ordered(inst);
    const HedgePortfolio portfolio = io::portfolio_from_json(hedge_doc);
    TransportPlan reference;
    if (check_smc(inst.grid).holds_strict) {
      reference = build_left_monotone(inst.mu, inst.nu);
    } else {
      reference = plan_from_primal(inst.mu, inst.nu,
                                   solve_lp(build_primal(inst.mu, inst.nu, inst.grid, Sense::Max)));
    }
    const HedgeReport report = verify_hedge(portfolio, inst.mu, inst.nu, inst.grid, &reference);

    CommandResult r;
    r.output = {{"kind", "hedge"},
                {"feasible", report.feasible},
                {"gap", to_string(*report.gap)},
                {"slackness_ok", *report.slackness_ok}};
    put_value(r.output, "cost", report.cost);
    put_value(r.output, "upper_bound", plan_value(reference, inst.grid));
    if (report.first_violation) {
      r.output["violation"] = {{"j", report.first_violation->first},
                               {"i", report.first_violation->second}};
    }
    r.exit_code = report.feasible ? kExitOk : kExitViolation;
    return r;
  });
}

/// Loads a JSON file inside the error mapping, so I/O failures exit with 2.
inline CommandResult with_file(const std::string& path,
                               const std::function<CommandResult(const json&)>& body) {
  std::optional<json> doc;
  CommandResult loaded = guarded([&] {
    doc = io::load_json_file(path);
    return CommandResult{};
  });
  if (!doc) return loaded;
  return body(*doc);
}

}  // namespace mot::cli
