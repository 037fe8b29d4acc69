#include <gtest/gtest.h>

#include "support/example.hpp"
#include "support/generators.hpp"
#include "support/vertex_enum.hpp"

using namespace mot;
using namespace mot::testing;

namespace {

// mu = 1/2 d_0 + 1/2 d_5; the first atom meets neighbours -1 and 1 that are
// both too small by the same factor.
DiscreteMeasure tie_mu() { return make_measure({{q("0"), q("1/2")}, {q("5"), q("1/2")}}); }
DiscreteMeasure tie_nu() {
  return make_measure({{q("-2"), q("3/16")},
                       {q("-1"), q("1/16")},
                       {q("1"), q("1/16")},
                       {q("2"), q("3/16")},
                       {q("5"), q("1/2")}});
}

TransportPlan tampered_example() {
  TransportPlan plan{example_left_plan(), example_mu(), example_nu()};
  // Move 1/12 of the mass x=1 sends to y=2 over to x=3, compensating both
  // rows on y=0 and y=5 in the 3:2 proportion that keeps the barycenters.
  const Rational e = q("1/12");
  plan.q(0, 1) -= e;
  plan.q(1, 1) += e;
  plan.q(1, 0) -= e * q("3/5");
  plan.q(1, 2) -= e * q("2/5");
  plan.q(0, 0) += e * q("3/5");
  plan.q(0, 2) += e * q("2/5");
  return plan;
}

}  // namespace

TEST(Split, SolvesBarycentricSystem) {
  const SplitSolution s = solve_split(q("1/2"), q("1"), q("0"), q("5"));
  EXPECT_EQ(s.lo, q("2/5"));
  EXPECT_EQ(s.hi, q("1/10"));
  EXPECT_EQ(Rational(s.lo + s.hi), q("1/2"));
  EXPECT_EQ(Rational(s.lo * 0 + s.hi * 5), q("1/2"));
}

TEST(LeftMonotone, ExamplePlan) {
  const MonotoneResult r = build_left_monotone_traced(example_mu(), example_nu());
  EXPECT_EQ(r.plan.q, example_left_plan());
  EXPECT_EQ(r.plan.mu, example_mu());
  EXPECT_EQ(r.plan.nu, example_nu());
  EXPECT_TRUE(check_plan(r.plan).ok());
  EXPECT_LE(r.steps.size(), 4u);
  EXPECT_EQ(plan_value(r.plan, example_grid()), 24);
}

TEST(LeftMonotone, ExampleTrace) {
  const MonotoneResult r = build_left_monotone_traced(example_mu(), example_nu());
  // x=1 first splits onto (0, 2) until y=2 runs out, then onto (0, 5)
  // until x=1 is empty; x=3 then splits exactly onto what is left.
  ASSERT_EQ(r.steps.size(), 3u);
  EXPECT_EQ(r.steps[0].x, 0u);
  EXPECT_EQ(r.steps[0].kind, StepCase::kBracketHighExhausted);
  EXPECT_EQ(r.steps[0].crossed_y, std::vector<std::size_t>{1});
  EXPECT_EQ(r.steps[1].kind, StepCase::kBracketXExhausted);
  EXPECT_TRUE(r.steps[1].crossed_x);
  EXPECT_EQ(r.steps[2].x, 1u);
  EXPECT_EQ(r.steps[2].kind, StepCase::kBracketXExhausted);
  EXPECT_EQ(r.steps[2].crossed_y, (std::vector<std::size_t>{0, 2}));
  EXPECT_STREQ(to_string(StepCase::kBracketXExhausted), "II.1");
}

TEST(LeftMonotone, IdentityWhenMarginalsAgree) {
  const DiscreteMeasure m = make_measure({{q("-1"), q("1/4")}, {q("2"), q("1/4")}, {q("7/2"), q("1/2")}});
  const TransportPlan p = build_left_monotone(m, m);
  for (std::size_t j = 0; j < m.size(); ++j)
    for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(p.q(j, i), j == i ? m.weight(j) : Rational(0));
  EXPECT_EQ(build_right_monotone(m, m).q, p.q);
}

TEST(LeftMonotone, ForcedSplits) {
  const DiscreteMeasure nu = make_measure({{q("0"), q("1/2")}, {q("2"), q("1/2")}});
  const MonotoneResult r = build_left_monotone_traced(dirac(1), nu);
  EXPECT_EQ(r.plan.q(0, 0), q("1/2"));
  EXPECT_EQ(r.plan.q(0, 1), q("1/2"));
  ASSERT_EQ(r.steps.size(), 1u);
  EXPECT_EQ(r.steps[0].kind, StepCase::kBracketXExhausted);

  const DiscreteMeasure sym = make_measure({{q("-1"), q("1/2")}, {q("1"), q("1/2")}});
  EXPECT_EQ(build_left_monotone(dirac(0), sym).q, build_right_monotone(dirac(0), sym).q);
  EXPECT_EQ(build_right_monotone(dirac(0), sym).q(0, 0), q("1/2"));
}

TEST(LeftMonotone, TieGoesToLowRuleAndMatchesUniquePlan) {
  const MonotoneResult r = build_left_monotone_traced(tie_mu(), tie_nu());
  ASSERT_FALSE(r.steps.empty());
  const PlanStep& first = r.steps[0];
  EXPECT_TRUE(first.both_short);
  EXPECT_EQ(first.kind, StepCase::kBracketLowExhausted);
  EXPECT_EQ(first.crossed_y, (std::vector<std::size_t>{1, 2}));
  EXPECT_FALSE(first.crossed_x);

  // The tie could have gone either way; the answer must be the one
  // left-monotone vertex of the polytope regardless.
  int left_monotone = 0;
  for (const auto& v : polytope_vertices(tie_mu(), tie_nu())) {
    if (has_left_crossing(v)) continue;
    ++left_monotone;
    EXPECT_EQ(v, r.plan.q);
  }
  EXPECT_EQ(left_monotone, 1);
  EXPECT_EQ(r.plan.q(0, 0), q("3/16"));
  EXPECT_EQ(r.plan.q(0, 1), q("1/16"));
  EXPECT_EQ(r.plan.q(0, 2), q("1/16"));
  EXPECT_EQ(r.plan.q(0, 3), q("3/16"));
  EXPECT_EQ(r.plan.q(1, 4), q("1/2"));
}

TEST(LeftMonotone, RejectsBadInputs) {
  EXPECT_THROW(build_left_monotone(example_nu(), example_mu()), NotInConvexOrder);
  const DiscreteMeasure half = make_measure({{q("1"), q("1/2")}});
  EXPECT_THROW(build_left_monotone(half, half), InvalidArgument);
  EXPECT_THROW(build_right_monotone(example_nu(), example_mu()), NotInConvexOrder);
  EXPECT_THROW(build_left_monotone(DiscreteMeasure{}, example_nu()), EmptyMeasure);
}

TEST(LeftMonotone, DebugRecheckPassesOnValidInstances) {
  Rng rng(41);
  MonotoneOptions options;
  options.check_invariants = true;
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = split_instance(rng, 6, 10);
    EXPECT_EQ(build_left_monotone(inst.mu, inst.nu, options).q, build_left_monotone(inst.mu, inst.nu).q);
  }
}

TEST(RightMonotone, ExampleAttainsLowerBound) {
  const TransportPlan p = build_right_monotone(example_mu(), example_nu());
  EXPECT_TRUE(check_plan(p).ok());
  EXPECT_FALSE(verify_right_monotone(p));
  const LpSolution min = solve_lp(build_primal(example_mu(), example_nu(), example_grid(), Sense::Min));
  EXPECT_EQ(plan_value(p, example_grid()), min.objective_value);
  EXPECT_EQ(min.objective_value, 22);
}

TEST(Verify, ExamplePlanIsLeftMonotone) {
  const TransportPlan plan{example_left_plan(), example_mu(), example_nu()};
  EXPECT_FALSE(verify_left_monotone(plan));
}

TEST(Verify, TamperedPlanHasWitness) {
  const TransportPlan t = tampered_example();
  ASSERT_TRUE(check_plan(t).ok());
  EXPECT_GT(t.q(1, 1), 0);
  const auto w = verify_left_monotone(t);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->j, 0u);
  EXPECT_EQ(w->j2, 1u);
  EXPECT_EQ(w->lo, 0u);
  EXPECT_EQ(w->mid, 1u);
  EXPECT_EQ(w->hi, 2u);
  // Under a strict Spence-Mirrlees payoff the shuffle loses value.
  EXPECT_LT(plan_value(t, example_grid()), 24);
}

TEST(Verify, SingleRowNeverCrosses) {
  const DiscreteMeasure nu = make_measure({{q("-3"), q("1/4")}, {q("0"), q("1/2")}, {q("3"), q("1/4")}});
  EXPECT_FALSE(verify_left_monotone(build_left_monotone(dirac(0), nu)));
}

TEST(PlanCheck, ReportsEachFailure) {
  TransportPlan p{example_left_plan(), example_mu(), example_nu()};
  p.q(0, 0) -= q("1/10");
  p.q(0, 1) += q("1/10");
  const PlanCheck c = check_plan(p);
  EXPECT_FALSE(c.ok());
  EXPECT_TRUE(c.rows_match_mu);
  EXPECT_FALSE(c.cols_match_nu);
  EXPECT_FALSE(c.martingale);
  EXPECT_TRUE(c.first_failure);

  TransportPlan neg{example_left_plan(), example_mu(), example_nu()};
  neg.q(1, 1) = q("-1/10");
  EXPECT_FALSE(check_plan(neg).nonnegative);
}

TEST(PlanValue, SimpleGrids) {
  const TransportPlan plan{example_left_plan(), example_mu(), example_nu()};
  const PayoffGrid zero = grid_from_function(example_mu().atoms(), example_nu().atoms(),
                                             [](const Rational&, const Rational&) { return Rational(0); });
  EXPECT_EQ(plan_value(plan, zero), 0);
  const PayoffGrid y = grid_from_function(example_mu().atoms(), example_nu().atoms(),
                                          [](const Rational&, const Rational& v) { return v; });
  EXPECT_EQ(plan_value(plan, y), mean(example_nu()));
  const PayoffGrid wrong = grid_from_builtin("x_times_y_squared", {}, example_nu().atoms(), example_mu().atoms());
  EXPECT_THROW(plan_value(plan, wrong), DimensionMismatch);
}

TEST(MonotoneProperty, FeasibleUncrossedAndOptimal) {
  Rng rng(42);
  for (int trial = 0; trial < 120; ++trial) {
    const Instance inst = split_instance(rng, 8, 10);
    const MonotoneResult left = build_left_monotone_traced(inst.mu, inst.nu);
    const TransportPlan right = build_right_monotone(inst.mu, inst.nu);
    ASSERT_TRUE(is_martingale_plan(left.plan.q, inst.mu, inst.nu));
    ASSERT_TRUE(is_martingale_plan(right.q, inst.mu, inst.nu));
    EXPECT_FALSE(has_left_crossing(left.plan.q));
    EXPECT_FALSE(verify_left_monotone(left.plan));
    EXPECT_FALSE(verify_right_monotone(right));
    EXPECT_LE(left.steps.size(), inst.mu.size() + inst.nu.size() - 1);

    const PayoffGrid g = builtin(inst, "x_times_y_squared");
    const Rational max = solve_lp(build_primal(inst.mu, inst.nu, g, Sense::Max)).objective_value;
    const Rational min = solve_lp(build_primal(inst.mu, inst.nu, g, Sense::Min)).objective_value;
    EXPECT_EQ(plan_value(left.plan, g), max);
    EXPECT_EQ(plan_value(right, g), min);
    // Negated payoff: roles swap.
    EXPECT_EQ(plan_value(right, g.negated()), -min);
    EXPECT_EQ(plan_value(left.plan, g.negated()), -max);

    // Every x reaches both sides of itself, or sits on its own atom.
    for (std::size_t j = 0; j < inst.mu.size(); ++j) {
      bool below = false, above = false, on = false;
      for (std::size_t i = 0; i < inst.nu.size(); ++i) {
        if (sgn(left.plan.q(j, i)) == 0) continue;
        if (inst.nu.atom(i) < inst.mu.atom(j)) below = true;
        if (inst.nu.atom(i) > inst.mu.atom(j)) above = true;
        if (inst.nu.atom(i) == inst.mu.atom(j)) on = true;
      }
      EXPECT_TRUE((below && above) || on);
    }
  }
}

TEST(MonotoneProperty, UniqueAmongVerticesOnSmallInstances) {
  Rng rng(43);
  int checked = 0;
  while (checked < 60) {
    const Instance inst = split_instance(rng, 3, 5);
    if (inst.mu.size() + inst.nu.size() > 7) continue;
    const TransportPlan plan = build_left_monotone(inst.mu, inst.nu);
    int count = 0;
    for (const auto& v : polytope_vertices(inst.mu, inst.nu)) {
      if (has_left_crossing(v)) continue;
      ++count;
      EXPECT_EQ(v, plan.q);
    }
    EXPECT_EQ(count, 1);
    ++checked;
  }
}
