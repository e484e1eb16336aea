#include <gtest/gtest.h>

#include "agraph/report.hpp"
#include "agraph/scenario.hpp"
#include "agraph/search.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace agraph;
using agraph::testing::all_bounded_deployments;
using agraph::testing::OracleScorer;
using agraph::testing::tv_instance;
using agraph::testing::two_type_instance;

namespace {

HeuristicTable table(std::vector<TableEntry> e) { return HeuristicTable{std::move(e)}; }

SearchOptions options(ProblemKind p, bool heuristic = true) {
  SearchOptions o;
  o.problem = p;
  o.use_heuristic = heuristic;
  o.seed = 17;
  return o;
}

// Small inventories keep exhaustive checks quick.
GeneratorConfig small_config(std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.host_count = 12;
  cfg.host_in_range = 0.5;
  cfg.inventory = {{"a", 3, 2, 3}, {"b", 2, 1, 2}};
  return cfg;
}

}  // namespace

TEST(SearchSpaceSize, ClosedForm) {
  EXPECT_EQ(search_space_size(tv_instance().layout.constraints), 36u);
  EXPECT_EQ(search_space_size(generate(GeneratorConfig{}).layout.constraints), 2304u);
  EXPECT_EQ(search_space_size({}), 1u);
  EXPECT_EQ(search_space_size(two_type_instance().layout.constraints), 4u);
}

TEST(SearchSpaceSize, InfeasibleConstraint) {
  auto c = tv_instance().layout.constraints;
  c[0].required_count = 5;
  EXPECT_THROW(search_space_size(c), InfeasibleError);
}

TEST(SearchSpaceSize, MatchesExhaustiveTraversal) {
  EXPECT_EQ(count_full_leaves(tv_instance().layout), 36u);
  EXPECT_EQ(count_full_leaves(two_type_instance().layout), 4u);
  for (std::uint64_t seed : {1u, 2u}) {
    const Instance inst = generate(small_config(seed));
    EXPECT_EQ(count_full_leaves(inst.layout), search_space_size(inst.layout.constraints));
  }
  EXPECT_EQ(count_full_leaves(generate(GeneratorConfig{}).layout), 2304u);
}

TEST(HeuristicTable, OneEntryPerCompatiblePair) {
  const Instance inst = two_type_instance();
  const RiskEvaluator eval(inst);
  const HeuristicTable t = build_heuristic_table(eval);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t.entries[0], (TableEntry{"cam-1", "loc-a", "cam", 1.0}));
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_EQ(t.entries[i].value, 0.0);
  EXPECT_EQ(build_heuristic_table(eval), t);
}

TEST(HeuristicTable, SingleDeviceTwoLocations) {
  Instance inst = tv_instance();
  inst.layout.devices.resize(1);
  inst.layout.constraints[0].devices = {"tv-1"};
  inst.layout.constraints[0].required_count = 1;
  inst.layout.locations.resize(2);
  inst.layout.constraints[0].locations = {"tv-loc-1", "tv-loc-2"};
  validate(inst);
  EXPECT_EQ(build_heuristic_table(RiskEvaluator(inst)).size(), 2u);
}

TEST(Heuristics, FdmrMinimum) {
  EXPECT_DOUBLE_EQ(h_fdmr(table({{"d1", "l1", "t", 0.1}, {"d2", "l1", "t", 0.3}})), 0.1);
  EXPECT_EQ(h_fdmr(table({})), 0.0);
  EXPECT_EQ(h_fdmr(table({{"d1", "l1", "t", 0.0}, {"d1", "l2", "t", 0.5}})), 0.0);
}

TEST(Heuristics, FdmrStrongSumsPerSlot) {
  const HeuristicTable t = table({{"a1", "la", "a", 0.2}, {"a2", "la", "a", 0.1}, {"a2", "lb", "a", 0.4},
                                  {"b1", "lc", "b", 0.3}});
  EXPECT_DOUBLE_EQ(h_fdmr_strong(t, {{"a", 2}, {"b", 1}}), 0.1 + 0.2 + 0.3);
  EXPECT_DOUBLE_EQ(h_fdmr_strong(t, {{"a", 1}}), 0.1);
}

TEST(Heuristics, MurdCountsZeroRiskDevices) {
  EXPECT_EQ(h_murd(table({{"d1", "l1", "t", 0.0}, {"d1", "l2", "t", 0.0}, {"d2", "l1", "t", 0.2}})), 1u);
  EXPECT_EQ(h_murd(table({{"d1", "l1", "t", 0.0}, {"d2", "l1", "t", 0.0}, {"d3", "l1", "t", 0.0}})), 3u);
  EXPECT_EQ(h_murd(table({})), 0u);
  EXPECT_EQ(h_murd(table({{"d1", "l1", "t", 5e-10}})), 1u);
  EXPECT_EQ(h_murd(table({{"d2", "l1", "t", 0.2}}), 0.25), 1u);
}

TEST(OrderBranch, MinimumThenLexicographic) {
  const HeuristicTable two = table({{"d1", "l1", "t", 0.3}, {"d2", "l1", "t", 0.1}});
  const auto& a = order_branch(two, ProblemKind::Fdmr);
  EXPECT_EQ(a.device, "d2");
  const HeuristicTable tie = table({{"d1", "l2", "t", 0.1}, {"d1", "l1", "t", 0.1}});
  const auto& b = order_branch(tie, ProblemKind::Murd);
  EXPECT_EQ(std::make_pair(b.device, b.location), std::make_pair(std::string("d1"), std::string("l1")));
  const HeuristicTable one = table({{"x", "y", "t", 2.0}});
  const auto& c = order_branch(one, ProblemKind::Fdmr);
  EXPECT_EQ(c.device, "x");
  EXPECT_THROW(order_branch(table({}), ProblemKind::Fdmr), InputError);
}

TEST(Dfbnb, FixtureOptima) {
  const Instance inst = two_type_instance();
  const RiskEvaluator eval(inst);
  for (bool h : {true, false}) {
    const SearchResult f = dfbnb(eval, options(ProblemKind::Fdmr, h));
    EXPECT_EQ(f.objective, 0.0);
    EXPECT_TRUE(is_full(f.best, inst.layout));
    EXPECT_NE(f.best.location_of("cam-1"), std::optional<std::string>("loc-a"));

    const SearchResult m = dfbnb(eval, options(ProblemKind::Murd, h));
    EXPECT_EQ(m.objective, 2.0);
    EXPECT_TRUE(within_constraints(m.best, inst.layout));
  }
}

TEST(Dfbnb, AllZeroRiskMurdDeploysEverything) {
  const Instance inst = tv_instance();
  const SearchResult m = dfbnb(RiskEvaluator(inst), options(ProblemKind::Murd));
  EXPECT_EQ(m.best.deployed_count(), inst.layout.total_required());
}

TEST(Dfbnb, InfeasibleConstraints) {
  Instance inst = tv_instance();
  inst.layout.constraints[0].required_count = 4;
  const RiskEvaluator eval(inst);
  EXPECT_THROW(dfbnb(eval, options(ProblemKind::Fdmr)), InfeasibleError);
  EXPECT_THROW(dfbnb(eval, options(ProblemKind::Murd)), InfeasibleError);
}

TEST(Dfbnb, RiskBoundRelaxesMurd) {
  const Instance inst = two_type_instance();
  const RiskEvaluator eval(inst);
  SearchOptions o = options(ProblemKind::Murd);
  o.risk_bound = 1.0;
  const SearchResult r = dfbnb(eval, o);
  EXPECT_EQ(r.objective, 2.0);
  EXPECT_LE(r.evaluation.risk.value, 1.0 + 1e-9);
}

TEST(Dfbnb, MatchesExhaustiveOracleOnSmallScenarios) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Instance inst = generate(small_config(seed));
    const RiskEvaluator eval(inst);
    OracleScorer oracle(eval);
    const auto bounded = all_bounded_deployments(inst.layout);
    const double best_risk = oracle.fdmr(bounded);
    const std::size_t best_count = oracle.murd(bounded);

    for (bool h : {true, false}) {
      const SearchResult f = dfbnb(eval, options(ProblemKind::Fdmr, h));
      EXPECT_NEAR(f.objective, best_risk, 1e-9) << "seed " << seed << " heuristic " << h;
      EXPECT_TRUE(is_full(f.best, inst.layout));
      EXPECT_NEAR(eval.risk(f.best).value, f.objective, 1e-9);

      const SearchResult m = dfbnb(eval, options(ProblemKind::Murd, h));
      EXPECT_EQ(m.objective, static_cast<double>(best_count)) << "seed " << seed << " heuristic " << h;
      EXPECT_LE(std::abs(eval.risk(m.best).value), 1e-9);
    }
    SearchOptions strong = options(ProblemKind::Fdmr);
    strong.strong_heuristic = true;
    EXPECT_NEAR(dfbnb(eval, strong).objective, best_risk, 1e-9);
    SearchOptions exhaustive = options(ProblemKind::Fdmr);
    exhaustive.monotone_prune = false;
    EXPECT_NEAR(dfbnb(eval, exhaustive).objective, best_risk, 1e-9);
  }
}

TEST(Dfbnb, BoundedMurdMatchesOracle) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Instance inst = generate(small_config(seed));
    const RiskEvaluator eval(inst);
    OracleScorer oracle(eval);
    const auto bounded = all_bounded_deployments(inst.layout);
    for (double bound : {0.1, 0.5, 1.0}) {
      SearchOptions o = options(ProblemKind::Murd);
      o.risk_bound = bound;
      EXPECT_EQ(dfbnb(eval, o).objective, static_cast<double>(oracle.murd(bounded, bound)))
          << "seed " << seed << " bound " << bound;
    }
  }
}

TEST(Dfbnb, HeuristicNeverExpandsMoreUnderIdenticalOrdering) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Instance inst = generate(small_config(seed));
    const RiskEvaluator eval(inst);
    for (ProblemKind p : {ProblemKind::Fdmr, ProblemKind::Murd}) {
      SearchOptions on = options(p, true), off = options(p, false);
      on.ordering = off.ordering = Ordering::Table;
      const SearchResult a = dfbnb(eval, on);
      const SearchResult b = dfbnb(eval, off);
      EXPECT_EQ(a.objective, b.objective);
      EXPECT_LE(a.expanded, b.expanded) << "seed " << seed << " problem " << to_string(p);
    }
  }
}

TEST(Dfbnb, NegativeRiskNeedsExhaustiveMode) {
  // Four-hop wired path; cam-1 at loc-a shortens it, so R < 0 there.
  Instance inst = two_type_instance();
  inst.network.hosts.insert(inst.network.hosts.begin() + 3, Host{"h3", {}, {{"v-h3", "tcp"}}, false, false});
  inst.network.base_connectivity = {{"internet", "h1", "tcp"}, {"h1", "h2", "tcp"}, {"h2", "h3", "tcp"},
                                    {"h3", "goal", "tcp"}};
  const RiskEvaluator eval(inst);
  OracleScorer oracle(eval);
  const auto bounded = all_bounded_deployments(inst.layout);
  SearchOptions o = options(ProblemKind::Fdmr);
  o.monotone_prune = false;
  const SearchResult r = dfbnb(eval, o);
  EXPECT_NEAR(r.objective, oracle.fdmr(bounded), 1e-12);
  EXPECT_LT(r.objective, 0.0);

  SearchOptions m = options(ProblemKind::Murd);
  m.monotone_prune = false;
  EXPECT_EQ(dfbnb(eval, m).objective, static_cast<double>(oracle.murd(bounded)));
}

TEST(Dfbnb, DeterministicGivenSeed) {
  const Instance inst = generate(small_config(3));
  const RiskEvaluator eval(inst);
  for (bool h : {true, false}) {
    const SearchResult a = dfbnb(eval, options(ProblemKind::Fdmr, h));
    const SearchResult b = dfbnb(eval, options(ProblemKind::Fdmr, h));
    EXPECT_EQ(a.best, b.best);
    EXPECT_EQ(a.expanded, b.expanded);
    EXPECT_EQ(a.risk_evaluations, b.risk_evaluations);
  }
}

TEST(Dfbnb, MurdStopsBelowCapacityWhenEveryCameraSlotAddsRisk) {
  // Only cam-1 at loc-a remains, and it adds a second shortest plan.
  Instance inst = two_type_instance();
  auto& layout = inst.layout;
  std::erase_if(layout.devices, [](const IoTDevice& d) { return d.id == "cam-2"; });
  std::erase_if(layout.locations, [](const Location& l) { return l.id == "loc-b"; });
  for (auto& c : layout.constraints)
    if (c.type_id == "cam") c = {"cam", {"loc-a"}, 1, {"cam-1"}};
  validate(inst);
  const RiskEvaluator eval(inst);
  for (bool h : {true, false}) {
    const SearchResult m = dfbnb(eval, options(ProblemKind::Murd, h));
    EXPECT_EQ(m.objective, 1.0);
    EXPECT_EQ(m.best.canonical(), "fridge-1@loc-f");
    const SearchResult f = dfbnb(eval, options(ProblemKind::Fdmr, h));
    EXPECT_EQ(f.objective, 1.0);
  }
}

TEST(Dfbnb, MurdMatchesOracleOnDenseSmallNetworks) {
  std::size_t below_capacity = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GeneratorConfig cfg = small_config(seed);
    cfg.host_count = 5;
    cfg.host_in_range = 0.9;
    const Instance inst = generate(cfg);
    const RiskEvaluator eval(inst);
    OracleScorer oracle(eval);
    const auto bounded = all_bounded_deployments(inst.layout);
    const std::size_t expect = oracle.murd(bounded);
    below_capacity += expect < inst.layout.total_required();
    for (bool h : {true, false})
      EXPECT_EQ(dfbnb(eval, options(ProblemKind::Murd, h)).objective, static_cast<double>(expect)) << seed;
    EXPECT_NEAR(dfbnb(eval, options(ProblemKind::Fdmr, true)).objective, oracle.fdmr(bounded), 1e-9) << seed;
  }
  EXPECT_GE(below_capacity, 2u);
}
