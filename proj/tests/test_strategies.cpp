#include <doctest.h>

#include <stdexcept>

#include "islanding/cuts.hpp"
#include "islanding/grid.hpp"
#include "islanding/matrices.hpp"
#include "islanding/strategies.hpp"

#include "helpers.hpp"

using namespace islanding;
using testutil::case9;

namespace {

// Shared nine-bus reference partitions (internal indices, generators first).
Partition three_way() {
  return Partition::of({{0, 3, 4}, {1, 6, 7}, {2, 5, 8}});
}
Partition flow_bipartition() {
  return Partition::of({{0, 1, 3, 4, 6, 7}, {2, 5, 8}});
}
Partition combined_bipartition() {
  return Partition::of({{0, 2, 3, 5, 8}, {1, 4, 6, 7}});
}
Partition constrained_bipartition() {
  return Partition::of({{0, 3}, {1, 2, 4, 5, 6, 7, 8}});
}

StrategyConfig nine_bus_config() {
  StrategyConfig cfg;
  cfg.K = 2;
  cfg.r1 = cfg.r2 = cfg.r3 = cfg.r4 = 1.5;
  cfg.W = 0.8 * 634.38;
  return cfg;
}

} // namespace

TEST_CASE("strategy names round-trip") {
  for (int i = 1; i <= 7; ++i) {
    StrategyId id = static_cast<StrategyId>(i);
    CHECK(strategy_from_name(strategy_name(id)) == id);
  }
  CHECK(strategy_name(StrategyId::V) == std::string("V"));
  CHECK_THROWS_AS(strategy_from_name("VIII"), std::invalid_argument);
  CHECK_THROWS_AS(strategy_from_name("i"), std::invalid_argument);
}

TEST_CASE("granularity_count rounds up without float drift") {
  CHECK(granularity_count(1.0, 4) == 4);
  CHECK(granularity_count(1.5, 2) == 3);
  CHECK(granularity_count(4.0, 4) == 16);
  CHECK(granularity_count(1.2, 5) == 6);
  // 1.1 * 10 lands a hair above 11.0 in binary; it must not round to 12.
  CHECK(granularity_count(1.1, 10) == 11);
  CHECK(granularity_count(1.25, 4) == 5);
}

TEST_CASE("volume_balanced compares island volumes against the cap") {
  Eigen::VectorXd w(4);
  w << 1, 2, 3, 4;
  Partition p = Partition::of({{0, 3}, {1, 2}});
  CHECK(volume_balanced(p, w, 5.0));  // both islands weigh exactly 5
  CHECK(volume_balanced(p, w, 10.0));
  CHECK_FALSE(volume_balanced(p, w, 4.9));
  CHECK_FALSE(volume_balanced(p, w, 0.0));
}

TEST_CASE("fixed-count clustering on both nine-bus weight matrices") {
  const PowerGrid& g = case9();
  DerivedMatrices m = build_derived(g);
  StrategyConfig cfg = nine_bus_config();
  Eigen::MatrixXd A = combined_matrix(m.Phi_full, m.P_abs, nullptr,
                                      cfg.alpha_C, cfg.alpha_D, cfg.alpha_ECI);

  // ceil(1.5 * 2) = 3 clusters; both matrices agree on the three-way split.
  CHECK(strategy_fixed(A, m.volumes, cfg, 1.5, &m.topology) == three_way());
  CHECK(strategy_fixed(m.P_abs, m.volumes, cfg, 1.5, &m.topology) ==
        three_way());

  SUBCASE("factor one reduces to plain hierarchical clustering") {
    HscOptions opts;
    opts.topology = &m.topology;
    CHECK(strategy_fixed(m.P_abs, m.volumes, cfg, 1.0, &m.topology) ==
          hsc_partition(m.P_abs, m.volumes, 2, opts));
    CHECK(strategy_fixed(m.P_abs, m.volumes, cfg, 1.0, &m.topology) ==
          flow_bipartition());
  }
  SUBCASE("a count beyond the bus total degenerates to singletons") {
    StrategyConfig wide = cfg;
    wide.K = 4;
    CHECK(strategy_fixed(m.P_abs, m.volumes, wide, 4.0, &m.topology) ==
          Partition::singletons(g.n()));
  }
}

TEST_CASE("minimum-granularity scan stops at the first balanced count") {
  const PowerGrid& g = case9();
  DerivedMatrices m = build_derived(g);
  StrategyConfig cfg = nine_bus_config();

  SUBCASE("an ample cap accepts the coarsest split") {
    StrategyResult r =
        strategy_min_granularity(m.P_abs, m.volumes, cfg, 1.5, &m.topology);
    CHECK(r.partition == flow_bipartition());
    CHECK(r.balanced);
    CHECK_FALSE(r.flagged);
  }
  SUBCASE("a tighter cap forces one extra island") {
    StrategyConfig tight = cfg;
    tight.W = 348.9; // the 448.8 MW island fails, the three-way split passes
    StrategyResult r = strategy_min_granularity(m.P_abs, m.volumes, tight, 1.5,
                                                &m.topology);
    CHECK(r.partition == three_way());
    CHECK(r.balanced);
    CHECK_FALSE(r.flagged);
  }
  SUBCASE("an unreachable cap flags the finest attempt") {
    StrategyConfig hopeless = cfg;
    hopeless.W = 100.0;
    StrategyResult r = strategy_min_granularity(m.P_abs, m.volumes, hopeless,
                                                1.5, &m.topology);
    CHECK(r.partition == three_way()); // finest count tried: ceil(1.5*2) = 3
    CHECK_FALSE(r.balanced);
    CHECK(r.flagged);
  }
}

TEST_CASE("generator grouping clusters the coupling matrix") {
  DerivedMatrices m = build_derived(case9());
  auto groups = generator_groups(m.Phi_gen, 2);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0] == std::vector<int>{0});
  CHECK(groups[1] == std::vector<int>{1, 2});

  SUBCASE("the group count clamps to the generator count") {
    auto fine = generator_groups(m.Phi_gen, 5);
    CHECK(fine.size() == 3);
  }
  SUBCASE("grouping nothing is an error") {
    CHECK_THROWS_AS(generator_groups(Eigen::MatrixXd(0, 0), 2),
                    std::invalid_argument);
  }
}

TEST_CASE("constrained clustering grows islands from generator groups") {
  const PowerGrid& g = case9();
  DerivedMatrices m = build_derived(g);
  StrategyConfig cfg = nine_bus_config();

  StrategyResult r = strategy_csc_refined(g, m, cfg);
  CHECK(r.partition == constrained_bipartition());
  CHECK(r.balanced);
  CHECK_FALSE(r.flagged);

  SUBCASE("the scan cannot exceed the generator count") {
    StrategyConfig fine = cfg;
    fine.W = 50.0; // unreachable: every count in the scan fails
    fine.r3 = 4.0; // requests up to 8 groups, but only 3 generators exist
    StrategyResult flagged = strategy_csc_refined(g, m, fine);
    CHECK(flagged.flagged);
    CHECK_FALSE(flagged.balanced);
    CHECK(flagged.partition.island_count() == 3);
  }
  SUBCASE("a grid without generators is infeasible here") {
    PowerGrid empty = g;
    empty.generators.clear();
    CHECK_THROWS_AS(strategy_csc_refined(empty, m, cfg), InfeasibleError);
  }
}

TEST_CASE("sequential bisection refines the flow clustering") {
  const PowerGrid& g = case9();
  DerivedMatrices m = build_derived(g);
  StrategyConfig cfg = nine_bus_config();

  // One bisection step opens the 448.8 MW island along the combined weights.
  StrategyResult r = strategy_sequential(g, m, cfg);
  CHECK(r.partition == three_way());
  CHECK(r.balanced);
  CHECK_FALSE(r.flagged);

  SUBCASE("factor one keeps the base clustering") {
    StrategyConfig base_only = cfg;
    base_only.r4 = 1.0;
    StrategyResult b = strategy_sequential(g, m, base_only);
    CHECK(b.partition == flow_bipartition());
    CHECK_FALSE(b.flagged);
  }
  SUBCASE("island counts grow by the requested number of steps") {
    for (unsigned seed : {21u, 34u}) {
      PowerGrid rg = testutil::random_grid(
          {.n = 20, .n_g = 4, .extra_edges = 4, .seed = seed});
      DerivedMatrices rm = build_derived(rg);
      StrategyConfig rcfg = nine_bus_config();
      rcfg.W = rm.volumes.sum(); // balance is not the subject here
      StrategyResult sr = strategy_sequential(rg, rm, rcfg);
      if (!sr.flagged)
        CHECK(sr.partition.island_count() == 3); // K + (ceil(1.5*2) - 2)
      CHECK(sr.partition.covers(rg.n()));
    }
  }
}

TEST_CASE("meet strategy intersects the two clusterings") {
  const PowerGrid& g = case9();
  DerivedMatrices m = build_derived(g);
  StrategyConfig cfg = nine_bus_config();

  Partition p = strategy_meet(g, m, cfg);
  CHECK(p == Partition::of({{0, 3}, {1, 4, 6, 7}, {2, 5, 8}}));

  SUBCASE("the meet refines both inputs") {
    auto hier = flow_bipartition().labels(g.n());
    auto cons = constrained_bipartition().labels(g.n());
    for (const auto& island : p.islands)
      for (int v : island) {
        CHECK(hier[v] == hier[island[0]]);
        CHECK(cons[v] == cons[island[0]]);
      }
  }
  SUBCASE("no generators is infeasible") {
    PowerGrid empty = g;
    empty.generators.clear();
    CHECK_THROWS_AS(strategy_meet(empty, m, cfg), InfeasibleError);
  }
}

TEST_CASE("run_strategy dispatches, tags, and flags") {
  const PowerGrid& g = case9();
  DerivedMatrices m = build_derived(g);
  StrategyConfig cfg = nine_bus_config();

  SUBCASE("nine-bus step-one partitions for all seven strategies") {
    CHECK(run_strategy(StrategyId::I, g, m, cfg).partition == three_way());
    CHECK(run_strategy(StrategyId::II, g, m, cfg).partition == three_way());
    CHECK(run_strategy(StrategyId::III, g, m, cfg).partition ==
          combined_bipartition());
    CHECK(run_strategy(StrategyId::IV, g, m, cfg).partition ==
          flow_bipartition());
    CHECK(run_strategy(StrategyId::V, g, m, cfg).partition ==
          constrained_bipartition());
    CHECK(run_strategy(StrategyId::VI, g, m, cfg).partition == three_way());
    CHECK(run_strategy(StrategyId::VII, g, m, cfg).partition ==
          Partition::of({{0, 3}, {1, 4, 6, 7}, {2, 5, 8}}));
  }
  SUBCASE("origin tags name the producing strategy") {
    for (int i = 1; i <= 7; ++i) {
      StrategyId id = static_cast<StrategyId>(i);
      CHECK(run_strategy(id, g, m, cfg).partition.origin == strategy_name(id));
    }
  }
  SUBCASE("balanced flag is recomputed against the configured cap") {
    StrategyConfig tight = cfg;
    tight.W = 200.0; // the 251.31 MW island busts the cap
    StrategyResult r = run_strategy(StrategyId::I, g, m, tight);
    CHECK(r.partition == three_way());
    CHECK_FALSE(r.balanced);
  }
  SUBCASE("zero coupling weight collapses the combined matrix onto flows") {
    StrategyConfig flows_only = cfg;
    flows_only.alpha_C = 0.0;
    StrategyConfig coarse = flows_only;
    coarse.r1 = coarse.r2 = 1.0;
    CHECK(run_strategy(StrategyId::I, g, m, coarse).partition ==
          run_strategy(StrategyId::II, g, m, coarse).partition);
    CHECK(run_strategy(StrategyId::III, g, m, flows_only).partition ==
          run_strategy(StrategyId::IV, g, m, flows_only).partition);
  }
  SUBCASE("configuration validation") {
    StrategyConfig bad = cfg;
    bad.K = 1;
    CHECK_THROWS_AS(run_strategy(StrategyId::I, g, m, bad),
                    std::invalid_argument);
    bad = cfg;
    bad.r1 = 0.5;
    CHECK_THROWS_AS(run_strategy(StrategyId::I, g, m, bad),
                    std::invalid_argument);
  }
  SUBCASE("a distance term without a distance matrix is a case error") {
    StrategyConfig eci = cfg;
    eci.alpha_ECI = 1.0;
    CHECK_THROWS_AS(run_strategy(StrategyId::I, g, m, eci), CaseError);
  }
}

TEST_CASE("every strategy yields a deterministic cover on random grids") {
  for (unsigned seed : {12u, 44u}) {
    PowerGrid g = testutil::random_grid(
        {.n = 16, .n_g = 4, .extra_edges = 3, .seed = seed});
    DerivedMatrices m = build_derived(g);
    StrategyConfig cfg;
    cfg.K = 3;
    cfg.r1 = cfg.r2 = cfg.r3 = cfg.r4 = 1.4;
    cfg.W = 0.6 * m.volumes.sum();
    for (int i = 1; i <= 7; ++i) {
      StrategyId id = static_cast<StrategyId>(i);
      StrategyResult first = run_strategy(id, g, m, cfg);
      StrategyResult second = run_strategy(id, g, m, cfg);
      CHECK(first.partition == second.partition);
      CHECK(first.balanced == second.balanced);
      CHECK(first.partition.covers(g.n()));
      CHECK(first.partition.island_count() >= 2);
      CHECK(first.balanced ==
            volume_balanced(first.partition, m.volumes, cfg.W));
    }
  }
}
