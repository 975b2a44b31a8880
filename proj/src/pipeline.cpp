#include "islanding/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <stdexcept>

namespace islanding {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

void validate(const IslandingConfig& cfg) {
  if (cfg.K < 1) throw std::invalid_argument("island count must be positive");
  if (cfg.max_volume_frac <= 0)
    throw std::invalid_argument("maximum volume fraction must be positive");
  if (cfg.alpha_C < 0 || cfg.alpha_D < 0 || cfg.alpha_ECI < 0)
    throw std::invalid_argument("metric weights must be nonnegative");
  if (cfg.r1 < 1 || cfg.r2 < 1 || cfg.r3 < 1 || cfg.r4 < 1)
    throw std::invalid_argument("granularity factors must be at least 1");
  if (cfg.k_max < 2)
    throw std::invalid_argument("exact-solver size cap must be at least 2");
  if (cfg.alpha_ECI > 0 && !cfg.delta)
    throw CaseError("electrical-distance weight set without a distance matrix");
}

StrategyDiagnostics run_one(StrategyId id, const PowerGrid& grid,
                            const DerivedMatrices& m, const MetricConfig& mc,
                            const IslandingConfig& cfg, double W) {
  StrategyDiagnostics d;
  d.id = id;
  auto t0 = Clock::now();
  try {
    StrategyConfig sc;
    sc.K = cfg.K;
    sc.r1 = cfg.r1;
    sc.r2 = cfg.r2;
    sc.r3 = cfg.r3;
    sc.r4 = cfg.r4;
    sc.W = W;
    sc.alpha_C = cfg.alpha_C;
    sc.alpha_D = cfg.alpha_D;
    sc.alpha_ECI = cfg.alpha_ECI;
    sc.eigen = cfg.eigen;
    StrategyResult sr = run_strategy(id, grid, m, sc);
    d.step1 = connected_components_refine(sr.partition, m.topology);
    if (sr.flagged)
      d.note += "granulation fell back to its finest level unbalanced; ";
    d.ms_step1 = ms_since(t0);

    auto t1 = Clock::now();
    AggregatedGrid agg = aggregate_grid(grid, m, d.step1, mc);
    if (agg.n() > cfg.k_max) {
      GreedyResult pre = greedy_partition(agg, cfg.k_max, W);
      if (!pre.feasible)
        d.note += "pre-coarsening stalled at " +
                  std::to_string(pre.partition.island_count()) + " islands; ";
      Partition lifted = lift_partition(pre.partition, agg.members);
      agg = aggregate_grid(grid, m, lifted, mc);
    }
    GreedyResult warm = greedy_partition(agg, cfg.K, W);
    std::optional<Partition> seed;
    if (warm.feasible) seed = warm.partition;
    SolverLimits limits;
    limits.time_limit_s = cfg.time_limit_s;
    limits.node_budget = cfg.node_budget;
    MiqpSolution sol =
        exact_solve_regressed(agg, cfg.K, W, cfg.regression, seed, limits);
    d.final_partition = lift_partition(sol.partition, agg.members);
    d.final_partition.origin = strategy_name(id);
    d.metrics = metric_report(grid, m, d.final_partition, mc);
    d.cost = d.metrics.cost_F;
    d.islands = d.final_partition.island_count();
    d.balanced = volume_balanced(d.final_partition, m.volumes, W);
    d.optimal = sol.optimal;
    d.gap = sol.bound_gap;
    d.feasible = true;
    d.ms_step2 = ms_since(t1);
  } catch (const InfeasibleError& e) {
    d.feasible = false;
    d.note += e.what();
    d.ms_step2 = 0.0;
  }
  return d;
}

} // namespace

MetricConfig metric_config(const IslandingConfig& cfg) {
  MetricConfig mc;
  mc.alpha_C = cfg.alpha_C;
  mc.alpha_D = cfg.alpha_D;
  mc.alpha_ECI = cfg.alpha_ECI;
  mc.regression = cfg.regression;
  return mc;
}

PipelineResult isc_pipeline(const PowerGrid& grid,
                            const IslandingConfig& cfg) {
  validate(cfg);
  DerivedMatrices m = build_derived(grid, cfg.volume_mode, cfg.delta);
  MetricConfig mc = metric_config(cfg);

  PipelineResult out;
  out.total_volume = m.volumes.sum();
  out.W = cfg.max_volume_frac * out.total_volume;

  if (cfg.K == 1) {
    out.best = Partition::single(grid.n());
    out.metrics = metric_report(grid, m, out.best, mc);
    return out;
  }

  std::vector<StrategyId> ids = cfg.strategies;
  if (ids.empty())
    for (int i = 1; i <= 7; ++i) ids.push_back(static_cast<StrategyId>(i));

  out.diagnostics.resize(ids.size());
  if (cfg.jobs <= 1) {
    for (size_t i = 0; i < ids.size(); ++i)
      out.diagnostics[i] = run_one(ids[i], grid, m, mc, cfg, out.W);
  } else {
    // Strategies are independent; run them in fixed-size waves so at most
    // `jobs` execute at once. Results land in strategy order regardless.
    for (size_t base = 0; base < ids.size();
         base += static_cast<size_t>(cfg.jobs)) {
      size_t end = std::min(ids.size(), base + static_cast<size_t>(cfg.jobs));
      std::vector<std::future<StrategyDiagnostics>> wave;
      for (size_t i = base; i < end; ++i)
        wave.push_back(std::async(std::launch::async, run_one, ids[i],
                                  std::cref(grid), std::cref(m), std::cref(mc),
                                  std::cref(cfg), out.W));
      for (size_t i = base; i < end; ++i)
        out.diagnostics[i] = wave[i - base].get();
    }
  }

  const StrategyDiagnostics* winner = nullptr;
  for (const auto& d : out.diagnostics) {
    if (!d.feasible) continue;
    if (!winner || d.cost < winner->cost - 1e-9 ||
        (d.cost <= winner->cost + 1e-9 &&
         d.final_partition < winner->final_partition))
      winner = &d;
  }
  if (!winner) {
    std::string detail = "no strategy produced a feasible scheme:";
    for (const auto& d : out.diagnostics)
      detail += std::string(" [") + strategy_name(d.id) + "] " +
                (d.note.empty() ? "failed" : d.note) + ";";
    throw InfeasibleError(detail);
  }
  out.best = winner->final_partition;
  out.winner = winner->id;
  out.metrics = winner->metrics;
  return out;
}

ScoredPartition score_partition(const PowerGrid& grid,
                                const IslandingConfig& cfg,
                                const Partition& p) {
  validate(cfg);
  DerivedMatrices m = build_derived(grid, cfg.volume_mode, cfg.delta);
  ScoredPartition scored;
  scored.metrics = metric_report(grid, m, p, metric_config(cfg));
  double total = m.volumes.sum();
  scored.W = cfg.max_volume_frac * total;
  scored.balanced = volume_balanced(p, m.volumes, scored.W);
  return scored;
}

} // namespace islanding
