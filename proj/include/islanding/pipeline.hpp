#pragma once

#include <optional>
#include <string>
#include <vector>

#include "islanding/solver.hpp"
#include "islanding/strategies.hpp"

namespace islanding {

struct IslandingConfig {
  int K = 4;                      // requested island count
  double max_volume_frac = 0.375; // W = frac * total volume
  double alpha_C = 1.0;
  double alpha_D = 1.0;
  double alpha_ECI = 0.0;
  double r1 = 4.0, r2 = 4.0, r3 = 4.0, r4 = 4.0;
  std::vector<StrategyId> strategies; // empty enables all seven
  int k_max = 20;                 // exact-solver size cap; larger aggregated
                                  // instances are greedily pre-coarsened
  double time_limit_s = 10.0;     // per-strategy exact-solve budget
  long long node_budget = -1;
  RegressionParams regression;
  VolumeMode volume_mode = VolumeMode::AbsFlow;
  std::optional<Eigen::MatrixXd> delta; // electrical distances for the ECI term
  int jobs = 1;                   // concurrent strategy workers
  EigenOptions eigen;
};

struct StrategyDiagnostics {
  StrategyId id = StrategyId::I;
  Partition step1;           // granulation output, component-refined
  Partition final_partition; // lifted K-partition of the original grid
  MetricReport metrics;
  int islands = 0;
  double cost = 0.0;
  bool balanced = false;
  bool feasible = true; // false when step 2 found no volume-feasible scheme
  bool optimal = true;  // exact solve finished within its budgets
  double gap = 0.0;     // relative bound gap when not optimal
  double ms_step1 = 0.0;
  double ms_step2 = 0.0;
  std::string note;
};

struct PipelineResult {
  Partition best;
  std::optional<StrategyId> winner; // absent for the K = 1 shortcut
  MetricReport metrics;
  double W = 0.0;
  double total_volume = 0.0;
  std::vector<StrategyDiagnostics> diagnostics;
};

MetricConfig metric_config(const IslandingConfig& cfg);

// Two-step islanding: per enabled strategy, granulate (step 1), refine to
// connected components, aggregate, greedily coarsen oversized instances,
// warm-start and exactly solve the aggregated problem (step 2), lift back,
// and score on the original grid; the cheapest scheme wins (ties resolved by
// partition order, then strategy order). Throws InfeasibleError listing
// per-strategy diagnoses when every strategy fails.
PipelineResult isc_pipeline(const PowerGrid& grid, const IslandingConfig& cfg);

struct ScoredPartition {
  MetricReport metrics;
  bool balanced = false;
  double W = 0.0;
};

// Scores a user-supplied partition with the configured metric weights.
ScoredPartition score_partition(const PowerGrid& grid,
                                const IslandingConfig& cfg, const Partition& p);

} // namespace islanding
