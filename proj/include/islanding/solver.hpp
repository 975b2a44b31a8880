#pragma once

#include <optional>

#include "islanding/aggregate.hpp"

namespace islanding {

struct SolverLimits {
  double time_limit_s = 10.0;    // wall-clock budget; <= 0 means unlimited
  long long node_budget = -1;    // search-tree nodes; negative means unlimited
};

struct GreedyResult {
  Partition partition; // over aggregated node ids
  double cost = 0.0;   // cut + positive-imbalance sum of the result
  bool feasible = true; // false when no admissible merge reached K islands
};

// Coarsens the aggregated graph from singletons to K islands, at each step
// merging the edge-adjacent island pair of least resulting cut-plus-excess
// cost whose merged volume stays within W. Ties pick the first pair in
// canonical island order.
GreedyResult greedy_partition(const AggregatedGrid& agg, int K, double W);

struct MiqpSolution {
  Partition partition;         // canonical, over aggregated node ids
  double objective = 0.0;      // cut_term + shed_term
  double cut_term = 0.0;
  double shed_term = 0.0;
  double bound_gap = 0.0;      // relative optimality gap when budget-limited
  bool optimal = true;
  long long nodes_explored = 0;
  Eigen::VectorXd shed;        // undeliverable demand per node, MW
  Eigen::VectorXd dispatch;    // generation per node in the island optimum
  Eigen::MatrixXd flows;       // net MW row -> column; zero across islands
  Eigen::MatrixXd line_status; // 1 on edges kept inside an island, else 0
};

// Branch-and-bound over island assignments minimizing the cut of the
// aggregated metric matrix plus the per-island max-flow shed, subject to
// island volumes <= W and at most K islands. Equivalent to the mixed-integer
// quadratic formulation because island flows decouple. Throws
// InfeasibleError when no assignment satisfies the volume cap.
MiqpSolution exact_solve(const AggregatedGrid& agg, int K, double W,
                         const std::optional<Partition>& warm_start = {},
                         const SolverLimits& limits = {});

// Same search with the per-island shed replaced by the regression-corrected
// predictor max[shed - a * reserve + b * volume, 0].
MiqpSolution exact_solve_regressed(const AggregatedGrid& agg, int K, double W,
                                   const RegressionParams& params,
                                   const std::optional<Partition>& warm_start =
                                       {},
                                   const SolverLimits& limits = {});

} // namespace islanding
