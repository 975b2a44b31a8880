#pragma once

#include <string>
#include <vector>

#include "islanding/matrices.hpp"
#include "islanding/partition.hpp"
#include "islanding/spectral.hpp"

namespace islanding {

// The seven granulation strategies of the first pipeline step.
enum class StrategyId { I = 1, II, III, IV, V, VI, VII };

const char* strategy_name(StrategyId id);
StrategyId strategy_from_name(const std::string& name);

struct StrategyConfig {
  int K = 4;                               // requested island count
  double r1 = 4.0, r2 = 4.0, r3 = 4.0, r4 = 4.0; // granularity factors >= 1
  double W = 0.0;                          // maximum island volume, MW scale
  // Weights of the combined edge-weight matrix alpha_C * Phi + alpha_D * |P|
  // + alpha_ECI * Delta that strategies I, III, and VI cluster.
  double alpha_C = 1.0;
  double alpha_D = 1.0;
  double alpha_ECI = 0.0;
  EigenOptions eigen;
};

struct StrategyResult {
  Partition partition;
  bool balanced = false; // every island volume <= W
  bool flagged = false;  // fallback used: no scanned level was balanced, or
                         // the bisection ran out of splittable islands
};

// ceil(r * K), guarded against floating-point-representation overshoot.
int granularity_count(double r, int K);

bool volume_balanced(const Partition& p, const Eigen::VectorXd& w, double W);

// Strategies I and II: hierarchical clustering of the edge-weight matrix at
// the fixed granularity ceil(r * K). Counts beyond the (folded) vertex count
// clamp to it.
Partition strategy_fixed(const Eigen::MatrixXd& matrix,
                         const Eigen::VectorXd& w, const StrategyConfig& cfg,
                         double r, const Eigen::MatrixXd* topology = nullptr);

// Strategies III and IV: smallest k in [K, ceil(r * K)] whose k-way
// clustering keeps every island volume within W; falls back to the top
// level, flagged, when no level qualifies.
StrategyResult strategy_min_granularity(const Eigen::MatrixXd& matrix,
                                        const Eigen::VectorXd& w,
                                        const StrategyConfig& cfg, double r,
                                        const Eigen::MatrixXd* topology =
                                            nullptr);

// Coherent generator grouping: hierarchical clustering of the dynamic
// coupling matrix (its own row sums as volumes, no pendant folding) into k
// groups, k clamped to the generator count.
std::vector<std::vector<int>> generator_groups(const Eigen::MatrixXd& Phi_gen,
                                               int k,
                                               const EigenOptions& opts = {});

// Strategy V: smallest k in [K, ceil(r3 * K)] whose constrained clustering
// around k coherent generator groups is volume-balanced.
StrategyResult strategy_csc_refined(const PowerGrid& grid,
                                    const DerivedMatrices& m,
                                    const StrategyConfig& cfg);

// Strategy VI: K-way clustering of the flow matrix, then ceil(r4 * K) - K
// largest-island bisections with the combined edge weights.
StrategyResult strategy_sequential(const PowerGrid& grid,
                                   const DerivedMatrices& m,
                                   const StrategyConfig& cfg);

// Strategy VII: meet of the constrained K-partition (groups from the
// coupling matrix) and the hierarchical K-partition of the flow matrix.
Partition strategy_meet(const PowerGrid& grid, const DerivedMatrices& m,
                        const StrategyConfig& cfg);

// Dispatch by id; tags the partition origin and fills the balance flag.
StrategyResult run_strategy(StrategyId id, const PowerGrid& grid,
                            const DerivedMatrices& m,
                            const StrategyConfig& cfg);

} // namespace islanding
