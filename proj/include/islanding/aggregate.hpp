#pragma once

#include <vector>

#include <Eigen/Dense>

#include "islanding/cuts.hpp"
#include "islanding/matrices.hpp"
#include "islanding/partition.hpp"
#include "islanding/shed.hpp"

namespace islanding {

// Super-node grid obtained by contracting every island of a partition; all
// nodal and pairwise quantities are exact sums over member buses.
struct AggregatedGrid {
  Eigen::VectorXd gen_cap;     // G' per node, MW
  Eigen::VectorXd gen_out;     // g' per node, MW
  Eigen::VectorXd demand;      // D' per node, MW
  Eigen::VectorXd served;      // d' per node, MW
  Eigen::VectorXd injection;   // d' - g' per node, MW
  Eigen::VectorXd volume;      // w' per node
  Eigen::MatrixXd flow_signed; // net MW flowing row -> column
  Eigen::MatrixXd flow_abs;    // summed absolute line flows per pair
  Eigen::MatrixXd limit;       // summed line limits per pair (edges: > 0)
  Eigen::MatrixXd coupling;    // summed dynamic coupling per pair
  Eigen::MatrixXd combined;    // contraction of the weighted metric matrix
  std::vector<std::vector<int>> members; // node -> original bus ids

  int n() const { return static_cast<int>(volume.size()); }
};

// Contracts each island of `p` into one super-node. Every island must be
// connected in the line topology (refine with connected_components_refine
// first); a disconnected island throws std::invalid_argument.
AggregatedGrid aggregate_grid(const PowerGrid& grid, const DerivedMatrices& m,
                              const Partition& p,
                              const MetricConfig& cfg = {});

// Shed estimation input over the aggregated nodes.
ShedProblem shed_problem_from(const AggregatedGrid& agg);

// Replaces every aggregated node id in `agg_partition` by its member buses.
Partition lift_partition(const Partition& agg_partition,
                         const std::vector<std::vector<int>>& members);

} // namespace islanding
