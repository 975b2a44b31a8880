#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "islanding/grid.hpp"

namespace islanding {

enum class VolumeMode { AbsFlow, Capacity };

// Result of iteratively folding degree-1 vertices into their neighbors.
struct MergeMap {
  std::vector<int> node_of;               // original vertex -> super-node
  std::vector<std::vector<int>> members;  // super-node -> original vertices
  bool degenerate = false;                // collapsed to a single vertex
  int size() const { return static_cast<int>(members.size()); }
};

// Everything derived from a grid snapshot that the partitioning stages need.
struct DerivedMatrices {
  Eigen::MatrixXd B;          // n x n nodal susceptance
  Eigen::MatrixXd B_reduced;  // n_g x n_g Kron-reduced susceptance
  Eigen::MatrixXd Phi_gen;    // n_g x n_g generator dynamic coupling
  Eigen::MatrixXd Phi_full;   // n x n zero-padded coupling
  Eigen::MatrixXd P_signed;   // lower-triangular signed flows (row > col)
  Eigen::MatrixXd P_abs;      // symmetric absolute flows
  Eigen::MatrixXd topology;   // line incidence weights (1 per line), symmetric
  Eigen::VectorXd volumes;    // bus volumes w
  Eigen::VectorXd injections; // d_i - g_i per bus
  std::optional<Eigen::MatrixXd> Delta; // electrical distance, user supplied
};

// Nodal susceptance matrix built from line reactances: off-diagonal +1/x,
// diagonal -sum(1/x). Row sums are zero (no shunts are modeled).
Eigen::MatrixXd susceptance_matrix(const PowerGrid& grid);

// Solves the DC power flow for injections g_i - d_i with the given slack bus
// and returns the full antisymmetric flow matrix (entry (i,j) is the MW flow
// from i to j). Throws NumericalError when the grid is disconnected.
Eigen::MatrixXd dc_power_flow(const PowerGrid& grid, int slack);

// Schur complement B11 - B12 * B22^-1 * B21 eliminating all non-generator
// buses. Throws NumericalError naming the null-space dimension when the
// load-bus block is singular.
Eigen::MatrixXd kron_reduce(const Eigen::MatrixXd& B, int n_g);

// Generator dynamic coupling phi_ij = (1/H_i + 1/H_j) |V_i||V_j| b~_ij
// cos(theta_i - theta_j); returns the generator block and the zero-padded
// n x n matrix. Throws CaseError on a nonpositive inertia constant.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd>
dynamic_coupling(const PowerGrid& grid, const Eigen::MatrixXd& B_reduced);

// Bus volumes: row sums of |P| (AbsFlow) or G_i + D_i (Capacity). Zero
// entries are floored to 1e-6 * max(w) so normalized cuts stay finite.
Eigen::VectorXd bus_volumes(const PowerGrid& grid, const Eigen::MatrixXd& P_abs,
                            VolumeMode mode);

// Symmetric 0/1 line-incidence matrix of the physical topology.
Eigen::MatrixXd line_topology(const PowerGrid& grid);

// Iteratively folds every degree-1 vertex of `topology` into its unique
// neighbor (smallest-index pendant first) until none remain.
MergeMap pendant_merge_map(const Eigen::MatrixXd& topology);

// Sums matrix entries between super-node member sets; diagonal is zero.
Eigen::MatrixXd contract_matrix(const Eigen::MatrixXd& M, const MergeMap& map);

// Sums vector entries over super-node member sets.
Eigen::VectorXd contract_vector(const Eigen::VectorXd& v, const MergeMap& map);

struct PendantReduction {
  Eigen::MatrixXd weights;
  Eigen::VectorXd volumes;
  Eigen::VectorXd injections;
  MergeMap map;
};

// Convenience bundle: reduce an adjacency plus its per-vertex volumes and
// injections in one step.
PendantReduction merge_pendants(const Eigen::MatrixXd& adjacency,
                                const Eigen::VectorXd& volumes,
                                const Eigen::VectorXd& injections);

// Builds every derived matrix for a grid snapshot.
DerivedMatrices build_derived(const PowerGrid& grid,
                              VolumeMode mode = VolumeMode::AbsFlow,
                              std::optional<Eigen::MatrixXd> delta = {});

} // namespace islanding
