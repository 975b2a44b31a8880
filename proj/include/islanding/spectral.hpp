#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "islanding/matrices.hpp"
#include "islanding/partition.hpp"

namespace islanding {

struct EigenBasis {
  Eigen::VectorXd values;  // k smallest eigenvalues, ascending
  Eigen::MatrixXd vectors; // n x k, column-orthonormal
};

struct EigenOptions {
  double tol = 1e-8;
  // Problems up to this order use a dense solver; larger ones switch to a
  // Lanczos iteration with full reorthogonalization.
  int dense_threshold = 2000;
  int max_iterations = 500;
};

// k smallest eigenpairs of a symmetric matrix with a deterministic sign
// convention: the first component of each vector that exceeds roundoff is
// positive. Residual and orthonormality are checked against `tol`.
EigenBasis smallest_eigenpairs(const Eigen::MatrixXd& M, int k,
                               const EigenOptions& opts = {});

// Rows normalized to the unit sphere; an all-zero row becomes the first
// basis direction.
Eigen::MatrixXd sphere_embedding(const Eigen::MatrixXd& vectors);

// All-pairs shortest paths where each graph edge (edges(i,j) > 0) has length
// one minus the cosine similarity of the endpoint embeddings. Vertex pairs
// with no connecting path keep an infinite distance.
Eigen::MatrixXd embedded_distances(const Eigen::MatrixXd& points,
                                   const Eigen::MatrixXd& edges);

// Agglomerative complete-linkage clustering of a distance matrix, cut at K
// clusters. Ties pick the lexicographically first cluster pair.
std::vector<std::vector<int>> complete_linkage_clusters(
    const Eigen::MatrixXd& dist, int K);

struct HscOptions {
  // Physical edge structure used for pendant folding and path distances;
  // defaults to the sparsity of the clustered matrix itself.
  const Eigen::MatrixXd* topology = nullptr;
  // Pendant folding is skipped for dense graphs (generator coupling) and
  // automatically when folding would leave fewer than K vertices.
  bool fold_pendants = true;
  EigenOptions eigen;
};

// Hierarchical spectral clustering: pendant folding, normalized Laplacian,
// K-dimensional sphere embedding, shortest-path distances, complete-linkage
// agglomeration, unfolding. Returns a K-partition (fewer islands only when
// the graph has fewer vertices than K).
Partition hsc_partition(const Eigen::MatrixXd& A, const Eigen::VectorXd& w,
                        int K, const HscOptions& opts = {});

// Constrained clustering: embed the flow graph with K eigenvectors and give
// every vertex to the generator group whose nearest member is closest in the
// embedded shortest-path metric. Group vertices stay in their own group;
// other ties go to the smaller group index.
Partition csc_partition(const Eigen::MatrixXd& P_abs, const Eigen::VectorXd& w,
                        const std::vector<std::vector<int>>& generator_groups,
                        int K, const HscOptions& opts = {});

struct BisectionOutcome {
  Partition partition;
  bool complete = true; // false when a singleton island stopped the recursion
};

// Splits the largest-volume island (ties: first in canonical order) with the
// supplied bisector, `steps` times. The bisector receives the island's
// vertex list and must return a 2-partition of exactly those vertices.
BisectionOutcome recursive_bisection(
    const Partition& base,
    const std::function<Partition(const std::vector<int>&)>& bisector,
    int steps, const Eigen::VectorXd& w);

} // namespace islanding
