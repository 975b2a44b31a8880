#pragma once

#include <optional>

#include <Eigen/Dense>

#include "islanding/matrices.hpp"
#include "islanding/partition.hpp"
#include "islanding/shed.hpp"

namespace islanding {

// L(A) = diag(A 1) - A. Requires a symmetric nonnegative-off-diagonal input.
Eigen::MatrixXd laplacian(const Eigen::MatrixXd& A);

// diag(w)^-1/2 L(A) diag(w)^-1/2 for a positive volume vector.
Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& w);

// Boundary weight of one vertex set: sum of A(i,j) over i in s, j outside.
double cut_set(const Eigen::MatrixXd& A, const std::vector<int>& s);

// Partition cut: sum of cut_set over all islands (each crossing pair is
// counted once from each side, matching the indicator trace form).
double cut_partition(const Eigen::MatrixXd& A, const Partition& p);

// Net signed boundary flow of a set, using the lower-triangular signed flow
// storage (entry (i,j), i > j, is the MW flow from i to j).
double cut_signed_set(const Eigen::MatrixXd& P_signed, const std::vector<int>& s);

// Normalized cut: sum over islands of cut(s) / w(s).
double ncut(const Eigen::MatrixXd& A, const Eigen::VectorXd& w,
            const Partition& p);

// A = alpha_C * Phi + alpha_D * |P| + alpha_ECI * Delta. Throws CaseError
// when alpha_ECI > 0 but no distance matrix is present.
Eigen::MatrixXd combined_matrix(const Eigen::MatrixXd& Phi_full,
                                const Eigen::MatrixXd& P_abs,
                                const Eigen::MatrixXd* Delta, double alpha_C,
                                double alpha_D, double alpha_ECI);

struct MetricConfig {
  double alpha_C = 1.0;
  double alpha_D = 1.0;
  double alpha_ECI = 0.0;
  RegressionParams regression; // (0,0) keeps the plain max-flow shed
};

struct MetricReport {
  double coherency_C = 0.0;    // dynamic-coupling cut
  double disruption_D = 0.0;   // absolute-flow cut
  std::optional<double> eci;   // electrical-cohesiveness cut, when Delta given
  double excess_load = 0.0;    // sum of island load/generation imbalances
  double shed_mf = 0.0;        // sum of island max-flow shed estimates
  double cost_F = 0.0;         // weighted objective with the configured shed
};

MetricReport metric_report(const PowerGrid& grid, const DerivedMatrices& m,
                           const Partition& p, const MetricConfig& cfg);

} // namespace islanding
