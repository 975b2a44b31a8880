#include "islanding/cuts.hpp"

#include <cmath>
#include <stdexcept>

namespace islanding {

Eigen::MatrixXd laplacian(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || !A.isApprox(A.transpose(), 1e-12))
    throw std::invalid_argument("laplacian needs a symmetric matrix");
  Eigen::MatrixXd L = -A;
  Eigen::VectorXd row_sums = A.rowwise().sum();
  for (int i = 0; i < A.rows(); ++i) L(i, i) = row_sums(i) - A(i, i);
  return L;
}

Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& w) {
  if ((w.array() <= 0).any())
    throw std::invalid_argument("volumes must be positive");
  Eigen::VectorXd inv_sqrt = w.array().rsqrt();
  Eigen::MatrixXd L = laplacian(A);
  Eigen::MatrixXd S =
      inv_sqrt.asDiagonal() * L * inv_sqrt.asDiagonal();
  return (S + S.transpose()) / 2.0;
}

double cut_set(const Eigen::MatrixXd& A, const std::vector<int>& s) {
  const int n = static_cast<int>(A.rows());
  std::vector<char> in(n, 0);
  for (int v : s) {
    if (v < 0 || v >= n) throw std::out_of_range("cut vertex out of range");
    in[v] = 1;
  }
  double total = 0.0;
  for (int v : s)
    for (int j = 0; j < n; ++j)
      if (!in[j]) total += A(v, j);
  return total;
}

double cut_partition(const Eigen::MatrixXd& A, const Partition& p) {
  double total = 0.0;
  for (const auto& island : p.islands) total += cut_set(A, island);
  return total;
}

double cut_signed_set(const Eigen::MatrixXd& P_signed,
                      const std::vector<int>& s) {
  const int n = static_cast<int>(P_signed.rows());
  std::vector<char> in(n, 0);
  for (int v : s) {
    if (v < 0 || v >= n) throw std::out_of_range("cut vertex out of range");
    in[v] = 1;
  }
  double total = 0.0;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      double flow_i_to_j = P_signed(i, j);
      if (flow_i_to_j == 0.0) continue;
      if (in[i] && !in[j]) total += flow_i_to_j;
      if (in[j] && !in[i]) total -= flow_i_to_j;
    }
  return total;
}

double ncut(const Eigen::MatrixXd& A, const Eigen::VectorXd& w,
            const Partition& p) {
  double total = 0.0;
  for (const auto& island : p.islands) {
    if (island.empty()) throw std::invalid_argument("empty island in ncut");
    double volume = 0.0;
    for (int v : island) volume += w(v);
    total += cut_set(A, island) / volume;
  }
  return total;
}

Eigen::MatrixXd combined_matrix(const Eigen::MatrixXd& Phi_full,
                                const Eigen::MatrixXd& P_abs,
                                const Eigen::MatrixXd* Delta, double alpha_C,
                                double alpha_D, double alpha_ECI) {
  if (alpha_C < 0 || alpha_D < 0 || alpha_ECI < 0)
    throw std::invalid_argument("combination weights must be nonnegative");
  Eigen::MatrixXd A = alpha_C * Phi_full + alpha_D * P_abs;
  if (alpha_ECI > 0) {
    if (!Delta)
      throw CaseError("electrical-distance weight set but no matrix supplied");
    A += alpha_ECI * (*Delta);
  }
  return A;
}

MetricReport metric_report(const PowerGrid& grid, const DerivedMatrices& m,
                           const Partition& p, const MetricConfig& cfg) {
  if (!p.covers(grid.n()))
    throw std::invalid_argument("partition does not cover every bus");
  MetricReport r;
  r.coherency_C = cut_partition(m.Phi_full, p);
  r.disruption_D = cut_partition(m.P_abs, p);
  if (m.Delta) r.eci = cut_partition(*m.Delta, p);

  ShedProblem problem = shed_problem_from(grid);
  double shed_term = 0.0;
  for (const auto& island : p.islands) {
    r.excess_load += excess_load(problem, island);
    ShedResult mf = shed_max_flow(problem, island);
    r.shed_mf += mf.shed;
    if (cfg.regression.a != 0.0 || cfg.regression.b != 0.0) {
      double reserve = generation_reserve(problem, island, mf.dispatch);
      double volume = 0.0;
      for (int v : island) volume += m.volumes(v);
      shed_term += regressed_shed(mf.shed, reserve, volume, cfg.regression);
    } else {
      shed_term += mf.shed;
    }
  }

  r.cost_F = cfg.alpha_C * r.coherency_C + cfg.alpha_D * r.disruption_D +
             (r.eci ? cfg.alpha_ECI * *r.eci : 0.0) + shed_term;
  return r;
}

} // namespace islanding
