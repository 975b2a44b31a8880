#include "islanding/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "islanding/cuts.hpp"

namespace islanding {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void apply_sign_convention(Eigen::MatrixXd& vectors) {
  for (int c = 0; c < vectors.cols(); ++c) {
    for (int r = 0; r < vectors.rows(); ++r) {
      if (std::abs(vectors(r, c)) > 1e-12) {
        if (vectors(r, c) < 0) vectors.col(c) *= -1.0;
        break;
      }
    }
  }
}

void check_basis(const Eigen::MatrixXd& M, const EigenBasis& basis,
                 double tol) {
  double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  for (int c = 0; c < basis.vectors.cols(); ++c) {
    double residual =
        (M * basis.vectors.col(c) - basis.values(c) * basis.vectors.col(c))
            .norm();
    if (residual > tol * scale * 100)
      throw NumericalError("eigenpair residual " + std::to_string(residual) +
                           " exceeds tolerance");
  }
  Eigen::MatrixXd gram =
      basis.vectors.transpose() * basis.vectors -
      Eigen::MatrixXd::Identity(basis.vectors.cols(), basis.vectors.cols());
  if (gram.cwiseAbs().maxCoeff() > 1e-8)
    throw NumericalError("eigenvectors lost orthonormality");
}

// Lanczos iteration with full reorthogonalization for the low end of the
// spectrum of a large symmetric matrix.
EigenBasis lanczos_smallest(const Eigen::MatrixXd& M, int k,
                            const EigenOptions& opts) {
  const int n = static_cast<int>(M.rows());
  const int max_basis = std::min(n, std::max(4 * k + 20, 60));

  Eigen::MatrixXd V(n, max_basis);
  Eigen::VectorXd alpha(max_basis), beta(max_basis);
  // Deterministic start vector: normalized all-ones perturbed by index so it
  // is never orthogonal to the sought eigenspace by symmetry.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i) v(i) += 0.01 * std::sin(i + 1.0);
  v.normalize();

  int built = 0;
  for (int j = 0; j < max_basis; ++j) {
    V.col(j) = v;
    built = j + 1;
    Eigen::VectorXd u = M * v;
    alpha(j) = v.dot(u);
    u -= alpha(j) * v;
    if (j > 0) u -= beta(j - 1) * V.col(j - 1);
    // Full reorthogonalization keeps the Krylov basis numerically clean.
    for (int pass = 0; pass < 2; ++pass)
      for (int c = 0; c < built; ++c) u -= V.col(c).dot(u) * V.col(c);
    beta(j) = u.norm();
    if (beta(j) < 1e-14) break; // invariant subspace found
    v = u / beta(j);
  }

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(built, built);
  for (int j = 0; j < built; ++j) {
    T(j, j) = alpha(j);
    if (j + 1 < built) T(j, j + 1) = T(j + 1, j) = beta(j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> inner(T);
  if (inner.info() != Eigen::Success)
    throw NumericalError("Lanczos inner eigensolver failed");

  EigenBasis basis;
  basis.values = inner.eigenvalues().head(k);
  basis.vectors = V.leftCols(built) * inner.eigenvectors().leftCols(k);
  for (int c = 0; c < k; ++c) basis.vectors.col(c).normalize();
  apply_sign_convention(basis.vectors);
  check_basis(M, basis, opts.tol);
  return basis;
}

} // namespace

EigenBasis smallest_eigenpairs(const Eigen::MatrixXd& M, int k,
                               const EigenOptions& opts) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != n) throw std::invalid_argument("matrix must be square");
  if (k < 1 || k > n)
    throw std::invalid_argument("eigenpair count out of range");
  if (!M.isApprox(M.transpose(), 1e-9))
    throw std::invalid_argument("matrix must be symmetric");

  if (n > opts.dense_threshold) return lanczos_smallest(M, k, opts);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
  if (solver.info() != Eigen::Success)
    throw NumericalError("dense eigensolver did not converge");
  EigenBasis basis;
  basis.values = solver.eigenvalues().head(k);
  basis.vectors = solver.eigenvectors().leftCols(k);
  apply_sign_convention(basis.vectors);
  check_basis(M, basis, opts.tol);
  return basis;
}

Eigen::MatrixXd sphere_embedding(const Eigen::MatrixXd& vectors) {
  Eigen::MatrixXd points = vectors;
  for (int r = 0; r < points.rows(); ++r) {
    double norm = points.row(r).norm();
    if (norm < 1e-12) {
      points.row(r).setZero();
      points(r, 0) = 1.0;
    } else {
      points.row(r) /= norm;
    }
  }
  return points;
}

Eigen::MatrixXd embedded_distances(const Eigen::MatrixXd& points,
                                   const Eigen::MatrixXd& edges) {
  const int n = static_cast<int>(points.rows());
  Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(n, n, kInf);
  for (int i = 0; i < n; ++i) dist(i, i) = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && edges(i, j) > 0) {
        double d = 1.0 - points.row(i).dot(points.row(j));
        dist(i, j) = std::max(0.0, d); // clamp cosine roundoff
      }
  for (int via = 0; via < n; ++via)
    for (int i = 0; i < n; ++i) {
      if (dist(i, via) == kInf) continue;
      for (int j = 0; j < n; ++j) {
        double through = dist(i, via) + dist(via, j);
        if (through < dist(i, j)) dist(i, j) = through;
      }
    }
  return dist;
}

std::vector<std::vector<int>> complete_linkage_clusters(
    const Eigen::MatrixXd& dist, int K) {
  const int n = static_cast<int>(dist.rows());
  if (K < 1) throw std::invalid_argument("cluster count must be positive");
  K = std::min(K, n);

  std::vector<std::vector<int>> clusters(n);
  for (int i = 0; i < n; ++i) clusters[i] = {i};
  // Pairwise complete-linkage distances, updated by the max rule on merge.
  Eigen::MatrixXd link = dist;

  while (static_cast<int>(clusters.size()) > K) {
    int best_a = -1, best_b = -1;
    double best = kInf;
    const int c = static_cast<int>(clusters.size());
    for (int a = 0; a < c; ++a)
      for (int b = a + 1; b < c; ++b)
        if (link(a, b) < best) {
          best = link(a, b);
          best_a = a;
          best_b = b;
        }
    if (best_a < 0) { // all remaining pairs infinitely far: merge first two
      best_a = 0;
      best_b = 1;
    }
    clusters[best_a].insert(clusters[best_a].end(),
                            clusters[best_b].begin(),
                            clusters[best_b].end());
    clusters.erase(clusters.begin() + best_b);
    for (int x = 0; x < c; ++x) {
      if (x == best_a || x == best_b) continue;
      double merged = std::max(link(best_a, x), link(best_b, x));
      link(best_a, x) = link(x, best_a) = merged;
    }
    // Compact the link matrix by dropping row/column best_b.
    const int c2 = c - 1;
    Eigen::MatrixXd next(c2, c2);
    for (int x = 0, xn = 0; x < c; ++x) {
      if (x == best_b) continue;
      for (int y = 0, yn = 0; y < c; ++y) {
        if (y == best_b) continue;
        next(xn, yn) = link(x, y);
        ++yn;
      }
      ++xn;
    }
    link = next;
  }
  for (auto& cl : clusters) std::sort(cl.begin(), cl.end());
  return clusters;
}

Partition hsc_partition(const Eigen::MatrixXd& A, const Eigen::VectorXd& w,
                        int K, const HscOptions& opts) {
  const int n = static_cast<int>(A.rows());
  if (n == 0) throw std::invalid_argument("empty graph");
  if (K <= 1) return Partition::single(n);

  const Eigen::MatrixXd& topology = opts.topology ? *opts.topology : A;

  MergeMap map;
  if (opts.fold_pendants) {
    map = pendant_merge_map(topology);
    if (map.size() < K) {
      // Folding would leave too few vertices to form K clusters; cluster the
      // unfolded graph instead.
      map = MergeMap{};
    }
  }
  if (map.members.empty()) {
    map.node_of.resize(n);
    std::iota(map.node_of.begin(), map.node_of.end(), 0);
    map.members.resize(n);
    for (int i = 0; i < n; ++i) map.members[i] = {i};
  }

  const int reduced_n = map.size();
  std::vector<std::vector<int>> clusters;
  if (K >= reduced_n) {
    clusters.resize(reduced_n);
    for (int i = 0; i < reduced_n; ++i) clusters[i] = {i};
  } else {
    Eigen::MatrixXd Ar = contract_matrix(A, map);
    Eigen::MatrixXd Tr = contract_matrix(topology, map);
    Eigen::VectorXd wr = contract_vector(w, map);
    Eigen::MatrixXd L = normalized_laplacian(Ar, wr);
    EigenBasis basis = smallest_eigenpairs(L, K, opts.eigen);
    Eigen::MatrixXd points = sphere_embedding(basis.vectors);
    Eigen::MatrixXd dist = embedded_distances(points, Tr);
    clusters = complete_linkage_clusters(dist, K);
  }

  std::vector<std::vector<int>> islands;
  islands.reserve(clusters.size());
  for (const auto& cluster : clusters) {
    std::vector<int> island;
    for (int node : cluster)
      island.insert(island.end(), map.members[node].begin(),
                    map.members[node].end());
    islands.push_back(std::move(island));
  }
  return Partition::of(std::move(islands));
}

Partition csc_partition(const Eigen::MatrixXd& P_abs, const Eigen::VectorXd& w,
                        const std::vector<std::vector<int>>& generator_groups,
                        int K, const HscOptions& opts) {
  const int n = static_cast<int>(P_abs.rows());
  const int groups = static_cast<int>(generator_groups.size());
  if (groups == 0) throw std::invalid_argument("no generator groups");
  if (K != groups)
    throw std::invalid_argument("eigenvector count must match group count");

  std::vector<int> group_of(n, -1);
  for (int g = 0; g < groups; ++g) {
    if (generator_groups[g].empty())
      throw std::invalid_argument("empty generator group");
    for (int v : generator_groups[g]) {
      if (v < 0 || v >= n)
        throw std::out_of_range("generator index outside graph");
      if (group_of[v] >= 0)
        throw std::invalid_argument("generator groups overlap");
      group_of[v] = g;
    }
  }

  Eigen::MatrixXd L = normalized_laplacian(P_abs, w);
  EigenBasis basis =
      smallest_eigenpairs(L, std::min(K, n), opts.eigen);
  Eigen::MatrixXd points = sphere_embedding(basis.vectors);
  const Eigen::MatrixXd& topology = opts.topology ? *opts.topology : P_abs;
  Eigen::MatrixXd dist = embedded_distances(points, topology);

  std::vector<std::vector<int>> islands(groups);
  for (int v = 0; v < n; ++v) {
    // Generator vertices always stay with their own group.
    if (group_of[v] >= 0) {
      islands[group_of[v]].push_back(v);
      continue;
    }
    int best_group = -1;
    double best = kInf;
    for (int g = 0; g < groups; ++g)
      for (int gen : generator_groups[g])
        if (dist(v, gen) < best - 1e-12) {
          best = dist(v, gen);
          best_group = g;
        }
    if (best_group < 0)
      throw InfeasibleError("vertex unreachable from every generator group");
    islands[best_group].push_back(v);
  }
  return Partition::of(std::move(islands));
}

BisectionOutcome recursive_bisection(
    const Partition& base,
    const std::function<Partition(const std::vector<int>&)>& bisector,
    int steps, const Eigen::VectorXd& w) {
  if (steps < 0) throw std::invalid_argument("negative bisection step count");
  BisectionOutcome out{base, true};
  out.partition.canonicalize();
  for (int step = 0; step < steps; ++step) {
    int target = -1;
    double target_volume = -1.0;
    for (int k = 0; k < out.partition.island_count(); ++k) {
      double volume = 0.0;
      for (int v : out.partition.islands[k]) volume += w(v);
      if (volume > target_volume + 1e-12) {
        target_volume = volume;
        target = k;
      }
    }
    const auto island = out.partition.islands[target];
    if (island.size() < 2) {
      out.complete = false; // nothing left to split
      break;
    }
    Partition halves = bisector(island);
    std::vector<int> merged;
    for (const auto& part : halves.islands)
      merged.insert(merged.end(), part.begin(), part.end());
    std::sort(merged.begin(), merged.end());
    if (merged != island)
      throw std::invalid_argument("bisector changed the island's vertex set");
    out.partition.islands.erase(out.partition.islands.begin() + target);
    for (const auto& part : halves.islands)
      out.partition.islands.push_back(part);
    out.partition.canonicalize();
  }
  return out;
}

} // namespace islanding
