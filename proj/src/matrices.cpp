#include "islanding/matrices.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace islanding {

Eigen::MatrixXd susceptance_matrix(const PowerGrid& grid) {
  const int n = grid.n();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (const auto& l : grid.lines) {
    double b = 1.0 / l.reactance;
    B(l.from, l.to) += b;
    B(l.to, l.from) += b;
    B(l.from, l.from) -= b;
    B(l.to, l.to) -= b;
  }
  return B;
}

Eigen::MatrixXd dc_power_flow(const PowerGrid& grid, int slack) {
  const int n = grid.n();
  if (slack < 0 || slack >= n) throw CaseError("slack bus index out of range");
  Eigen::VectorXd injection = Eigen::VectorXd::Zero(n); // g_i - d_i, MW
  for (int i = 0; i < n; ++i) injection(i) -= grid.buses[i].served_load;
  for (const auto& g : grid.generators) injection(g.bus) += g.current_output;

  // Solve B * theta = injection with the slack row/column removed; the slack
  // absorbs any residual imbalance. Angles here carry the MW scale, which
  // cancels in the branch flows.
  Eigen::MatrixXd B = susceptance_matrix(grid);
  std::vector<int> keep;
  keep.reserve(n - 1);
  for (int i = 0; i < n; ++i)
    if (i != slack) keep.push_back(i);
  Eigen::MatrixXd Br(n - 1, n - 1);
  Eigen::VectorXd pr(n - 1);
  for (int a = 0; a < n - 1; ++a) {
    pr(a) = injection(keep[a]);
    for (int b = 0; b < n - 1; ++b) Br(a, b) = B(keep[a], keep[b]);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Br);
  if (!lu.isInvertible())
    throw NumericalError("susceptance system is singular (disconnected grid)");
  // B has negative diagonal dominance: B * theta = -injection in the standard
  // orientation. Flip signs so positive injection raises the local angle.
  Eigen::VectorXd theta_r = lu.solve(-pr);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  for (int a = 0; a < n - 1; ++a) theta(keep[a]) = theta_r(a);

  Eigen::MatrixXd flows = Eigen::MatrixXd::Zero(n, n);
  for (const auto& l : grid.lines) {
    double f = (theta(l.from) - theta(l.to)) / l.reactance;
    flows(l.from, l.to) += f;
    flows(l.to, l.from) -= f;
  }
  return flows;
}

Eigen::MatrixXd kron_reduce(const Eigen::MatrixXd& B, int n_g) {
  const int n = static_cast<int>(B.rows());
  if (n_g < 0 || n_g > n) throw CaseError("generator count out of range");
  if (n_g == n) return B;
  const int n_l = n - n_g;
  Eigen::MatrixXd B11 = B.topLeftCorner(n_g, n_g);
  Eigen::MatrixXd B12 = B.topRightCorner(n_g, n_l);
  Eigen::MatrixXd B22 = B.bottomRightCorner(n_l, n_l);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B22);
  if (!lu.isInvertible()) {
    int null_dim = n_l - static_cast<int>(lu.rank());
    throw NumericalError("load-bus susceptance block is singular (null space "
                         "dimension " + std::to_string(null_dim) + ")");
  }
  Eigen::MatrixXd reduced = B11 - B12 * lu.solve(B12.transpose());
  return (reduced + reduced.transpose()) / 2.0; // enforce exact symmetry
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd>
dynamic_coupling(const PowerGrid& grid, const Eigen::MatrixXd& B_reduced) {
  const int n = grid.n();
  const int n_g = grid.n_g();
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n_g, n_g);
  for (int i = 0; i < n_g; ++i) {
    const auto& gi = grid.generators[i];
    if (gi.inertia <= 0) throw CaseError("nonpositive inertia constant");
    for (int j = i + 1; j < n_g; ++j) {
      const auto& gj = grid.generators[j];
      double v = (1.0 / gi.inertia + 1.0 / gj.inertia) *
                 grid.buses[i].voltage * grid.buses[j].voltage *
                 B_reduced(i, j) *
                 std::cos(grid.buses[i].angle - grid.buses[j].angle);
      // Kron reduction of a connected grid keeps off-diagonals nonnegative;
      // clamp roundoff so the combined matrix stays a valid edge weighting.
      v = std::max(v, 0.0);
      phi(i, j) = phi(j, i) = v;
    }
  }
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, n);
  full.topLeftCorner(n_g, n_g) = phi;
  return {phi, full};
}

Eigen::VectorXd bus_volumes(const PowerGrid& grid, const Eigen::MatrixXd& P_abs,
                            VolumeMode mode) {
  const int n = grid.n();
  Eigen::VectorXd w;
  if (mode == VolumeMode::AbsFlow) {
    w = P_abs.rowwise().sum();
  } else {
    w = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) w(i) = grid.buses[i].demand;
    for (const auto& g : grid.generators) w(g.bus) += g.max_output;
  }
  double top = w.maxCoeff();
  if (top <= 0.0) return Eigen::VectorXd::Ones(n); // fully idle grid
  double floor = 1e-6 * top;
  for (int i = 0; i < n; ++i) w(i) = std::max(w(i), floor);
  return w;
}

Eigen::MatrixXd line_topology(const PowerGrid& grid) {
  const int n = grid.n();
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (const auto& l : grid.lines) {
    T(l.from, l.to) = 1.0;
    T(l.to, l.from) = 1.0;
  }
  return T;
}

MergeMap pendant_merge_map(const Eigen::MatrixXd& topology) {
  const int n = static_cast<int>(topology.rows());
  std::vector<std::vector<int>> members(n);
  std::vector<char> alive(n, 1);
  for (int i = 0; i < n; ++i) members[i] = {i};
  Eigen::MatrixXd W = topology;

  auto degree = [&](int v) {
    int d = 0;
    for (int u = 0; u < n; ++u)
      if (u != v && alive[u] && W(v, u) > 0) ++d;
    return d;
  };

  int alive_count = n;
  bool changed = true;
  while (changed && alive_count > 1) {
    changed = false;
    for (int v = 0; v < n && alive_count > 1; ++v) {
      if (!alive[v] || degree(v) != 1) continue;
      int nb = -1;
      for (int u = 0; u < n; ++u)
        if (u != v && alive[u] && W(v, u) > 0) nb = u;
      // Fold v into its unique neighbor; edges to third parties transfer.
      for (int u = 0; u < n; ++u) {
        if (u == v || u == nb || !alive[u]) continue;
        W(nb, u) += W(v, u);
        W(u, nb) = W(nb, u);
      }
      W.row(v).setZero();
      W.col(v).setZero();
      members[nb].insert(members[nb].end(), members[v].begin(),
                         members[v].end());
      members[v].clear();
      alive[v] = 0;
      --alive_count;
      changed = true;
    }
  }

  MergeMap map;
  map.node_of.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    std::sort(members[v].begin(), members[v].end());
    int node = map.size();
    for (int orig : members[v]) map.node_of[orig] = node;
    map.members.push_back(members[v]);
  }
  map.degenerate = (n > 1 && map.size() == 1);
  return map;
}

Eigen::MatrixXd contract_matrix(const Eigen::MatrixXd& M, const MergeMap& map) {
  const int k = map.size();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(k, k);
  const int n = static_cast<int>(M.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int a = map.node_of[i], b = map.node_of[j];
      if (a != b) R(a, b) += M(i, j);
    }
  return R;
}

Eigen::VectorXd contract_vector(const Eigen::VectorXd& v, const MergeMap& map) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(map.size());
  for (int i = 0; i < v.size(); ++i) r(map.node_of[i]) += v(i);
  return r;
}

PendantReduction merge_pendants(const Eigen::MatrixXd& adjacency,
                                const Eigen::VectorXd& volumes,
                                const Eigen::VectorXd& injections) {
  PendantReduction red;
  red.map = pendant_merge_map(adjacency);
  red.weights = contract_matrix(adjacency, red.map);
  red.volumes = contract_vector(volumes, red.map);
  red.injections = contract_vector(injections, red.map);
  return red;
}

DerivedMatrices build_derived(const PowerGrid& grid, VolumeMode mode,
                              std::optional<Eigen::MatrixXd> delta) {
  const int n = grid.n();
  DerivedMatrices d;
  d.B = susceptance_matrix(grid);
  d.B_reduced = kron_reduce(d.B, grid.n_g());
  std::tie(d.Phi_gen, d.Phi_full) = dynamic_coupling(grid, d.B_reduced);

  d.P_signed = Eigen::MatrixXd::Zero(n, n);
  d.P_abs = Eigen::MatrixXd::Zero(n, n);
  for (const auto& l : grid.lines) {
    int lo = std::min(l.from, l.to), hi = std::max(l.from, l.to);
    double toward_hi = (l.from == lo) ? l.current_flow : -l.current_flow;
    d.P_signed(hi, lo) += -toward_hi; // row > col holds the flow col <- row
    double abs_flow = std::abs(l.current_flow);
    d.P_abs(lo, hi) += abs_flow;
    d.P_abs(hi, lo) += abs_flow;
  }
  d.topology = line_topology(grid);
  d.volumes = bus_volumes(grid, d.P_abs, mode);
  d.injections = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) d.injections(i) = grid.buses[i].served_load;
  for (const auto& g : grid.generators) d.injections(g.bus) -= g.current_output;
  if (delta) {
    if (delta->rows() != n || delta->cols() != n)
      throw CaseError("electrical distance matrix has wrong dimensions");
    d.Delta = std::move(delta);
  }
  return d;
}

} // namespace islanding
