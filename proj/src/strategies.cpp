#include "islanding/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "islanding/cuts.hpp"

namespace islanding {

namespace {

const char* kNames[] = {"I", "II", "III", "IV", "V", "VI", "VII"};

// The combined edge-weight matrix A that strategies I, III, and VI cluster:
// the weighted blend of coupling, flow, and distance terms.
Eigen::MatrixXd combined_of(const DerivedMatrices& m,
                            const StrategyConfig& cfg) {
  return combined_matrix(m.Phi_full, m.P_abs, m.Delta ? &*m.Delta : nullptr,
                         cfg.alpha_C, cfg.alpha_D, cfg.alpha_ECI);
}

Eigen::VectorXd positive_volumes(Eigen::VectorXd w) {
  double top = w.maxCoeff();
  if (top <= 0.0) return Eigen::VectorXd::Ones(w.size());
  double floor = 1e-6 * top;
  for (int i = 0; i < w.size(); ++i) w(i) = std::max(w(i), floor);
  return w;
}

void require_valid(const StrategyConfig& cfg) {
  if (cfg.K < 2) throw std::invalid_argument("island count must be at least 2");
  if (cfg.r1 < 1 || cfg.r2 < 1 || cfg.r3 < 1 || cfg.r4 < 1)
    throw std::invalid_argument("granularity factors must be at least 1");
}

} // namespace

const char* strategy_name(StrategyId id) {
  int idx = static_cast<int>(id) - 1;
  if (idx < 0 || idx > 6) throw std::invalid_argument("unknown strategy id");
  return kNames[idx];
}

StrategyId strategy_from_name(const std::string& name) {
  for (int i = 0; i < 7; ++i)
    if (name == kNames[i]) return static_cast<StrategyId>(i + 1);
  throw std::invalid_argument("unknown strategy name: " + name);
}

int granularity_count(double r, int K) {
  return static_cast<int>(std::ceil(r * K - 1e-9));
}

bool volume_balanced(const Partition& p, const Eigen::VectorXd& w, double W) {
  for (const auto& island : p.islands) {
    double volume = 0.0;
    for (int v : island) volume += w(v);
    if (volume > W * (1 + 1e-12)) return false;
  }
  return true;
}

Partition strategy_fixed(const Eigen::MatrixXd& matrix,
                         const Eigen::VectorXd& w, const StrategyConfig& cfg,
                         double r, const Eigen::MatrixXd* topology) {
  require_valid(cfg);
  HscOptions opts;
  opts.topology = topology;
  opts.eigen = cfg.eigen;
  return hsc_partition(matrix, w, granularity_count(r, cfg.K), opts);
}

StrategyResult strategy_min_granularity(const Eigen::MatrixXd& matrix,
                                        const Eigen::VectorXd& w,
                                        const StrategyConfig& cfg, double r,
                                        const Eigen::MatrixXd* topology) {
  require_valid(cfg);
  HscOptions opts;
  opts.topology = topology;
  opts.eigen = cfg.eigen;
  const int top = granularity_count(r, cfg.K);
  Partition finest;
  for (int k = cfg.K; k <= top; ++k) {
    finest = hsc_partition(matrix, w, k, opts);
    if (volume_balanced(finest, w, cfg.W)) return {finest, true, false};
  }
  return {finest, false, true};
}

std::vector<std::vector<int>> generator_groups(const Eigen::MatrixXd& Phi_gen,
                                               int k,
                                               const EigenOptions& opts) {
  const int n_g = static_cast<int>(Phi_gen.rows());
  if (n_g == 0) throw std::invalid_argument("no generators to group");
  k = std::min(k, n_g);
  HscOptions hsc;
  hsc.fold_pendants = false; // dense coupling graph has no pendants to fold
  hsc.eigen = opts;
  Eigen::VectorXd w = positive_volumes(Phi_gen.rowwise().sum());
  Partition groups = hsc_partition(Phi_gen, w, k, hsc);
  return groups.islands;
}

StrategyResult strategy_csc_refined(const PowerGrid& grid,
                                    const DerivedMatrices& m,
                                    const StrategyConfig& cfg) {
  require_valid(cfg);
  const int n_g = grid.n_g();
  if (n_g < 1) throw InfeasibleError("constrained clustering needs generators");
  HscOptions opts;
  opts.topology = &m.topology;
  opts.eigen = cfg.eigen;
  const int top = granularity_count(cfg.r3, cfg.K);
  Partition finest;
  int last_k = -1;
  for (int k = cfg.K; k <= top; ++k) {
    int kk = std::min(k, n_g); // cannot form more groups than generators
    if (kk == last_k) continue;
    last_k = kk;
    auto groups = generator_groups(m.Phi_gen, kk, cfg.eigen);
    finest = csc_partition(m.P_abs, m.volumes, groups,
                           static_cast<int>(groups.size()), opts);
    if (volume_balanced(finest, m.volumes, cfg.W))
      return {finest, true, false};
  }
  return {finest, false, true};
}

StrategyResult strategy_sequential(const PowerGrid& grid,
                                   const DerivedMatrices& m,
                                   const StrategyConfig& cfg) {
  require_valid(cfg);
  (void)grid;
  HscOptions base_opts;
  base_opts.topology = &m.topology;
  base_opts.eigen = cfg.eigen;
  Partition base = hsc_partition(m.P_abs, m.volumes, cfg.K, base_opts);

  Eigen::MatrixXd combined = combined_of(m, cfg);
  auto bisector = [&](const std::vector<int>& verts) {
    const int s = static_cast<int>(verts.size());
    Eigen::MatrixXd A_sub(s, s), T_sub(s, s);
    Eigen::VectorXd w_sub(s);
    for (int a = 0; a < s; ++a) {
      w_sub(a) = m.volumes(verts[a]);
      for (int b = 0; b < s; ++b) {
        A_sub(a, b) = combined(verts[a], verts[b]);
        T_sub(a, b) = m.topology(verts[a], verts[b]);
      }
    }
    HscOptions sub_opts;
    sub_opts.topology = &T_sub;
    sub_opts.eigen = cfg.eigen;
    Partition local = hsc_partition(A_sub, w_sub, 2, sub_opts);
    std::vector<std::vector<int>> global(local.islands.size());
    for (size_t i = 0; i < local.islands.size(); ++i)
      for (int v : local.islands[i]) global[i].push_back(verts[v]);
    return Partition::of(std::move(global));
  };

  const int steps = granularity_count(cfg.r4, cfg.K) - cfg.K;
  BisectionOutcome out = recursive_bisection(base, bisector, steps, m.volumes);
  return {out.partition, volume_balanced(out.partition, m.volumes, cfg.W),
          !out.complete};
}

Partition strategy_meet(const PowerGrid& grid, const DerivedMatrices& m,
                        const StrategyConfig& cfg) {
  require_valid(cfg);
  const int n_g = grid.n_g();
  if (n_g < 1) throw InfeasibleError("constrained clustering needs generators");
  HscOptions opts;
  opts.topology = &m.topology;
  opts.eigen = cfg.eigen;
  auto groups = generator_groups(m.Phi_gen, std::min(cfg.K, n_g), cfg.eigen);
  Partition constrained = csc_partition(m.P_abs, m.volumes, groups,
                                        static_cast<int>(groups.size()), opts);
  Partition hierarchical = hsc_partition(m.P_abs, m.volumes, cfg.K, opts);
  return meet(constrained, hierarchical);
}

StrategyResult run_strategy(StrategyId id, const PowerGrid& grid,
                            const DerivedMatrices& m,
                            const StrategyConfig& cfg) {
  require_valid(cfg);
  StrategyResult result;
  switch (id) {
    case StrategyId::I:
      result.partition = strategy_fixed(combined_of(m, cfg), m.volumes, cfg,
                                        cfg.r1, &m.topology);
      break;
    case StrategyId::II:
      result.partition =
          strategy_fixed(m.P_abs, m.volumes, cfg, cfg.r2, &m.topology);
      break;
    case StrategyId::III:
      result = strategy_min_granularity(combined_of(m, cfg), m.volumes, cfg,
                                        cfg.r1, &m.topology);
      break;
    case StrategyId::IV:
      result = strategy_min_granularity(m.P_abs, m.volumes, cfg, cfg.r2,
                                        &m.topology);
      break;
    case StrategyId::V:
      result = strategy_csc_refined(grid, m, cfg);
      break;
    case StrategyId::VI:
      result = strategy_sequential(grid, m, cfg);
      break;
    case StrategyId::VII:
      result.partition = strategy_meet(grid, m, cfg);
      break;
  }
  result.balanced = volume_balanced(result.partition, m.volumes, cfg.W);
  result.partition.origin = strategy_name(id);
  return result;
}

} // namespace islanding
