#include "islanding/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace islanding {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTol = 1e-9;

double positive(double x) { return std::max(x, 0.0); }

} // namespace

GreedyResult greedy_partition(const AggregatedGrid& agg, int K, double W) {
  if (K < 1) throw std::invalid_argument("island count must be positive");
  const int n = agg.n();
  GreedyResult result;
  result.partition = Partition::singletons(n);

  while (result.partition.island_count() > K) {
    auto& islands = result.partition.islands;
    const int c = static_cast<int>(islands.size());
    MergeMap map;
    map.node_of = result.partition.labels(n);
    map.members = islands;
    Eigen::MatrixXd cross = contract_matrix(agg.combined, map);
    Eigen::MatrixXd link = contract_matrix(agg.limit, map);
    Eigen::VectorXd imbalance = contract_vector(agg.injection, map);
    Eigen::VectorXd volume = contract_vector(agg.volume, map);

    int best_a = -1, best_b = -1;
    double best_delta = kInf;
    for (int a = 0; a < c; ++a)
      for (int b = a + 1; b < c; ++b) {
        if (link(a, b) <= 0) continue; // keep every island connected
        if (volume(a) + volume(b) > W * (1 + 1e-12)) continue;
        double delta = -2.0 * cross(a, b) +
                       positive(imbalance(a) + imbalance(b)) -
                       positive(imbalance(a)) - positive(imbalance(b));
        if (delta < best_delta) {
          best_delta = delta;
          best_a = a;
          best_b = b;
        }
      }
    if (best_a < 0) {
      result.feasible = false; // stuck above K islands
      break;
    }
    islands[best_a].insert(islands[best_a].end(), islands[best_b].begin(),
                           islands[best_b].end());
    islands.erase(islands.begin() + best_b);
    result.partition.canonicalize();
  }

  MergeMap final_map;
  final_map.node_of = result.partition.labels(n);
  final_map.members = result.partition.islands;
  Eigen::VectorXd imbalance = contract_vector(agg.injection, final_map);
  result.cost = cut_partition(agg.combined, result.partition);
  for (int k = 0; k < imbalance.size(); ++k)
    result.cost += positive(imbalance(k));
  return result;
}

namespace {

// Depth-first assignment search with restricted-growth symmetry breaking:
// node 0 opens island 0 and island j+1 can open only once island j is
// nonempty, so each set partition is visited exactly once.
class AssignmentSearch {
 public:
  AssignmentSearch(const AggregatedGrid& agg, int K, double W,
                   const RegressionParams& reg, const SolverLimits& limits)
      : agg_(agg),
        problem_(shed_problem_from(agg)),
        n_(agg.n()),
        K_(std::min(K, agg.n())),
        W_(W),
        reg_(reg),
        node_budget_(limits.node_budget) {
    if (n_ > 30)
      throw std::invalid_argument(
          "aggregated instance too large for exact search; coarsen first");
    if (K < 1) throw std::invalid_argument("island count must be positive");
    for (int v = 0; v < n_; ++v)
      if (agg_.volume(v) > W_ * (1 + 1e-12))
        throw InfeasibleError("aggregated node " + std::to_string(v) +
                              " exceeds the island volume cap on its own");
    if (limits.time_limit_s > 0) {
      deadline_ = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(limits.time_limit_s));
      has_deadline_ = true;
    }
    label_.assign(n_, -1);
    island_volume_.assign(K_, 0.0);
    island_mask_.assign(K_, 0u);
  }

  void seed_incumbent(const Partition& p) {
    if (!p.covers(n_) || p.island_count() > K_) return;
    for (const auto& island : p.islands) {
      double volume = 0.0;
      for (int v : island) volume += agg_.volume(v);
      if (volume > W_ * (1 + 1e-12)) return;
    }
    double total = cut_partition(agg_.combined, p);
    for (const auto& island : p.islands) {
      uint32_t mask = 0;
      for (int v : island) mask |= 1u << v;
      total += island_cost(mask);
    }
    Partition canon = p;
    canon.canonicalize();
    if (total < best_ - kCostTol ||
        (total <= best_ + kCostTol && canon < best_partition_)) {
      best_ = std::min(best_, total);
      best_partition_ = std::move(canon);
    }
  }

  MiqpSolution run() {
    dfs(0);
    if (best_ == kInf) {
      if (budget_hit_)
        throw InfeasibleError(
            "no feasible island assignment found within the search budget");
      throw InfeasibleError(
          "no island assignment satisfies the volume constraints");
    }
    return assemble();
  }

 private:
  double island_cost(uint32_t mask) {
    auto it = memo_.find(mask);
    double shed, reserve;
    if (it != memo_.end()) {
      shed = it->second.first;
      reserve = it->second.second;
    } else {
      std::vector<int> members;
      for (int v = 0; v < n_; ++v)
        if (mask & (1u << v)) members.push_back(v);
      ShedResult r = shed_max_flow(problem_, members);
      shed = r.shed;
      reserve = generation_reserve(problem_, members, r.dispatch);
      memo_.emplace(mask, std::make_pair(shed, reserve));
    }
    if (reg_.a == 0.0 && reg_.b == 0.0) return shed;
    double volume = 0.0;
    for (int v = 0; v < n_; ++v)
      if (mask & (1u << v)) volume += agg_.volume(v);
    return regressed_shed(shed, reserve, volume, reg_);
  }

  bool out_of_budget() {
    if (budget_hit_) return true;
    if (node_budget_ >= 0 && nodes_ > node_budget_) return budget_hit_ = true;
    if (has_deadline_ && (nodes_ & 0xFFF) == 0 &&
        std::chrono::steady_clock::now() > deadline_)
      return budget_hit_ = true;
    return false;
  }

  void dfs(int v) {
    ++nodes_;
    if (out_of_budget()) {
      frontier_lb_ = std::min(frontier_lb_, partial_cut_);
      return;
    }
    if (v == n_) {
      double total = partial_cut_;
      for (int j = 0; j < used_; ++j) total += island_cost(island_mask_[j]);
      if (total > best_ + kCostTol) return;
      Partition candidate = current_partition();
      if (total < best_ - kCostTol || candidate < best_partition_ ||
          best_partition_.islands.empty()) {
        best_ = std::min(best_, total);
        best_partition_ = std::move(candidate);
      }
      return;
    }
    const int open = std::min(used_ + 1, K_);
    for (int j = 0; j < open; ++j) {
      if (island_volume_[j] + agg_.volume(v) > W_ * (1 + 1e-12)) continue;
      double delta = 0.0;
      for (int u = 0; u < v; ++u)
        if (label_[u] != j) delta += 2.0 * agg_.combined(u, v);
      if (partial_cut_ + delta > best_ + kCostTol) continue; // bound prune
      label_[v] = j;
      island_volume_[j] += agg_.volume(v);
      island_mask_[j] |= 1u << v;
      partial_cut_ += delta;
      bool opened = (j == used_);
      if (opened) ++used_;
      dfs(v + 1);
      if (opened) --used_;
      partial_cut_ -= delta;
      island_mask_[j] &= ~(1u << v);
      island_volume_[j] -= agg_.volume(v);
      label_[v] = -1;
      if (budget_hit_) {
        // Remaining siblings stay unexplored; this node's partial cut is an
        // admissible bound on everything below them.
        frontier_lb_ = std::min(frontier_lb_, partial_cut_);
        return;
      }
    }
  }

  Partition current_partition() const {
    std::vector<std::vector<int>> sets(used_);
    for (int v = 0; v < n_; ++v) sets[label_[v]].push_back(v);
    Partition p;
    p.islands = std::move(sets); // already canonical by construction
    return p;
  }

  MiqpSolution assemble() {
    MiqpSolution sol;
    sol.partition = best_partition_;
    sol.nodes_explored = nodes_;
    sol.cut_term = cut_partition(agg_.combined, sol.partition);
    sol.shed = Eigen::VectorXd::Zero(n_);
    sol.dispatch = Eigen::VectorXd::Zero(n_);
    sol.flows = Eigen::MatrixXd::Zero(n_, n_);
    sol.shed_term = 0.0;
    for (const auto& island : sol.partition.islands) {
      uint32_t mask = 0;
      for (int v : island) mask |= 1u << v;
      sol.shed_term += island_cost(mask);
      ShedResult r = shed_max_flow(problem_, island);
      for (int a = 0; a < static_cast<int>(island.size()); ++a) {
        sol.dispatch(island[a]) = r.dispatch(a);
        sol.shed(island[a]) = problem_.demand(island[a]) - r.served(a);
        for (int b = 0; b < static_cast<int>(island.size()); ++b)
          sol.flows(island[a], island[b]) = r.net_flow(a, b);
      }
    }
    sol.objective = sol.cut_term + sol.shed_term;
    auto lab = sol.partition.labels(n_);
    sol.line_status = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (i != j && agg_.limit(i, j) > 0 && lab[i] == lab[j])
          sol.line_status(i, j) = 1.0;
    sol.optimal = (frontier_lb_ == kInf);
    if (!sol.optimal) {
      double lower = std::min(frontier_lb_, best_);
      sol.bound_gap = (best_ - lower) / std::max(std::abs(best_), 1e-12);
    }
    return sol;
  }

  const AggregatedGrid& agg_;
  ShedProblem problem_;
  int n_, K_;
  double W_;
  RegressionParams reg_;
  long long node_budget_;
  std::chrono::steady_clock::time_point deadline_;
  bool has_deadline_ = false;

  std::vector<int> label_;
  std::vector<double> island_volume_;
  std::vector<uint32_t> island_mask_;
  int used_ = 0;
  double partial_cut_ = 0.0;
  long long nodes_ = 0;
  bool budget_hit_ = false;
  double frontier_lb_ = kInf;

  double best_ = kInf;
  Partition best_partition_;
  std::unordered_map<uint32_t, std::pair<double, double>> memo_;
};

} // namespace

MiqpSolution exact_solve(const AggregatedGrid& agg, int K, double W,
                         const std::optional<Partition>& warm_start,
                         const SolverLimits& limits) {
  return exact_solve_regressed(agg, K, W, RegressionParams{}, warm_start,
                               limits);
}

MiqpSolution exact_solve_regressed(const AggregatedGrid& agg, int K, double W,
                                   const RegressionParams& params,
                                   const std::optional<Partition>& warm_start,
                                   const SolverLimits& limits) {
  AssignmentSearch search(agg, K, W, params, limits);
  if (warm_start) search.seed_incumbent(*warm_start);
  return search.run();
}

} // namespace islanding
