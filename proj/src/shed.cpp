#include "islanding/shed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace islanding {

ShedProblem shed_problem_from(const PowerGrid& grid) {
  const int n = grid.n();
  ShedProblem p;
  p.gen_cap = Eigen::VectorXd::Zero(n);
  p.gen_out = Eigen::VectorXd::Zero(n);
  p.demand = Eigen::VectorXd::Zero(n);
  p.served = Eigen::VectorXd::Zero(n);
  p.line_cap = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    p.demand(i) = grid.buses[i].demand;
    p.served(i) = grid.buses[i].served_load;
  }
  for (const auto& g : grid.generators) {
    p.gen_cap(g.bus) += g.max_output;
    p.gen_out(g.bus) += g.current_output;
  }
  for (const auto& l : grid.lines) {
    p.line_cap(l.from, l.to) += l.flow_limit;
    p.line_cap(l.to, l.from) += l.flow_limit;
  }
  return p;
}

namespace {

// Dinic's algorithm on an explicit arc list; capacities are MW doubles.
class MaxFlow {
 public:
  explicit MaxFlow(int node_count) : head_(node_count, -1) {}

  int add_arc(int from, int to, double cap) {
    int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, head_[from], cap, 0.0});
    head_[from] = id;
    arcs_.push_back({from, head_[to], 0.0, 0.0});
    head_[to] = id + 1;
    return id;
  }

  double run(int source, int sink) {
    double total = 0.0;
    // Tolerance scaled to the largest capacity so saturated arcs terminate
    // the augmentation loop despite floating-point residue.
    double max_cap = 0.0;
    for (const auto& a : arcs_) max_cap = std::max(max_cap, a.cap);
    eps_ = std::max(1e-12, 1e-11 * max_cap);
    while (bfs(source, sink)) {
      iter_ = head_;
      double pushed;
      while ((pushed = dfs(source, sink,
                           std::numeric_limits<double>::infinity())) > eps_)
        total += pushed;
    }
    return total;
  }

  double flow_on(int arc_id) const { return arcs_[arc_id].flow; }

 private:
  struct Arc {
    int to;
    int next;
    double cap;
    double flow;
  };

  bool bfs(int source, int sink) {
    level_.assign(head_.size(), -1);
    std::queue<int> q;
    q.push(source);
    level_[source] = 0;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int id = head_[v]; id >= 0; id = arcs_[id].next) {
        const Arc& a = arcs_[id];
        if (level_[a.to] < 0 && a.cap - a.flow > eps_) {
          level_[a.to] = level_[v] + 1;
          q.push(a.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  double dfs(int v, int sink, double limit) {
    if (v == sink) return limit;
    for (int& id = iter_[v]; id >= 0; id = arcs_[id].next) {
      Arc& a = arcs_[id];
      double residual = a.cap - a.flow;
      if (residual <= eps_ || level_[a.to] != level_[v] + 1) continue;
      double pushed = dfs(a.to, sink, std::min(limit, residual));
      if (pushed > eps_) {
        a.flow += pushed;
        arcs_[id ^ 1].flow -= pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<Arc> arcs_;
  std::vector<int> head_;
  std::vector<int> iter_;
  std::vector<int> level_;
  double eps_ = 1e-12;
};

} // namespace

ShedResult shed_max_flow(const ShedProblem& problem,
                         const std::vector<int>& island) {
  const int k = static_cast<int>(island.size());
  for (int v : island)
    if (v < 0 || v >= problem.n())
      throw std::out_of_range("island vertex outside problem");

  MaxFlow net(k + 2);
  const int source = k, sink = k + 1;
  std::vector<int> source_arc(k, -1), sink_arc(k, -1);
  Eigen::MatrixXd arc_id = Eigen::MatrixXd::Constant(k, k, -1);
  double total_demand = 0.0;
  for (int a = 0; a < k; ++a) {
    int i = island[a];
    if (problem.gen_cap(i) > 0)
      source_arc[a] = net.add_arc(source, a, problem.gen_cap(i));
    if (problem.demand(i) > 0) {
      sink_arc[a] = net.add_arc(a, sink, problem.demand(i));
      total_demand += problem.demand(i);
    }
    for (int b = a + 1; b < k; ++b) {
      double cap = problem.line_cap(island[a], island[b]);
      if (cap > 0) {
        arc_id(a, b) = net.add_arc(a, b, cap);
        arc_id(b, a) = net.add_arc(b, a, cap);
      }
    }
  }

  double delivered = net.run(source, sink);
  ShedResult result;
  result.shed = std::max(0.0, total_demand - delivered);
  result.dispatch = Eigen::VectorXd::Zero(k);
  result.served = Eigen::VectorXd::Zero(k);
  result.net_flow = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a) {
    if (source_arc[a] >= 0)
      result.dispatch(a) = std::max(0.0, net.flow_on(source_arc[a]));
    if (sink_arc[a] >= 0)
      result.served(a) = std::max(0.0, net.flow_on(sink_arc[a]));
    for (int b = a + 1; b < k; ++b)
      if (arc_id(a, b) >= 0) {
        double f = net.flow_on(static_cast<int>(arc_id(a, b))) -
                   net.flow_on(static_cast<int>(arc_id(b, a)));
        result.net_flow(a, b) = f;
        result.net_flow(b, a) = -f;
      }
  }
  return result;
}

ShedResult shed_max_flow(const PowerGrid& grid,
                         const std::vector<int>& island) {
  return shed_max_flow(shed_problem_from(grid), island);
}

double generation_reserve(const ShedProblem& problem,
                          const std::vector<int>& island,
                          const Eigen::VectorXd& dispatch) {
  if (dispatch.size() != static_cast<long>(island.size()))
    throw std::invalid_argument("dispatch size does not match island");
  double reserve = 0.0;
  for (size_t a = 0; a < island.size(); ++a) {
    double cap = problem.gen_cap(island[a]);
    if (dispatch(a) > cap + 1e-6 * std::max(1.0, cap))
      throw std::invalid_argument("dispatch exceeds generator capacity");
    reserve += cap - std::min(dispatch(a), cap);
  }
  return reserve;
}

double regressed_shed(double shed_mf, double reserve, double volume,
                      const RegressionParams& params) {
  return std::max(0.0, shed_mf - params.a * reserve + params.b * volume);
}

double excess_load(const ShedProblem& problem,
                   const std::vector<int>& island) {
  double p = 0.0;
  for (int v : island) p += problem.served(v) - problem.gen_out(v);
  return std::max(0.0, p);
}

} // namespace islanding
