#pragma once

// Shared fixtures and independent oracles for the unit and acceptance tests.
// Everything here is deliberately implemented from first principles (BFS
// augmenting paths, Floyd-Warshall, restricted-growth enumeration) so test
// expectations never lean on the library code they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "islanding/grid.hpp"
#include "islanding/partition.hpp"
#include "islanding/shed.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
  return std::string(ISLANDING_DATA_DIR) + "/" + name;
}

// The 9-bus fixture, parsed once.
inline const islanding::PowerGrid& case9() {
  static const islanding::PowerGrid grid =
      islanding::load_case_file(data_path("case9.json"));
  return grid;
}

// ---------------------------------------------------------------------------
// Seeded random grid generation.
// ---------------------------------------------------------------------------

struct GridSpec {
  int n = 10;
  int n_g = 3;
  int extra_edges = 3;
  unsigned seed = 1;
  // g_i = G_i when set (makes the excess-load <= max-flow-shed chain hold);
  // otherwise G_i = g_i * (1 + cap_headroom).
  bool dispatch_at_capacity = false;
  double cap_headroom = 0.4;
  // Line rating = max(margin * |realized flow|, 1.0). Values < 1 produce
  // overloaded lines and force shedding inside islands.
  double line_margin = 1.3;
};

// Builds a connected random case in two passes: first with unbounded line
// ratings so the parser's DC solve realizes the flows, then re-emitted with
// ratings scaled to those flows. Returns the JSON text of the final case.
inline std::string random_grid_json(const GridSpec& spec) {
  using nlohmann::ordered_json;
  std::mt19937 rng(spec.seed);
  std::uniform_real_distribution<double> demand_dist(10.0, 100.0);
  std::uniform_real_distribution<double> share_dist(0.5, 1.5);
  std::uniform_real_distribution<double> x_dist(0.02, 0.2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ordered_json doc;
  doc["baseMVA"] = 100.0;
  double total_demand = 0.0;
  for (int i = 0; i < spec.n; ++i) {
    ordered_json b;
    b["id"] = i + 1;
    double demand = 0.0;
    if (i >= spec.n_g)
      demand = demand_dist(rng);
    else if (unit(rng) < 0.3)
      demand = 0.5 * demand_dist(rng);
    b["Pd"] = demand;
    total_demand += demand;
    b["Vm"] = 1.0;
    b["Va"] = 0.0;
    doc["bus"].push_back(b);
  }
  std::vector<double> shares(spec.n_g);
  double share_sum = 0.0;
  for (double& s : shares) {
    s = share_dist(rng);
    share_sum += s;
  }
  for (int g = 0; g < spec.n_g; ++g) {
    ordered_json jg;
    jg["bus"] = g + 1;
    double pg = total_demand * shares[g] / share_sum;
    jg["Pg"] = pg;
    jg["Pmax"] = spec.dispatch_at_capacity ? pg : pg * (1.0 + spec.cap_headroom);
    jg["H"] = 1.0;
    doc["gen"].push_back(jg);
  }
  // Random spanning tree, then extra chords between distinct pairs.
  std::vector<std::pair<int, int>> edges;
  for (int v = 1; v < spec.n; ++v) {
    std::uniform_int_distribution<int> pick(0, v - 1);
    edges.emplace_back(pick(rng), v);
  }
  auto has_edge = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    for (auto& e : edges)
      if (e.first == a && e.second == b) return true;
    return false;
  };
  std::uniform_int_distribution<int> vert(0, spec.n - 1);
  for (int added = 0, tries = 0; added < spec.extra_edges && tries < 200;
       ++tries) {
    int a = vert(rng), b = vert(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (has_edge(a, b)) continue;
    edges.emplace_back(a, b);
    ++added;
  }
  for (auto& e : edges) {
    ordered_json jl;
    jl["from"] = e.first + 1;
    jl["to"] = e.second + 1;
    jl["x"] = x_dist(rng);
    jl["rateA"] = 1e6;
    doc["branch"].push_back(jl);
  }

  // Second pass: parse (the DC solve fills flows), then scale the ratings.
  islanding::PowerGrid first = islanding::parse_case(doc.dump());
  ordered_json final_doc = ordered_json::parse(islanding::serialize_case(first));
  for (auto& jl : final_doc["branch"]) {
    double flow = std::abs(jl["Pf"].get<double>());
    jl["rateA"] = std::max(spec.line_margin * flow, 1.0);
    jl.erase("Pf"); // let the parser re-solve: keeps flows derived, not input
  }
  return final_doc.dump();
}

inline islanding::PowerGrid random_grid(const GridSpec& spec) {
  return islanding::parse_case(random_grid_json(spec));
}

// ---------------------------------------------------------------------------
// Random weighted graphs (adjacency only) for cut and spectral tests.
// ---------------------------------------------------------------------------

// Connected symmetric nonnegative adjacency: a random spanning tree plus
// chords appearing with probability `density`, weights in [0.5, 3].
inline Eigen::MatrixXd random_adjacency(int n, double density,
                                        std::mt19937& rng) {
  std::uniform_real_distribution<double> weight(0.5, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> pick(0, v - 1);
    int u = pick(rng);
    A(u, v) = A(v, u) = weight(rng);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (A(i, j) == 0.0 && unit(rng) < density) A(i, j) = A(j, i) = weight(rng);
  return A;
}

// ---------------------------------------------------------------------------
// Independent oracles.
// ---------------------------------------------------------------------------

// Max flow on a dense capacity matrix via BFS augmenting paths.
inline double max_flow_bfs(Eigen::MatrixXd cap, int source, int sink) {
  const int n = static_cast<int>(cap.rows());
  double total = 0.0;
  for (;;) {
    std::vector<int> parent(n, -1);
    parent[source] = source;
    std::vector<int> queue{source};
    for (size_t head = 0; head < queue.size() && parent[sink] < 0; ++head) {
      int u = queue[head];
      for (int v = 0; v < n; ++v)
        if (parent[v] < 0 && cap(u, v) > 1e-11) {
          parent[v] = u;
          queue.push_back(v);
        }
    }
    if (parent[sink] < 0) return total;
    double bottleneck = std::numeric_limits<double>::infinity();
    for (int v = sink; v != source; v = parent[v])
      bottleneck = std::min(bottleneck, cap(parent[v], v));
    for (int v = sink; v != source; v = parent[v]) {
      cap(parent[v], v) -= bottleneck;
      cap(v, parent[v]) += bottleneck;
    }
    total += bottleneck;
  }
}

// Independent shed estimate: super-source feeds generators at G_i, island
// buses drain demand D_i to a super-sink, lines carry their limit both ways.
inline double shed_oracle(const islanding::ShedProblem& pb,
                          const std::vector<int>& island) {
  const int k = static_cast<int>(island.size());
  Eigen::MatrixXd cap = Eigen::MatrixXd::Zero(k + 2, k + 2);
  const int source = k, sink = k + 1;
  double demand = 0.0;
  for (int a = 0; a < k; ++a) {
    cap(source, a) = pb.gen_cap(island[a]);
    cap(a, sink) = pb.demand(island[a]);
    demand += pb.demand(island[a]);
    for (int b = 0; b < k; ++b)
      if (a != b) cap(a, b) = pb.line_cap(island[a], island[b]);
  }
  return demand - max_flow_bfs(cap, source, sink);
}

// All-pairs shortest paths; `lengths` holds edge lengths with +inf for
// non-edges and 0 on the diagonal.
inline Eigen::MatrixXd floyd_warshall(Eigen::MatrixXd lengths) {
  const int n = static_cast<int>(lengths.rows());
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        lengths(i, j) = std::min(lengths(i, j), lengths(i, k) + lengths(k, j));
  return lengths;
}

// BFS connectivity of an induced vertex subset (entries > 0 are edges).
inline bool is_connected_subset(const Eigen::MatrixXd& adj,
                                const std::vector<int>& verts) {
  if (verts.empty()) return false;
  std::vector<int> queue{verts[0]};
  std::vector<bool> seen(adj.rows(), false);
  seen[verts[0]] = true;
  size_t reached = 1;
  for (size_t head = 0; head < queue.size(); ++head) {
    int u = queue[head];
    for (int v : verts)
      if (!seen[v] && adj(u, v) > 0.0) {
        seen[v] = true;
        queue.push_back(v);
        ++reached;
      }
  }
  return reached == verts.size();
}

// ---------------------------------------------------------------------------
// Partition enumeration (restricted-growth strings).
// ---------------------------------------------------------------------------

// Visits every partition of {0..n-1} into at most `max_parts` nonempty parts,
// passing the label vector (labels[i] = part of vertex i, parts numbered by
// first appearance).
inline void for_each_partition(
    int n, int max_parts,
    const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> labels(n, 0);
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (i == n) {
      visit(labels);
      return;
    }
    int top = std::min(used + 1, max_parts);
    for (int lab = 0; lab < top; ++lab) {
      labels[i] = lab;
      rec(i + 1, std::max(used, lab + 1));
    }
  };
  rec(0, 0);
}

inline islanding::Partition partition_from_labels(const std::vector<int>& labels) {
  int parts = 0;
  for (int lab : labels) parts = std::max(parts, lab + 1);
  std::vector<std::vector<int>> sets(parts);
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    sets[labels[i]].push_back(i);
  return islanding::Partition::of(std::move(sets));
}

// Direct double-sum cut of one vertex set, independent of the library.
inline double cut_oracle(const Eigen::MatrixXd& A, const std::vector<int>& s,
                         int n) {
  std::vector<bool> in(n, false);
  for (int v : s) in[v] = true;
  double sum = 0.0;
  for (int i : s)
    for (int j = 0; j < n; ++j)
      if (!in[j]) sum += A(i, j);
  return sum;
}

} // namespace testutil
