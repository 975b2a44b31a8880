#include "islanding/aggregate.hpp"

#include <stdexcept>
#include <string>

namespace islanding {

AggregatedGrid aggregate_grid(const PowerGrid& grid, const DerivedMatrices& m,
                              const Partition& p, const MetricConfig& cfg) {
  const int n = grid.n();
  if (!p.covers(n))
    throw std::invalid_argument("partition does not cover the grid");
  for (size_t k = 0; k < p.islands.size(); ++k)
    if (induced_components(p.islands[k], m.topology).size() != 1)
      throw std::invalid_argument("island " + std::to_string(k) +
                                  " is disconnected in the line topology");

  MergeMap map;
  map.node_of = p.labels(n);
  map.members = p.islands;

  AggregatedGrid agg;
  agg.members = p.islands;
  const int k = static_cast<int>(p.islands.size());

  ShedProblem nodal = shed_problem_from(grid);
  agg.gen_cap = contract_vector(nodal.gen_cap, map);
  agg.gen_out = contract_vector(nodal.gen_out, map);
  agg.demand = contract_vector(nodal.demand, map);
  agg.served = contract_vector(nodal.served, map);
  agg.injection = agg.served - agg.gen_out;
  agg.volume = contract_vector(m.volumes, map);

  agg.flow_abs = contract_matrix(m.P_abs, map);
  agg.limit = contract_matrix(nodal.line_cap, map);
  agg.coupling = contract_matrix(m.Phi_full, map);
  const Eigen::MatrixXd* delta = m.Delta ? &*m.Delta : nullptr;
  agg.combined = contract_matrix(
      combined_matrix(m.Phi_full, m.P_abs, delta, cfg.alpha_C, cfg.alpha_D,
                      cfg.alpha_ECI),
      map);

  // Net signed flow between super-nodes; the detailed storage keeps the flow
  // from i to j in the strictly lower triangle.
  agg.flow_signed = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      double f = m.P_signed(i, j); // MW from i to j
      if (f == 0.0) continue;
      int a = map.node_of[i], b = map.node_of[j];
      if (a == b) continue;
      agg.flow_signed(a, b) += f;
      agg.flow_signed(b, a) -= f;
    }
  return agg;
}

ShedProblem shed_problem_from(const AggregatedGrid& agg) {
  ShedProblem p;
  p.gen_cap = agg.gen_cap;
  p.gen_out = agg.gen_out;
  p.demand = agg.demand;
  p.served = agg.served;
  p.line_cap = agg.limit;
  return p;
}

Partition lift_partition(const Partition& agg_partition,
                         const std::vector<std::vector<int>>& members) {
  const int k = static_cast<int>(members.size());
  if (!agg_partition.covers(k))
    throw std::invalid_argument(
        "aggregated partition does not cover the super-nodes");
  std::vector<std::vector<int>> islands;
  islands.reserve(agg_partition.islands.size());
  for (const auto& agg_island : agg_partition.islands) {
    std::vector<int> buses;
    for (int node : agg_island)
      buses.insert(buses.end(), members[node].begin(), members[node].end());
    islands.push_back(std::move(buses));
  }
  Partition lifted = Partition::of(std::move(islands), agg_partition.origin);
  return lifted;
}

} // namespace islanding
