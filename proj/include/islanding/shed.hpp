#pragma once

#include <vector>

#include <Eigen/Dense>

#include "islanding/grid.hpp"

namespace islanding {

// Fitted correction turning the max-flow shed estimate into a predictor of
// the dispatch-level shed: max[S - a * reserve + b * volume, 0].
struct RegressionParams {
  double a = 0.0;
  double b = 0.0;
};

// Node-level quantities the shed estimators need; works for both detailed
// grids and aggregated super-node grids.
struct ShedProblem {
  Eigen::VectorXd gen_cap;  // G_i, MW (0 for pure load buses)
  Eigen::VectorXd gen_out;  // g_i, MW currently produced
  Eigen::VectorXd demand;   // D_i, MW
  Eigen::VectorXd served;   // d_i, MW currently served
  Eigen::MatrixXd line_cap; // symmetric per-pair flow limits, MW

  int n() const { return static_cast<int>(demand.size()); }
};

ShedProblem shed_problem_from(const PowerGrid& grid);

struct ShedResult {
  double shed = 0.0;        // island demand minus deliverable supply
  Eigen::VectorXd dispatch; // g*_i per island member (island order)
  Eigen::VectorXd served;   // delivered load per island member
  Eigen::MatrixXd net_flow; // net line flow between members (island order)
};

// Max-flow relaxation of the island's dispatch problem: a super-source feeds
// the generators (capacity G_i), loads drain to a super-sink (capacity D_i),
// and each line carries up to its limit in either direction. The shed is the
// demand the optimal flow cannot deliver.
ShedResult shed_max_flow(const ShedProblem& problem,
                         const std::vector<int>& island);
ShedResult shed_max_flow(const PowerGrid& grid, const std::vector<int>& island);

// Capacity the max-flow dispatch leaves unused: sum of G_i - g*_i.
double generation_reserve(const ShedProblem& problem,
                          const std::vector<int>& island,
                          const Eigen::VectorXd& dispatch);

// max[shed - a * reserve + b * volume, 0]
double regressed_shed(double shed_mf, double reserve, double volume,
                      const RegressionParams& params);

// Excess load max[p(s), 0] with p(s) = sum of served load minus current
// output over the island: the cheapest possible shed.
double excess_load(const ShedProblem& problem, const std::vector<int>& island);

} // namespace islanding
