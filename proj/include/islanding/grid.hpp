#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace islanding {

// Malformed or inconsistent case input.
struct CaseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A partitioning request that provably has no feasible answer.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure (eigensolver non-convergence, singular system, ...).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Bus {
  int id = 0;                // external id from the case file
  double demand = 0.0;       // D_i, MW
  double served_load = 0.0;  // d_i, MW currently served (defaults to demand)
  double voltage = 1.0;      // |V_i|, per unit
  double angle = 0.0;        // theta_i, radians
};

struct Generator {
  int bus = 0;                 // internal bus index
  double max_output = 0.0;     // G_i, MW
  double current_output = 0.0; // g_i, MW
  double inertia = 1.0;        // H_i, seconds
};

struct Line {
  int from = 0;              // internal bus index
  int to = 0;                // internal bus index
  double reactance = 0.0;    // x, per unit
  double flow_limit = 0.0;   // MW
  double current_flow = 0.0; // MW, signed, positive from -> to
  bool had_input_flow = false;
};

// Immutable snapshot of a grid. Buses are reordered so the generator buses
// come first (generators[k] sits at internal bus k); `external_ids` maps an
// internal index back to the id used by the case file. All line endpoints
// are internal indices.
struct PowerGrid {
  std::vector<Bus> buses;
  std::vector<Generator> generators;
  std::vector<Line> lines;
  double base_mva = 100.0;
  std::vector<int> external_ids;

  int n() const { return static_cast<int>(buses.size()); }
  int n_g() const { return static_cast<int>(generators.size()); }
  int m() const { return static_cast<int>(lines.size()); }

  // Internal index for an external id; throws CaseError if unknown.
  int internal_index(int external_id) const;
};

// Parses the JSON case document, applies the canonical bus ordering, checks
// structural invariants (connectivity, unique generator per bus, ...), and
// fills missing line flows with a DC power flow solution.
PowerGrid parse_case(const std::string& text);

// Canonical JSON form; parse_case(serialize_case(g)) reproduces g exactly.
std::string serialize_case(const PowerGrid& grid);

// Translates a MATPOWER-style .m case body into the JSON case schema.
std::string matpower_to_json(const std::string& matlab_case);

// Reads a whole file and parses it (JSON directly, .m via the converter).
PowerGrid load_case_file(const std::string& path);

} // namespace islanding
