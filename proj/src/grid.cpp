#include "islanding/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "islanding/matrices.hpp"

namespace islanding {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

int PowerGrid::internal_index(int external_id) const {
  for (int i = 0; i < n(); ++i)
    if (external_ids[i] == external_id) return i;
  throw CaseError("unknown bus id " + std::to_string(external_id));
}

namespace {

void check_connected(int n, const std::vector<Line>& lines) {
  if (n == 0) throw CaseError("case has no buses");
  std::vector<std::vector<int>> adj(n);
  for (const auto& l : lines) {
    adj[l.from].push_back(l.to);
    adj[l.to].push_back(l.from);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : adj[v])
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        stack.push_back(u);
      }
  }
  if (reached != n) {
    int components = 1;
    for (int v = 0; v < n; ++v)
      if (!seen[v]) {
        ++components;
        std::vector<int> s{v};
        seen[v] = 1;
        while (!s.empty()) {
          int x = s.back();
          s.pop_back();
          for (int u : adj[x])
            if (!seen[u]) {
              seen[u] = 1;
              s.push_back(u);
            }
        }
      }
    throw CaseError("grid graph is disconnected: " +
                    std::to_string(components) + " components");
  }
}

double get_number(const json& obj, const char* key, bool required,
                  double fallback = 0.0) {
  if (!obj.contains(key)) {
    if (required) throw CaseError(std::string("missing field \"") + key + "\"");
    return fallback;
  }
  if (!obj[key].is_number())
    throw CaseError(std::string("field \"") + key + "\" is not a number");
  return obj[key].get<double>();
}

} // namespace

PowerGrid parse_case(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw CaseError(std::string("malformed case document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("bus") || !doc.contains("branch"))
    throw CaseError("case document must be an object with bus/branch arrays");

  PowerGrid grid;
  grid.base_mva = get_number(doc, "baseMVA", false, 100.0);

  // First pass: external buses in file order.
  struct RawBus {
    Bus bus;
    bool has_gen = false;
    Generator gen;
  };
  std::map<int, RawBus> by_id;
  std::vector<int> file_order;
  for (const auto& jb : doc["bus"]) {
    RawBus rb;
    rb.bus.id = static_cast<int>(get_number(jb, "id", true));
    rb.bus.demand = get_number(jb, "Pd", false, 0.0);
    if (rb.bus.demand < 0)
      throw CaseError("negative demand at bus " + std::to_string(rb.bus.id));
    rb.bus.served_load = rb.bus.demand;
    rb.bus.voltage = get_number(jb, "Vm", false, 1.0);
    if (rb.bus.voltage <= 0)
      throw CaseError("nonpositive voltage at bus " + std::to_string(rb.bus.id));
    rb.bus.angle = get_number(jb, "Va", false, 0.0);
    if (by_id.count(rb.bus.id))
      throw CaseError("duplicate bus id " + std::to_string(rb.bus.id));
    by_id[rb.bus.id] = rb;
    file_order.push_back(rb.bus.id);
  }

  for (const auto& jg : doc.value("gen", json::array())) {
    int bus_id = static_cast<int>(get_number(jg, "bus", true));
    auto it = by_id.find(bus_id);
    if (it == by_id.end())
      throw CaseError("generator references unknown bus " +
                      std::to_string(bus_id));
    if (it->second.has_gen)
      throw CaseError("more than one generator at bus " +
                      std::to_string(bus_id));
    Generator g;
    g.current_output = get_number(jg, "Pg", false, 0.0);
    g.max_output = get_number(jg, "Pmax", false, g.current_output);
    g.inertia = get_number(jg, "H", false, 1.0);
    if (g.inertia <= 0)
      throw CaseError("nonpositive inertia at bus " + std::to_string(bus_id));
    if (g.current_output < 0 || g.current_output > g.max_output + 1e-9)
      throw CaseError("generator output outside [0, Pmax] at bus " +
                      std::to_string(bus_id));
    it->second.has_gen = true;
    it->second.gen = g;
  }

  // Canonical ordering: generator buses first, each block sorted by id.
  std::vector<int> gen_ids, load_ids;
  for (int id : file_order)
    (by_id[id].has_gen ? gen_ids : load_ids).push_back(id);
  std::sort(gen_ids.begin(), gen_ids.end());
  std::sort(load_ids.begin(), load_ids.end());

  std::map<int, int> internal;
  for (int id : gen_ids) {
    internal[id] = grid.n();
    Bus b = by_id[id].bus;
    grid.buses.push_back(b);
    grid.external_ids.push_back(id);
    Generator g = by_id[id].gen;
    g.bus = grid.n() - 1;
    grid.generators.push_back(g);
  }
  for (int id : load_ids) {
    internal[id] = grid.n();
    grid.buses.push_back(by_id[id].bus);
    grid.external_ids.push_back(id);
  }

  std::set<std::pair<int, int>> seen_pairs;
  bool all_flows = true;
  for (const auto& jl : doc["branch"]) {
    Line l;
    int from_id = static_cast<int>(get_number(jl, "from", true));
    int to_id = static_cast<int>(get_number(jl, "to", true));
    auto fi = internal.find(from_id), ti = internal.find(to_id);
    if (fi == internal.end())
      throw CaseError("branch references unknown bus " +
                      std::to_string(from_id));
    if (ti == internal.end())
      throw CaseError("branch references unknown bus " + std::to_string(to_id));
    l.from = fi->second;
    l.to = ti->second;
    if (l.from == l.to)
      throw CaseError("branch connects bus " + std::to_string(from_id) +
                      " to itself");
    auto key = std::minmax(l.from, l.to);
    if (!seen_pairs.insert({key.first, key.second}).second)
      throw CaseError("duplicate line between buses " +
                      std::to_string(from_id) + " and " + std::to_string(to_id));
    l.reactance = get_number(jl, "x", true);
    if (l.reactance <= 0)
      throw CaseError("nonpositive reactance on line " +
                      std::to_string(from_id) + "-" + std::to_string(to_id));
    l.flow_limit = get_number(jl, "rateA", false, 0.0);
    if (l.flow_limit < 0)
      throw CaseError("negative flow limit on line " + std::to_string(from_id) +
                      "-" + std::to_string(to_id));
    if (jl.contains("Pf")) {
      l.current_flow = get_number(jl, "Pf", true);
      l.had_input_flow = true;
    } else {
      all_flows = false;
    }
    grid.lines.push_back(l);
  }

  check_connected(grid.n(), grid.lines);

  // Input flows are taken verbatim when the case carries them for every
  // line; otherwise a DC solution supplies all of them.
  if (!all_flows && grid.m() > 0) {
    int slack = grid.generators.empty() ? 0 : grid.generators.front().bus;
    Eigen::MatrixXd flows = dc_power_flow(grid, slack);
    for (auto& l : grid.lines) {
      l.current_flow = flows(l.from, l.to);
      l.had_input_flow = false;
    }
  }
  return grid;
}

std::string serialize_case(const PowerGrid& grid) {
  ordered_json doc;
  doc["baseMVA"] = grid.base_mva;
  doc["bus"] = ordered_json::array();
  for (int i = 0; i < grid.n(); ++i) {
    const Bus& b = grid.buses[i];
    ordered_json jb;
    jb["id"] = grid.external_ids[i];
    jb["Pd"] = b.demand;
    jb["Vm"] = b.voltage;
    jb["Va"] = b.angle;
    doc["bus"].push_back(jb);
  }
  doc["gen"] = ordered_json::array();
  for (const auto& g : grid.generators) {
    ordered_json jg;
    jg["bus"] = grid.external_ids[g.bus];
    jg["Pg"] = g.current_output;
    jg["Pmax"] = g.max_output;
    jg["H"] = g.inertia;
    doc["gen"].push_back(jg);
  }
  doc["branch"] = ordered_json::array();
  for (const auto& l : grid.lines) {
    ordered_json jl;
    jl["from"] = grid.external_ids[l.from];
    jl["to"] = grid.external_ids[l.to];
    jl["x"] = l.reactance;
    jl["rateA"] = l.flow_limit;
    jl["Pf"] = l.current_flow;
    doc["branch"].push_back(jl);
  }
  return doc.dump(2) + "\n";
}

namespace {

// Pulls the numeric rows of one `mpc.<name> = [ ... ];` block.
std::vector<std::vector<double>> matlab_matrix(const std::string& text,
                                               const std::string& name) {
  auto pos = text.find("mpc." + name);
  if (pos == std::string::npos)
    throw CaseError("MATPOWER case lacks mpc." + name);
  pos = text.find('[', pos);
  auto end = text.find(']', pos);
  if (pos == std::string::npos || end == std::string::npos)
    throw CaseError("unterminated matrix mpc." + name);
  std::string body = text.substr(pos + 1, end - pos - 1);
  // Strip comments.
  std::string clean;
  bool comment = false;
  for (char c : body) {
    if (c == '%') comment = true;
    if (c == '\n') comment = false;
    clean += comment ? ' ' : c;
  }
  std::vector<std::vector<double>> rows;
  std::stringstream lines(clean);
  std::string row_text;
  while (std::getline(lines, row_text, ';')) {
    std::stringstream fields(row_text);
    std::vector<double> row;
    double v;
    while (fields >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(row);
  }
  return rows;
}

double matlab_scalar(const std::string& text, const std::string& name,
                     double fallback) {
  auto pos = text.find("mpc." + name);
  if (pos == std::string::npos) return fallback;
  pos = text.find('=', pos);
  if (pos == std::string::npos) return fallback;
  return std::strtod(text.c_str() + pos + 1, nullptr);
}

} // namespace

std::string matpower_to_json(const std::string& matlab_case) {
  constexpr double kPi = 3.14159265358979323846;
  auto bus_rows = matlab_matrix(matlab_case, "bus");
  auto gen_rows = matlab_matrix(matlab_case, "gen");
  auto branch_rows = matlab_matrix(matlab_case, "branch");

  ordered_json doc;
  doc["baseMVA"] = matlab_scalar(matlab_case, "baseMVA", 100.0);

  double total_scale = 0.0; // stands in for "unlimited" line ratings
  for (const auto& r : bus_rows) total_scale += std::abs(r.size() > 2 ? r[2] : 0);
  for (const auto& r : gen_rows) total_scale += std::abs(r.size() > 8 ? r[8] : 0);
  if (total_scale <= 0) total_scale = 1e6;

  doc["bus"] = ordered_json::array();
  for (const auto& r : bus_rows) {
    if (r.size() < 9) throw CaseError("short MATPOWER bus row");
    ordered_json jb;
    jb["id"] = static_cast<int>(r[0]);
    jb["Pd"] = std::max(0.0, r[2]);
    jb["Vm"] = r[7] > 0 ? r[7] : 1.0;
    jb["Va"] = r[8] * kPi / 180.0;
    doc["bus"].push_back(jb);
  }

  // MATPOWER allows several in-service units per bus; the schema wants one
  // generator per bus, so co-located units are summed.
  std::map<int, std::pair<double, double>> units; // bus -> (Pg, Pmax)
  for (const auto& r : gen_rows) {
    if (r.size() < 9) throw CaseError("short MATPOWER gen row");
    bool in_service = r.size() < 8 || r[7] > 0;
    if (!in_service) continue;
    auto& u = units[static_cast<int>(r[0])];
    u.first += std::max(0.0, r[1]);
    u.second += std::max(0.0, r[8]);
  }
  doc["gen"] = ordered_json::array();
  for (const auto& [bus, u] : units) {
    ordered_json jg;
    jg["bus"] = bus;
    jg["Pg"] = std::min(u.first, u.second);
    jg["Pmax"] = u.second;
    doc["gen"].push_back(jg);
  }

  doc["branch"] = ordered_json::array();
  std::map<std::pair<int, int>, ordered_json> merged; // parallel circuits
  for (const auto& r : branch_rows) {
    if (r.size() < 6) throw CaseError("short MATPOWER branch row");
    bool in_service = r.size() < 11 || r[10] > 0;
    if (!in_service) continue;
    int f = static_cast<int>(r[0]), t = static_cast<int>(r[1]);
    double x = r[3];
    double rate = r[5] > 0 ? r[5] : total_scale;
    auto key = std::minmax(f, t);
    auto it = merged.find(key);
    if (it == merged.end()) {
      ordered_json jl;
      jl["from"] = f;
      jl["to"] = t;
      jl["x"] = x;
      jl["rateA"] = rate;
      merged[key] = jl;
    } else {
      // Parallel circuits combine like parallel reactances; ratings add.
      double x0 = it->second["x"].get<double>();
      it->second["x"] = (x0 * x) / (x0 + x);
      it->second["rateA"] = it->second["rateA"].get<double>() + rate;
    }
  }
  for (auto& [key, jl] : merged) doc["branch"].push_back(jl);
  return doc.dump(2) + "\n";
}

PowerGrid load_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CaseError("cannot open case file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  if (path.size() > 2 && path.substr(path.size() - 2) == ".m")
    return parse_case(matpower_to_json(text));
  return parse_case(text);
}

} // namespace islanding
