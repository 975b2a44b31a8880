#include "islanding/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace islanding {

namespace {

using nlohmann::ordered_json;

std::string format_mw(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", value);
  return buf;
}

std::string csv_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

const char* kPalette[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3",
                          "#ff7f00", "#a65628", "#f781bf", "#999999",
                          "#66c2a5", "#ffd92f"};
constexpr int kPaletteSize = 10;

ordered_json metrics_json(const MetricReport& m) {
  ordered_json j;
  j["coherency_c"] = m.coherency_C;
  j["disruption_d"] = m.disruption_D;
  if (m.eci)
    j["eci"] = *m.eci;
  else
    j["eci"] = nullptr;
  j["excess_load"] = m.excess_load;
  j["shed_mf"] = m.shed_mf;
  j["cost_f"] = m.cost_F;
  return j;
}

ordered_json config_json(const IslandingConfig& cfg,
                         const std::vector<StrategyId>& enabled) {
  ordered_json j;
  j["k"] = cfg.K;
  j["max_volume_frac"] = cfg.max_volume_frac;
  j["alpha_c"] = cfg.alpha_C;
  j["alpha_d"] = cfg.alpha_D;
  j["alpha_eci"] = cfg.alpha_ECI;
  j["granularity"] = {cfg.r1, cfg.r2, cfg.r3, cfg.r4};
  ordered_json names = ordered_json::array();
  for (StrategyId id : enabled) names.push_back(strategy_name(id));
  j["strategies"] = names;
  j["kmax"] = cfg.k_max;
  j["time_limit_s"] = cfg.time_limit_s;
  j["regress"] = {cfg.regression.a, cfg.regression.b};
  j["volume_mode"] =
      cfg.volume_mode == VolumeMode::AbsFlow ? "absflow" : "capacity";
  return j;
}

ordered_json teared_lines_json(const PowerGrid& grid, const Partition& p) {
  auto labels = p.labels(grid.n());
  ordered_json lines = ordered_json::array();
  for (const auto& l : grid.lines) {
    if (labels[l.from] == labels[l.to]) continue;
    ordered_json entry;
    entry["from"] = grid.external_ids[l.from];
    entry["to"] = grid.external_ids[l.to];
    entry["flow_mw"] = std::abs(l.current_flow);
    lines.push_back(std::move(entry));
  }
  return lines;
}

} // namespace

std::vector<std::vector<int>> external_islands(const PowerGrid& grid,
                                               const Partition& p) {
  std::vector<std::vector<int>> out;
  out.reserve(p.islands.size());
  for (const auto& island : p.islands) {
    std::vector<int> ids;
    ids.reserve(island.size());
    for (int v : island) {
      if (v < 0 || v >= grid.n())
        throw std::out_of_range("partition vertex outside the grid");
      ids.push_back(grid.external_ids[v]);
    }
    std::sort(ids.begin(), ids.end());
    out.push_back(std::move(ids));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Partition partition_from_external(const PowerGrid& grid,
                                  const std::vector<std::vector<int>>& ids) {
  std::vector<std::vector<int>> internal;
  internal.reserve(ids.size());
  for (const auto& island : ids) {
    std::vector<int> verts;
    verts.reserve(island.size());
    for (int id : island) verts.push_back(grid.internal_index(id));
    internal.push_back(std::move(verts));
  }
  return Partition::of(std::move(internal));
}

Partition load_partition_file(const PowerGrid& grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CaseError("cannot open partition file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw CaseError("malformed partition file: " + std::string(e.what()));
  }
  if (!doc.is_object() || !doc.contains("islands") ||
      !doc["islands"].is_array())
    throw CaseError("partition file must hold an \"islands\" array");
  std::vector<std::vector<int>> ids;
  for (const auto& island : doc["islands"]) {
    if (!island.is_array())
      throw CaseError("every island must be an array of bus ids");
    std::vector<int> one;
    for (const auto& v : island) {
      if (!v.is_number_integer())
        throw CaseError("bus ids must be integers");
      one.push_back(v.get<int>());
    }
    ids.push_back(std::move(one));
  }
  try {
    return partition_from_external(grid, ids);
  } catch (const std::invalid_argument& e) {
    throw CaseError(std::string("invalid partition: ") + e.what());
  }
}

nlohmann::ordered_json build_report(const std::string& case_id,
                                    const PowerGrid& grid,
                                    const IslandingConfig& cfg,
                                    const PipelineResult& result) {
  std::vector<StrategyId> enabled;
  for (const auto& d : result.diagnostics) enabled.push_back(d.id);
  if (enabled.empty() && !cfg.strategies.empty()) enabled = cfg.strategies;

  ordered_json j;
  j["case"] = case_id;
  j["config"] = config_json(cfg, enabled);
  j["total_volume"] = result.total_volume;
  j["max_island_volume"] = result.W;
  j["winner"] =
      result.winner ? ordered_json(strategy_name(*result.winner))
                    : ordered_json(nullptr);
  j["islands"] = external_islands(grid, result.best);
  j["metrics"] = metrics_json(result.metrics);
  j["teared_lines"] = teared_lines_json(grid, result.best);

  ordered_json table = ordered_json::array();
  for (const auto& d : result.diagnostics) {
    ordered_json row;
    row["id"] = strategy_name(d.id);
    row["feasible"] = d.feasible;
    if (d.feasible) {
      row["islands"] = d.islands;
      row["cost"] = d.cost;
      row["balanced"] = d.balanced;
      row["optimal"] = d.optimal;
      row["gap"] = d.gap;
      row["scheme"] = external_islands(grid, d.final_partition);
      row["metrics"] = metrics_json(d.metrics);
    }
    if (!d.note.empty()) row["note"] = d.note;
    table.push_back(std::move(row));
  }
  j["strategies"] = table;
  return j;
}

nlohmann::ordered_json build_score_report(const std::string& case_id,
                                          const PowerGrid& grid,
                                          const IslandingConfig& cfg,
                                          const Partition& p,
                                          const ScoredPartition& scored) {
  ordered_json j;
  j["case"] = case_id;
  j["islands"] = external_islands(grid, p);
  j["metrics"] = metrics_json(scored.metrics);
  j["balanced"] = scored.balanced;
  j["max_island_volume"] = scored.W;
  j["teared_lines"] = teared_lines_json(grid, p);
  (void)cfg;
  return j;
}

std::string render_metrics_csv(
    const std::vector<StrategyDiagnostics>& diagnostics) {
  std::string csv =
      "strategy,islands,C,D,S_EL,S_MF,F,balanced,ms_step1,ms_step2\n";
  for (const auto& d : diagnostics) {
    csv += strategy_name(d.id);
    csv += ',';
    if (d.feasible) {
      csv += std::to_string(d.islands) + ',';
      csv += csv_number(d.metrics.coherency_C) + ',';
      csv += csv_number(d.metrics.disruption_D) + ',';
      csv += csv_number(d.metrics.excess_load) + ',';
      csv += csv_number(d.metrics.shed_mf) + ',';
      csv += csv_number(d.metrics.cost_F) + ',';
      csv += d.balanced ? "1," : "0,";
    } else {
      csv += ",,,,,,0,";
    }
    csv += csv_number(d.ms_step1) + ',';
    csv += csv_number(d.ms_step2) + '\n';
  }
  return csv;
}

std::string render_dot(const PowerGrid& grid, const Partition& p) {
  if (!p.covers(grid.n()))
    throw std::invalid_argument("partition does not cover the grid");
  auto labels = p.labels(grid.n());
  std::string dot = "graph islanding {\n";
  dot += "  node [style=filled, fontname=\"Helvetica\"];\n";
  for (int v = 0; v < grid.n(); ++v) {
    dot += "  \"" + std::to_string(grid.external_ids[v]) + "\" [fillcolor=\"" +
           kPalette[labels[v] % kPaletteSize] + "\"];\n";
  }
  for (const auto& l : grid.lines) {
    dot += "  \"" + std::to_string(grid.external_ids[l.from]) + "\" -- \"" +
           std::to_string(grid.external_ids[l.to]) + "\" [label=\"" +
           format_mw(std::abs(l.current_flow)) + " MW\"";
    if (labels[l.from] != labels[l.to])
      dot += ", style=dashed, color=gray40";
    dot += "];\n";
  }
  dot += "}\n";
  return dot;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CaseError("cannot write file: " + path);
  out << text;
  if (!out) throw CaseError("failed while writing file: " + path);
}

void export_metrics_csv(const std::vector<StrategyDiagnostics>& diagnostics,
                        const std::string& path) {
  write_text_file(path, render_metrics_csv(diagnostics));
}

void export_dot(const PowerGrid& grid, const Partition& p,
                const std::string& path) {
  write_text_file(path, render_dot(grid, p));
}

} // namespace islanding
