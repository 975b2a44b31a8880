#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "islanding/pipeline.hpp"

namespace islanding {

// External-id view of a partition: islands as sorted original bus ids,
// ordered by smallest id.
std::vector<std::vector<int>> external_islands(const PowerGrid& grid,
                                               const Partition& p);

// Inverse: builds an internal-index partition from external bus ids.
Partition partition_from_external(const PowerGrid& grid,
                                  const std::vector<std::vector<int>>& ids);

// Reads {"islands": [[bus ids], ...]} from a JSON file.
Partition load_partition_file(const PowerGrid& grid, const std::string& path);

// Full pipeline report. Deliberately carries no timestamps or wall times so
// identical inputs render byte-identical JSON; timing lives in the CSV.
nlohmann::ordered_json build_report(const std::string& case_id,
                                    const PowerGrid& grid,
                                    const IslandingConfig& cfg,
                                    const PipelineResult& result);

// Report for scoring a user-supplied partition.
nlohmann::ordered_json build_score_report(const std::string& case_id,
                                          const PowerGrid& grid,
                                          const IslandingConfig& cfg,
                                          const Partition& p,
                                          const ScoredPartition& scored);

// One row per strategy: id, islands, C, D, S_EL, S_MF, F, balanced,
// ms_step1, ms_step2. Metric cells stay empty for infeasible strategies.
std::string render_metrics_csv(
    const std::vector<StrategyDiagnostics>& diagnostics);

// GraphViz graph with island-colored nodes, dashed teared lines, and
// absolute-MW edge labels. Throws std::invalid_argument when the partition
// does not cover the grid.
std::string render_dot(const PowerGrid& grid, const Partition& p);

void write_text_file(const std::string& path, const std::string& text);

void export_metrics_csv(const std::vector<StrategyDiagnostics>& diagnostics,
                        const std::string& path);
void export_dot(const PowerGrid& grid, const Partition& p,
                const std::string& path);

} // namespace islanding
