#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "islanding/report.hpp"

namespace {

using namespace islanding;

std::string path_stem(const std::string& path) {
  size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  size_t dot = name.find_last_of('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CaseError("cannot open file: " + path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// Loads an electrical-distance matrix: a JSON n x n array-of-arrays whose
// rows/columns follow ascending bus id order.
Eigen::MatrixXd load_delta(const PowerGrid& grid, const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw CaseError("malformed distance matrix: " + std::string(e.what()));
  }
  const int n = grid.n();
  if (!doc.is_array() || static_cast<int>(doc.size()) != n)
    throw CaseError("distance matrix must be a " + std::to_string(n) + "x" +
                    std::to_string(n) + " array");
  std::vector<int> sorted_ids = grid.external_ids;
  std::sort(sorted_ids.begin(), sorted_ids.end());
  Eigen::MatrixXd delta(n, n);
  for (int r = 0; r < n; ++r) {
    if (!doc[r].is_array() || static_cast<int>(doc[r].size()) != n)
      throw CaseError("distance matrix row " + std::to_string(r) +
                      " has the wrong length");
    for (int c = 0; c < n; ++c) {
      if (!doc[r][c].is_number())
        throw CaseError("distance matrix entries must be numbers");
      delta(grid.internal_index(sorted_ids[r]),
            grid.internal_index(sorted_ids[c])) = doc[r][c].get<double>();
    }
  }
  return delta;
}

struct CommonFlags {
  std::string case_path;
  double max_volume_frac = 0.375;
  double alpha_c = 1.0, alpha_d = 1.0, alpha_eci = 0.0;
  std::vector<double> regress{0.0, 0.0};
  std::string volume_mode = "absflow";
  std::string delta_path;
  std::string out_path;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--case", f.case_path, "Grid case file (.json or .m)")
      ->required();
  cmd->add_option("--max-volume-frac", f.max_volume_frac,
                  "Island volume cap as a fraction of total volume")
      ->capture_default_str();
  cmd->add_option("--alpha-c", f.alpha_c, "Dynamic-coupling weight")
      ->capture_default_str();
  cmd->add_option("--alpha-d", f.alpha_d, "Flow-disruption weight")
      ->capture_default_str();
  cmd->add_option("--alpha-eci", f.alpha_eci,
                  "Electrical-cohesiveness weight (needs --delta)")
      ->capture_default_str();
  cmd->add_option("--regress", f.regress,
                  "Shed regression parameters a,b (default 0,0)")
      ->delimiter(',')
      ->expected(2);
  cmd->add_option("--volume-mode", f.volume_mode,
                  "Bus volume definition: absflow | capacity")
      ->check(CLI::IsMember({"absflow", "capacity"}))
      ->capture_default_str();
  cmd->add_option("--delta", f.delta_path,
                  "Electrical-distance matrix (JSON, ascending bus id order)");
  cmd->add_option("--out", f.out_path,
                  "Report file (stdout when omitted)");
}

IslandingConfig config_from(const CommonFlags& f, const PowerGrid& grid) {
  IslandingConfig cfg;
  cfg.max_volume_frac = f.max_volume_frac;
  cfg.alpha_C = f.alpha_c;
  cfg.alpha_D = f.alpha_d;
  cfg.alpha_ECI = f.alpha_eci;
  cfg.regression.a = f.regress.at(0);
  cfg.regression.b = f.regress.at(1);
  cfg.volume_mode =
      f.volume_mode == "capacity" ? VolumeMode::Capacity : VolumeMode::AbsFlow;
  if (!f.delta_path.empty()) cfg.delta = load_delta(grid, f.delta_path);
  return cfg;
}

void emit(const std::string& out_path, const nlohmann::ordered_json& doc) {
  std::string text = doc.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
}

int run(int argc, char** argv) {
  CLI::App app{"Controlled-islanding scheme calculator"};
  app.require_subcommand(1);

  auto* part = app.add_subcommand("part", "Compute an islanding scheme");
  CommonFlags pf;
  int k = 4;
  std::vector<double> granularity{4.0, 4.0, 4.0, 4.0};
  std::vector<std::string> strategy_names;
  int kmax = 20;
  double time_limit_s = 10.0;
  int jobs = 1;
  std::string dot_path, csv_path;
  add_common_flags(part, pf);
  part->add_option("--k", k, "Number of islands")->capture_default_str();
  part->add_option("--granularity", granularity,
                   "Granularity factors r1,r2,r3,r4 (one value applies to all)")
      ->delimiter(',')
      ->expected(1, 4);
  part->add_option("--strategies", strategy_names,
                   "Strategy subset, e.g. I,II,VI (default: all seven)")
      ->delimiter(',');
  part->add_option("--kmax", kmax, "Exact-solver size cap")
      ->capture_default_str();
  part->add_option("--time-limit-s", time_limit_s,
                   "Per-strategy exact-solve budget, seconds")
      ->capture_default_str();
  part->add_option("--jobs", jobs, "Concurrent strategy workers")
      ->capture_default_str();
  part->add_option("--dot", dot_path, "GraphViz export of the winning scheme");
  part->add_option("--csv", csv_path, "Per-strategy metrics table");

  auto* metrics = app.add_subcommand("metrics", "Score an existing partition");
  CommonFlags mf;
  std::string partition_path;
  add_common_flags(metrics, mf);
  metrics
      ->add_option("--partition", partition_path,
                   "Partition file: {\"islands\": [[bus ids], ...]}")
      ->required();

  auto* convert =
      app.add_subcommand("convert", "Translate a MATPOWER .m case to JSON");
  std::string convert_in, convert_out;
  convert->add_option("--in", convert_in, "MATPOWER .m case file")->required();
  convert->add_option("--out", convert_out,
                      "Output JSON path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e); // prints help or the parse problem
    return code == 0 ? 0 : 1;
  }

  if (part->parsed()) {
    PowerGrid grid = load_case_file(pf.case_path);
    IslandingConfig cfg = config_from(pf, grid);
    cfg.K = k;
    if (granularity.size() == 1)
      granularity.assign(4, granularity.front());
    if (granularity.size() != 4)
      throw CaseError("--granularity expects one or four values");
    cfg.r1 = granularity[0];
    cfg.r2 = granularity[1];
    cfg.r3 = granularity[2];
    cfg.r4 = granularity[3];
    for (const auto& name : strategy_names)
      cfg.strategies.push_back(strategy_from_name(name));
    cfg.k_max = kmax;
    cfg.time_limit_s = time_limit_s;
    cfg.jobs = jobs;

    PipelineResult result = isc_pipeline(grid, cfg);
    emit(pf.out_path, build_report(path_stem(pf.case_path), grid, cfg, result));
    if (!dot_path.empty()) export_dot(grid, result.best, dot_path);
    if (!csv_path.empty()) export_metrics_csv(result.diagnostics, csv_path);
    return 0;
  }

  if (metrics->parsed()) {
    PowerGrid grid = load_case_file(mf.case_path);
    IslandingConfig cfg = config_from(mf, grid);
    Partition p = load_partition_file(grid, partition_path);
    if (!p.covers(grid.n()))
      throw CaseError("partition does not cover every bus");
    ScoredPartition scored = score_partition(grid, cfg, p);
    emit(mf.out_path,
         build_score_report(path_stem(mf.case_path), grid, cfg, p, scored));
    return 0;
  }

  // convert
  std::string json_text = matpower_to_json(read_file(convert_in));
  if (convert_out.empty())
    std::cout << json_text;
  else
    write_text_file(convert_out, json_text);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const CaseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
