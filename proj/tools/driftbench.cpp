#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "driftbench/detectors.hpp"
#include "driftbench/harness.hpp"
#include "driftbench/stream_io.hpp"
#include "driftbench/streamgen.hpp"

namespace fs = std::filesystem;
using namespace driftbench;

namespace {

int cmd_generate(const std::vector<std::string>& generators, const std::vector<std::string>& drifts,
                 std::uint64_t seed, const fs::path& out_dir) {
  std::vector<Generator> gs;
  for (const auto& g : generators) gs.push_back(parse_generator(g));
  if (gs.empty()) gs.assign(std::begin(kAllGenerators), std::end(kAllGenerators));
  std::vector<DriftType> ds;
  for (const auto& d : drifts) ds.push_back(parse_drift_type(d));
  if (ds.empty()) ds.assign(std::begin(kAllDriftTypes), std::end(kAllDriftTypes));
  for (auto g : gs) {
    for (auto d : ds) {
      const auto stream = generate_stream(StreamSpec::make(g, d, seed));
      const auto path = out_dir / (std::string(to_string(g)) + "_" + std::string(to_string(d)) + ".csv");
      write_stream_csv(stream, path);
      std::cout << path.string() << '\n';
    }
  }
  return 0;
}

int cmd_run(const std::optional<fs::path>& config_path, const std::string& preset_name,
            const std::optional<fs::path>& output_dir, const std::optional<std::string>& provider) {
  ExperimentConfig config = config_path ? load_config(*config_path) : preset(preset_name);
  if (output_dir) config.output_dir = *output_dir;
  if (provider) config.energy.provider = *provider;
  config.energy = config.energy.with_env_overrides();
  config.validate();
  {
    auto out = open_for_write(config.output_dir / "config.json");
    out << config_to_json(config).dump(2) << '\n';
  }
  const std::size_t total = config.expected_rows();
  std::cerr << "driftbench: " << total << " rows planned, results in " << config.results_path().string() << '\n';
  const auto summary = run_experiment(config);
  std::cerr << "driftbench: provider " << to_string(summary.provider) << ", resumed " << summary.rows_resumed
            << " rows, wrote " << summary.rows_written << " rows\n";
  return 0;
}

int cmd_analyze(const fs::path& results, const fs::path& out_dir, const std::string& measure,
                std::size_t min_rows) {
  AnalysisOptions opt;
  opt.measure = parse_energy_measure(measure);
  opt.min_rows = min_rows;
  const auto rep = analyze_file(results, opt);
  write_report(rep, out_dir);
  std::cout << (out_dir / "report.md").string() << '\n';
  return 0;
}

int cmd_report(const fs::path& tables_dir, const std::optional<fs::path>& out) {
  const auto md = render_markdown(read_tables(tables_dir));
  if (out) {
    auto f = open_for_write(*out);
    f << md;
  } else {
    std::cout << md;
  }
  return 0;
}

/// Rows are `predicted,actual` (error = they differ) or, with --values, one
/// monitored value per row. A non-numeric first row is taken as a header.
int cmd_detect(const std::string& detector, const std::optional<fs::path>& input, bool values, std::uint32_t seed,
               bool statuses) {
  auto det = make_detector(parse_detector(detector), seed);
  std::ifstream file;
  if (input) file = open_for_read(*input);
  std::istream& in = input ? static_cast<std::istream&>(file) : std::cin;
  std::string line;
  std::size_t index = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = csv::split(line);
    double value = 0.0;
    try {
      if (values) {
        value = csv::parse_double(cells.at(0));
      } else {
        if (cells.size() < 2) throw std::invalid_argument("expected predicted,actual");
        value = csv::parse_double(cells[0]) != csv::parse_double(cells[1]) ? 1.0 : 0.0;
      }
    } catch (const std::invalid_argument&) {
      if (first) {
        first = false;
        continue;
      }
      throw std::runtime_error("row " + std::to_string(index) + ": cannot parse '" + line + "'");
    }
    first = false;
    const auto status = det->update(value);
    if (statuses) {
      std::cout << index << ',' << to_string(status) << '\n';
    } else if (status == DriftStatus::drift) {
      std::cout << index << '\n';
    }
    ++index;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drift detector accuracy and energy benchmark"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Write synthetic drift streams as CSV with a JSON sidecar");
  std::vector<std::string> gen_names, gen_drifts;
  std::uint64_t gen_seed = 42;
  fs::path gen_out = "streams";
  gen->add_option("-g,--generator", gen_names, "sine, stagger, mixed, sea, rt (default: all)");
  gen->add_option("-d,--drift", gen_drifts, "abrupt, gradual (default: both)");
  gen->add_option("-s,--seed", gen_seed, "Stream seed")->capture_default_str();
  gen->add_option("-o,--out-dir", gen_out, "Output directory")->capture_default_str();

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file or preset");
  std::optional<fs::path> run_config, run_out;
  std::optional<std::string> run_provider;
  std::string run_preset = "default";
  run->add_option("-c,--config", run_config, "JSON config file");
  run->add_option("-p,--preset", run_preset, "default, reduced or smoke (when no config is given)")
      ->capture_default_str();
  run->add_option("-o,--output-dir", run_out, "Override the output directory");
  run->add_option("--provider", run_provider, "auto, rapl or cpu_time_proxy");

  auto* ana = app.add_subcommand("analyze", "Statistical tables and report from a results CSV");
  fs::path ana_results, ana_out = "analysis";
  std::string ana_measure = "detection";
  std::size_t ana_min_rows = 2;
  ana->add_option("results", ana_results, "results.csv")->required();
  ana->add_option("-o,--out-dir", ana_out, "Directory for the tables and report.md")->capture_default_str();
  ana->add_option("-m,--measure", ana_measure, "Energy used for the tests: detection, retrain, combined")
      ->capture_default_str();
  ana->add_option("--min-rows", ana_min_rows, "Smallest sample per test cell")->capture_default_str();

  auto* rep = app.add_subcommand("report", "Render markdown from analysis tables");
  fs::path rep_dir;
  std::optional<fs::path> rep_out;
  rep->add_option("tables", rep_dir, "Directory written by analyze")->required();
  rep->add_option("-o,--out", rep_out, "Markdown file (default: stdout)");

  auto* det = app.add_subcommand("detect", "Stream rows through a detector and print alarm indices");
  std::string det_name;
  std::optional<fs::path> det_input;
  bool det_values = false, det_statuses = false;
  std::uint32_t det_seed = 0;
  det->add_option("-d,--detector", det_name, "adwin, ddm, eddm, hddm_a, hddm_w, kswin, page_hinkley")->required();
  det->add_option("-i,--input", det_input, "CSV input (default: stdin)");
  det->add_flag("--values", det_values, "Rows hold the monitored value instead of predicted,actual");
  det->add_flag("--statuses", det_statuses, "Print index,status for every row");
  det->add_option("--seed", det_seed, "KSWIN sampling seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_generate(gen_names, gen_drifts, gen_seed, gen_out);
    if (*run) return cmd_run(run_config, run_preset, run_out, run_provider);
    if (*ana) return cmd_analyze(ana_results, ana_out, ana_measure, ana_min_rows);
    if (*rep) return cmd_report(rep_dir, rep_out);
    if (*det) return cmd_detect(det_name, det_input, det_values, det_seed, det_statuses);
  } catch (const std::exception& e) {
    std::cerr << "driftbench: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
