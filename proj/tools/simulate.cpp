#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "orgsim/config.hpp"
#include "orgsim/metrics.hpp"

namespace fs = std::filesystem;
using namespace orgsim;

namespace {

void write_traces(const Scenario& scenario,
                  const std::vector<RunTrace>& traces,
                  const std::string& out_dir) {
  const fs::path dir = fs::path(out_dir) / scenario.signature();
  fs::create_directories(dir);
  std::ofstream out(dir / "traces.csv");
  out << "replication,period,raw_performance,normalized_performance,auction\n";
  char buf[64];
  for (const RunTrace& tr : traces)
    for (std::size_t t = 0; t < tr.periods.size(); ++t) {
      const PeriodRecord& p = tr.periods[t];
      std::snprintf(buf, sizeof(buf), "%d,%zu,%.6f,%.6f,%d", tr.replication,
                    t + 1, p.raw, p.normalized, p.auction_held ? 1 : 0);
      out << buf << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based simulator of task-group formation and learning "
               "on NK landscapes"};

  std::string preset, config_path, out_dir = "out", matrix_file;
  std::string event_order, learning_scope, test_name = "welch";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  bool emit_traces = false, emit_svg = false;

  app.add_option("--preset", preset,
                 "Built-in grid: paper-main, paper-roll, paper-individualism, "
                 "paper-collectivism");
  app.add_option("--config", config_path, "Scenario config file");
  app.add_option("--seed", seed, "Master seed override")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("-o,--out", out_dir, "Output directory");
  app.add_option("--workers", workers, "Worker threads");
  app.add_flag("--emit-traces", emit_traces, "Write per-replication traces");
  app.add_flag("--emit-svg", emit_svg, "Write SVG series charts");
  app.add_option("--matrix-file", matrix_file,
                 "Interdependence matrix file overriding every scenario's "
                 "structure");
  app.add_option("--event-order", event_order,
                 "decide-then-learn (default) or learn-then-decide");
  app.add_option("--learning-scope", learning_scope, "all or members");
  app.add_option("--test", test_name, "Significance test: welch, mannwhitney")
      ->check(CLI::IsMember({"welch", "mannwhitney"}));

  CLI11_PARSE(app, argc, argv);

  std::vector<Scenario> scenarios;
  TestKind test_kind = TestKind::Welch;
  try {
    if (preset.empty() == config_path.empty())
      throw ConfigError("exactly one of --preset / --config is required");
    scenarios = preset.empty() ? parse_config(config_path)
                               : preset_scenarios(preset);
    if (test_name == "mannwhitney") test_kind = TestKind::MannWhitney;

    std::optional<InterdependenceMatrix> override_matrix;
    if (!matrix_file.empty()) override_matrix = load_matrix_file(matrix_file);
    for (Scenario& s : scenarios) {
      if (seed_set) s.master_seed = seed;
      if (override_matrix) {
        s.structure = StructureKind::FromFile;
        s.matrix = override_matrix;
        s.n = override_matrix->n;
        s.k = override_matrix->k;
      }
      if (!event_order.empty()) {
        if (event_order == "decide-then-learn")
          s.event_order = EventOrder::DecideThenLearn;
        else if (event_order == "learn-then-decide")
          s.event_order = EventOrder::LearnThenDecide;
        else
          throw ConfigError("unknown --event-order '" + event_order + "'");
      }
      if (!learning_scope.empty()) {
        if (learning_scope == "all")
          s.learning_scope = LearningScope::All;
        else if (learning_scope == "members")
          s.learning_scope = LearningScope::MembersOnly;
        else
          throw ConfigError("unknown --learning-scope '" + learning_scope +
                            "'");
      }
      s.label = s.signature();
      s.validate();
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  try {
    fs::create_directories(out_dir);
    std::vector<ScenarioReport> reports;
    reports.reserve(scenarios.size());
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      const Scenario& s = scenarios[i];
      std::cerr << "[" << (i + 1) << "/" << scenarios.size() << "] "
                << s.signature() << " (" << s.replications << " runs)"
                << std::endl;
      std::vector<RunTrace> traces;
      try {
        traces = run_scenario(s, workers);
      } catch (const std::exception& e) {
        std::cerr << "runtime error in scenario " << s.signature() << ": "
                  << e.what() << "\n";
        return 2;
      }
      if (emit_traces) write_traces(s, traces, out_dir);
      reports.push_back(aggregate(traces, s.label));
    }

    std::cout << "scenario,final,mean\n";
    char buf[32];
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.4f,%.4f",
                    reports[i].final_performance, reports[i].mean_performance);
      std::cout << scenarios[i].signature() << "," << buf << "\n";
    }

    if (grid_complete(scenarios)) {
      emit_tables(scenarios, reports, out_dir, test_kind, emit_svg);
    } else {
      std::cerr << "note: scenario set is not a complete grid; emitting "
                   "series only\n";
      for (std::size_t i = 0; i < scenarios.size(); ++i)
        emit_series(scenarios[i], reports[i], out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
