#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orgsim/engine.hpp"

namespace orgsim {

enum class Measure { Final, Mean };
enum class TestKind { Welch, MannWhitney };

struct ScenarioReport {
  std::string label;
  int horizon = 0;
  int sample_size = 0;                  // R
  std::vector<double> mean_by_period;   // C-bar_t, length T
  double final_performance = 0.0;       // C-bar at t = T
  double mean_performance = 0.0;        // time average of C-bar_t
  std::vector<double> per_rep_final;    // unit of observation for tests
  std::vector<double> per_rep_mean;

  double value(Measure m) const {
    return m == Measure::Final ? final_performance : mean_performance;
  }
  const std::vector<double>& sample(Measure m) const {
    return m == Measure::Final ? per_rep_final : per_rep_mean;
  }
};

ScenarioReport aggregate(std::span<const RunTrace> traces,
                         const std::string& label = "");

// IE = (joint - base) / ((learn_only - base) + (adapt_only - base)).
// Empty when the denominator vanishes.
std::optional<double> interaction_coefficient(double base, double learn_only,
                                              double adapt_only, double joint);
std::optional<double> interaction_coefficient(const ScenarioReport& base,
                                              const ScenarioReport& learn_only,
                                              const ScenarioReport& adapt_only,
                                              const ScenarioReport& joint,
                                              Measure measure);

// Relative second-stage change (joint - first_stage) / first_stage.
std::optional<double> offsetting_effect(double first_stage, double joint);
std::optional<double> offsetting_effect(const ScenarioReport& first_stage,
                                        const ScenarioReport& joint,
                                        Measure measure);

struct SignificanceResult {
  double p_value = 1.0;
  bool significant = false;  // p < 0.01
  std::string stars() const { return significant ? "**" : "n.s."; }
};

// Two-sided Welch unequal-variance t-test (default) or Mann-Whitney U with
// normal approximation. Zero-variance pairs short-circuit: identical
// samples give p = 1, disjoint constants give p = 0.
SignificanceResult significance(std::span<const double> sample_a,
                                std::span<const double> sample_b,
                                TestKind kind = TestKind::Welch);

double welch_p_value(std::span<const double> a, std::span<const double> b);
double mann_whitney_p_value(std::span<const double> a,
                            std::span<const double> b);

// Regularized incomplete beta I_x(a, b); exposed for the test suite.
double regularized_incomplete_beta(double a, double b, double x);

// Table emission over a completed grid (each structure must cover the full
// 3 learning x 3 composition block). Writes table2..table5.csv,
// significance.csv and series/<signature>.csv under `out_dir`; optionally
// an SVG chart per structure.
void emit_tables(const std::vector<Scenario>& scenarios,
                 const std::vector<ScenarioReport>& reports,
                 const std::string& out_dir, TestKind test_kind,
                 bool emit_svg = false);

void emit_series(const Scenario& scenario, const ScenarioReport& report,
                 const std::string& out_dir);

// True when the scenario list forms complete 3x3 blocks per structure.
bool grid_complete(const std::vector<Scenario>& scenarios);

}  // namespace orgsim
