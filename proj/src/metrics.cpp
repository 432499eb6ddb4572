#include "orgsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace orgsim {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double sample_variance(std::span<const double> v, double mean) {
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / (v.size() - 1);
}

// Half-up 4-decimal formatting; snprintf rounds half-to-even on some libcs,
// so nudge via explicit floor on the scaled magnitude.
std::string fmt4(double v) {
  const double scaled = std::floor(std::fabs(v) * 1e4 + 0.5) / 1e4;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", std::copysign(scaled, v));
  return buf;
}

std::string fmt_opt4(const std::optional<double>& v) {
  return v ? fmt4(*v) : std::string("n/a");
}

}  // namespace

ScenarioReport aggregate(std::span<const RunTrace> traces,
                         const std::string& label) {
  if (traces.empty()) throw std::invalid_argument("aggregate: no traces");
  const std::size_t horizon = traces.front().periods.size();
  for (const auto& tr : traces)
    if (tr.periods.size() != horizon)
      throw std::invalid_argument("aggregate: ragged trace lengths");

  ScenarioReport report;
  report.label = label;
  report.horizon = static_cast<int>(horizon);
  report.sample_size = static_cast<int>(traces.size());
  report.mean_by_period.assign(horizon, 0.0);
  report.per_rep_final.reserve(traces.size());
  report.per_rep_mean.reserve(traces.size());
  for (const auto& tr : traces) {
    for (std::size_t t = 0; t < horizon; ++t)
      report.mean_by_period[t] += tr.periods[t].normalized;
    report.per_rep_final.push_back(tr.final_normalized());
    report.per_rep_mean.push_back(tr.time_mean_normalized());
  }
  for (double& v : report.mean_by_period) v /= traces.size();
  report.final_performance = report.mean_by_period.back();
  report.mean_performance = mean_of(report.mean_by_period);
  return report;
}

std::optional<double> interaction_coefficient(double base, double learn_only,
                                              double adapt_only, double joint) {
  const double denom = (learn_only - base) + (adapt_only - base);
  if (denom == 0.0) return std::nullopt;
  return (joint - base) / denom;
}

std::optional<double> interaction_coefficient(const ScenarioReport& base,
                                              const ScenarioReport& learn_only,
                                              const ScenarioReport& adapt_only,
                                              const ScenarioReport& joint,
                                              Measure measure) {
  return interaction_coefficient(base.value(measure), learn_only.value(measure),
                                 adapt_only.value(measure),
                                 joint.value(measure));
}

std::optional<double> offsetting_effect(double first_stage, double joint) {
  if (first_stage == 0.0) return std::nullopt;
  return (joint - first_stage) / first_stage;
}

std::optional<double> offsetting_effect(const ScenarioReport& first_stage,
                                        const ScenarioReport& joint,
                                        Measure measure) {
  return offsetting_effect(first_stage.value(measure), joint.value(measure));
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // Continued fraction (Lentz); converges fastest for x < (a+1)/(a+b+2).
  if (x > (a + 1.0) / (a + b + 2.0))
    return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);

  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front) / a;

  const double tiny = 1e-300;
  double f = 1.0, c = 1.0, d = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const int m = i / 2;
    double numerator;
    if (i == 0)
      numerator = 1.0;
    else if (i % 2 == 0)
      numerator = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
    else
      numerator = -(a + m) * (a + b + m) * x /
                  ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
    d = 1.0 + numerator * d;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = 1.0 + numerator / c;
    if (std::fabs(c) < tiny) c = tiny;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(1.0 - delta) < 1e-12) break;
  }
  return front * (f - 1.0);
}

double welch_p_value(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("welch_p_value: need at least two per sample");
  const double ma = mean_of(a), mb = mean_of(b);
  const double va = sample_variance(a, ma), vb = sample_variance(b, mb);
  if (va == 0.0 && vb == 0.0) return ma == mb ? 1.0 : 0.0;
  const double sa = va / a.size(), sb = vb / b.size();
  const double t = (ma - mb) / std::sqrt(sa + sb);
  const double df = (sa + sb) * (sa + sb) /
                    (sa * sa / (a.size() - 1) + sb * sb / (b.size() - 1));
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double mann_whitney_p_value(std::span<const double> a,
                            std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("mann_whitney_p_value: empty sample");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  std::vector<std::pair<double, int>> pooled;  // value, origin (0 = a)
  pooled.reserve(n);
  for (double x : a) pooled.emplace_back(x, 0);
  for (double x : b) pooled.emplace_back(x, 1);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });

  double rank_sum_a = 0.0, tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    const double avg_rank = (i + 1 + j) / 2.0;  // mean of ranks i+1 .. j
    const double ties = static_cast<double>(j - i);
    tie_term += ties * ties * ties - ties;
    for (std::size_t q = i; q < j; ++q)
      if (pooled[q].second == 0) rank_sum_a += avg_rank;
    i = j;
  }
  const double u = rank_sum_a - na * (na + 1) / 2.0;
  const double mu = na * nb / 2.0;
  const double sigma2 =
      (double(na) * nb / 12.0) *
      ((n + 1) - tie_term / (double(n) * (n - 1)));
  if (sigma2 <= 0.0) return 1.0;  // all pooled values tied
  double z = std::fabs(u - mu) - 0.5;  // continuity correction
  if (z < 0.0) z = 0.0;
  z /= std::sqrt(sigma2);
  return std::erfc(z / std::sqrt(2.0));
}

SignificanceResult significance(std::span<const double> sample_a,
                                std::span<const double> sample_b,
                                TestKind kind) {
  const double p = kind == TestKind::Welch ? welch_p_value(sample_a, sample_b)
                                           : mann_whitney_p_value(sample_a,
                                                                  sample_b);
  return SignificanceResult{p, p < 0.01};
}

namespace {

struct GridBlock {
  std::string name;  // structure tag, e.g. "decomp_K3"
  std::vector<double> learn_levels;          // ascending
  std::vector<std::optional<int>> tau_levels;  // longest interval first
  // reports[tau_index][learn_index]
  std::vector<std::vector<const ScenarioReport*>> cell;
  std::vector<std::vector<const Scenario*>> scen;
};

std::string structure_tag(const Scenario& s) {
  std::string sig = s.signature();
  return sig.substr(0, sig.find("_P"));  // drop learning/composition suffixes
}

std::string composition_name(const std::optional<int>& tau, std::size_t rank) {
  std::string base = rank == 0 ? "long-term" : rank == 1 ? "mid-term"
                                                         : "short-term";
  if (tau)
    base += "_tau" + std::to_string(*tau);
  else
    base += "_single";
  return base;
}

std::string learning_name(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "P%g", p);
  return buf;
}

double tau_sort_key(const std::optional<int>& tau) {
  return tau ? static_cast<double>(*tau) : std::numeric_limits<double>::infinity();
}

std::vector<GridBlock> build_blocks(const std::vector<Scenario>& scenarios,
                                    const std::vector<ScenarioReport>* reports) {
  std::vector<GridBlock> blocks;
  auto find_block = [&](const std::string& tag) -> GridBlock& {
    for (auto& b : blocks)
      if (b.name == tag) return b;
    blocks.push_back(GridBlock{tag, {}, {}, {}, {}});
    return blocks.back();
  };
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& s = scenarios[i];
    GridBlock& b = find_block(structure_tag(s));
    if (std::find(b.learn_levels.begin(), b.learn_levels.end(), s.learn_prob) ==
        b.learn_levels.end())
      b.learn_levels.push_back(s.learn_prob);
    if (std::find(b.tau_levels.begin(), b.tau_levels.end(), s.tau) ==
        b.tau_levels.end())
      b.tau_levels.push_back(s.tau);
  }
  for (auto& b : blocks) {
    std::sort(b.learn_levels.begin(), b.learn_levels.end());
    std::sort(b.tau_levels.begin(), b.tau_levels.end(),
              [](const auto& l, const auto& r) {
                return tau_sort_key(l) > tau_sort_key(r);
              });
    b.cell.assign(b.tau_levels.size(),
                  std::vector<const ScenarioReport*>(b.learn_levels.size(),
                                                     nullptr));
    b.scen.assign(b.tau_levels.size(),
                  std::vector<const Scenario*>(b.learn_levels.size(), nullptr));
  }
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& s = scenarios[i];
    GridBlock& b = find_block(structure_tag(s));
    const auto li = std::find(b.learn_levels.begin(), b.learn_levels.end(),
                              s.learn_prob) -
                    b.learn_levels.begin();
    const auto ti =
        std::find(b.tau_levels.begin(), b.tau_levels.end(), s.tau) -
        b.tau_levels.begin();
    b.scen[ti][li] = &s;
    if (reports) b.cell[ti][li] = &(*reports)[i];
  }
  return blocks;
}

bool blocks_complete(const std::vector<GridBlock>& blocks) {
  for (const auto& b : blocks)
    for (const auto& row : b.scen)
      for (const Scenario* s : row)
        if (!s) return false;
  return !blocks.empty();
}

}  // namespace

bool grid_complete(const std::vector<Scenario>& scenarios) {
  if (scenarios.empty()) return false;
  return blocks_complete(build_blocks(scenarios, nullptr));
}

void emit_series(const Scenario& scenario, const ScenarioReport& report,
                 const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "series");
  std::ofstream out(fs::path(out_dir) / "series" /
                    (scenario.signature() + ".csv"));
  if (!out) throw std::runtime_error("emit_series: cannot open output file");
  out << "period,mean_normalized_performance\n";
  for (std::size_t t = 0; t < report.mean_by_period.size(); ++t)
    out << (t + 1) << "," << fmt4(report.mean_by_period[t]) << "\n";
}

namespace {

void emit_svg(const GridBlock& block, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "figures");
  std::ofstream out(fs::path(out_dir) / "figures" / (block.name + ".svg"));
  const int w = 640, h = 400, ml = 50, mb = 30, mt = 10, mr = 10;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\"/>\n";
  const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                           "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                           "#bcbd22"};
  int color = 0;
  int horizon = 1;
  for (const auto& row : block.cell)
    for (const ScenarioReport* r : row)
      horizon = std::max(horizon, r->horizon);
  auto px = [&](double t) {
    return ml + (t - 1) / std::max(1.0, horizon - 1.0) * (w - ml - mr);
  };
  auto py = [&](double v) { return h - mb - v * (h - mt - mb); };
  // Axes with a 0..1 performance scale.
  out << "<line x1=\"" << ml << "\" y1=\"" << (h - mb) << "\" x2=\"" << (w - mr)
      << "\" y2=\"" << (h - mb) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << (h - mb) << "\" stroke=\"black\"/>\n";
  for (std::size_t ti = 0; ti < block.tau_levels.size(); ++ti)
    for (std::size_t li = 0; li < block.learn_levels.size(); ++li) {
      const ScenarioReport* r = block.cell[ti][li];
      out << "<polyline fill=\"none\" stroke=\"" << palette[color % 9]
          << "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t t = 0; t < r->mean_by_period.size(); ++t)
        out << px(double(t + 1)) << "," << py(r->mean_by_period[t]) << " ";
      out << "\"/>\n";
      out << "<text x=\"" << (w - mr - 170) << "\" y=\"" << (mt + 14 * (color + 1))
          << "\" font-size=\"11\" fill=\"" << palette[color % 9] << "\">"
          << composition_name(block.tau_levels[ti], ti) << " "
          << learning_name(block.learn_levels[li]) << "</text>\n";
      ++color;
    }
  out << "</svg>\n";
}

}  // namespace

void emit_tables(const std::vector<Scenario>& scenarios,
                 const std::vector<ScenarioReport>& reports,
                 const std::string& out_dir, TestKind test_kind,
                 bool with_svg) {
  namespace fs = std::filesystem;
  if (scenarios.size() != reports.size())
    throw std::invalid_argument("emit_tables: scenario/report size mismatch");
  auto blocks = build_blocks(scenarios, &reports);
  if (!blocks_complete(blocks))
    throw std::invalid_argument("emit_tables: incomplete scenario grid");
  fs::create_directories(out_dir);

  const Measure measures[] = {Measure::Final, Measure::Mean};
  const char* measure_names[] = {"final", "mean"};

  // table2.csv: performance per (composition, measure) x (structure, learning).
  {
    std::ofstream out(fs::path(out_dir) / "table2.csv");
    out << "group_composition,measure";
    for (const auto& b : blocks)
      for (double p : b.learn_levels)
        out << "," << b.name << "_" << learning_name(p);
    out << "\n";
    const auto& shape = blocks.front();
    for (std::size_t ti = 0; ti < shape.tau_levels.size(); ++ti)
      for (int mi = 0; mi < 2; ++mi) {
        out << composition_name(shape.tau_levels[ti], ti) << ","
            << measure_names[mi];
        for (const auto& b : blocks)
          for (std::size_t li = 0; li < b.learn_levels.size(); ++li)
            out << "," << fmt4(b.cell[ti][li]->value(measures[mi]));
        out << "\n";
      }
  }

  // Interaction coefficients and offsetting effects need the no-learning /
  // single-auction corner of each block as the baseline.
  auto baseline_ok = [](const GridBlock& b) {
    return !b.learn_levels.empty() && b.learn_levels.front() == 0.0 &&
           !b.tau_levels.front().has_value();
  };

  enum class Derived { IE, OELearn, OETau };
  auto write_derived = [&](const char* file, Derived which) {
    std::ofstream out(fs::path(out_dir) / file);
    out << "group_composition,measure";
    for (const auto& b : blocks)
      for (std::size_t li = 1; li < b.learn_levels.size(); ++li)
        out << "," << b.name << "_" << learning_name(b.learn_levels[li]);
    out << "\n";
    const auto& shape = blocks.front();
    for (std::size_t ti = 1; ti < shape.tau_levels.size(); ++ti)
      for (int mi = 0; mi < 2; ++mi) {
        out << composition_name(shape.tau_levels[ti], ti) << ","
            << measure_names[mi];
        for (const auto& b : blocks) {
          for (std::size_t li = 1; li < b.learn_levels.size(); ++li) {
            std::optional<double> v;
            if (baseline_ok(b)) {
              const double base = b.cell[0][0]->value(measures[mi]);
              const double learn_only = b.cell[0][li]->value(measures[mi]);
              const double adapt_only = b.cell[ti][0]->value(measures[mi]);
              const double joint = b.cell[ti][li]->value(measures[mi]);
              switch (which) {
                case Derived::IE:
                  v = interaction_coefficient(base, learn_only, adapt_only,
                                              joint);
                  break;
                case Derived::OELearn:
                  // Learning added on top of frequent adaptation, in percent.
                  if (auto oe = offsetting_effect(adapt_only, joint))
                    v = *oe * 100.0;
                  break;
                case Derived::OETau:
                  if (auto oe = offsetting_effect(learn_only, joint))
                    v = *oe * 100.0;
                  break;
              }
            }
            out << "," << fmt_opt4(v);
          }
        }
        out << "\n";
      }
  };
  write_derived("table3.csv", Derived::IE);
  write_derived("table4.csv", Derived::OELearn);
  write_derived("table5.csv", Derived::OETau);

  // significance.csv: pairwise promotions along both grid axes.
  {
    std::ofstream out(fs::path(out_dir) / "significance.csv");
    out << "structure,comparison,fixed,measure,p_value,stars\n";
    for (const auto& b : blocks) {
      for (std::size_t ti = 0; ti < b.tau_levels.size(); ++ti)
        for (std::size_t li = 0; li + 1 < b.learn_levels.size(); ++li)
          for (int mi = 0; mi < 2; ++mi) {
            const auto res = significance(
                b.cell[ti][li]->sample(measures[mi]),
                b.cell[ti][li + 1]->sample(measures[mi]), test_kind);
            out << b.name << "," << learning_name(b.learn_levels[li]) << "->"
                << learning_name(b.learn_levels[li + 1]) << ","
                << composition_name(b.tau_levels[ti], ti) << ","
                << measure_names[mi] << "," << fmt4(res.p_value) << ","
                << res.stars() << "\n";
          }
      for (std::size_t ti = 0; ti + 1 < b.tau_levels.size(); ++ti)
        for (std::size_t li = 0; li < b.learn_levels.size(); ++li)
          for (int mi = 0; mi < 2; ++mi) {
            const auto res = significance(
                b.cell[ti][li]->sample(measures[mi]),
                b.cell[ti + 1][li]->sample(measures[mi]), test_kind);
            out << b.name << "," << composition_name(b.tau_levels[ti], ti)
                << "->" << composition_name(b.tau_levels[ti + 1], ti + 1)
                << "," << learning_name(b.learn_levels[li]) << ","
                << measure_names[mi] << "," << fmt4(res.p_value) << ","
                << res.stars() << "\n";
          }
    }
  }

  for (std::size_t i = 0; i < scenarios.size(); ++i)
    emit_series(scenarios[i], reports[i], out_dir);
  if (with_svg)
    for (const auto& b : blocks) emit_svg(b, out_dir);
}

}  // namespace orgsim
