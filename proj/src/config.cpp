#include "orgsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace orgsim {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line,
                       const std::string& what) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& origin, int line, const std::string& key,
                    const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(origin, line, "field '" + key + "': not a number: '" + value + "'");
  }
}

int parse_int(const std::string& origin, int line, const std::string& key,
              const std::string& value) {
  try {
    std::size_t used = 0;
    int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(origin, line, "field '" + key + "': not an integer: '" + value + "'");
  }
}

struct PendingScenario {
  Scenario s;
  double alpha = 0.5;
  bool has_alpha = false;
  double beta = 0.5;
  bool has_beta = false;
  std::string matrix_path;
  int start_line = 0;
};

void apply_key(PendingScenario& p, const std::string& key,
               const std::string& value, const std::string& origin, int line) {
  Scenario& s = p.s;
  if (key == "label") {
    s.label = value;
  } else if (key == "structure") {
    if (value == "decomposed") s.structure = StructureKind::Decomposed;
    else if (value == "interdependent") s.structure = StructureKind::Interdependent;
    else if (value == "roll") s.structure = StructureKind::Roll;
    else if (value == "file") s.structure = StructureKind::FromFile;
    else fail(origin, line, "field 'structure': unknown value '" + value + "'");
  } else if (key == "k") {
    s.k = parse_int(origin, line, key, value);
  } else if (key == "matrix_file") {
    p.matrix_path = value;
  } else if (key == "learn_prob") {
    s.learn_prob = parse_double(origin, line, key, value);
  } else if (key == "tau") {
    if (value == "none" || value == "inf" || value == "single")
      s.tau.reset();
    else
      s.tau = parse_int(origin, line, key, value);
  } else if (key == "alpha") {
    p.alpha = parse_double(origin, line, key, value);
    p.has_alpha = true;
  } else if (key == "beta") {
    p.beta = parse_double(origin, line, key, value);
    p.has_beta = true;
  } else if (key == "n") {
    s.n = parse_int(origin, line, key, value);
  } else if (key == "m") {
    s.m_subtasks = parse_int(origin, line, key, value);
  } else if (key == "p") {
    s.p_total = parse_int(origin, line, key, value);
  } else if (key == "horizon") {
    s.horizon = parse_int(origin, line, key, value);
  } else if (key == "replications") {
    s.replications = parse_int(origin, line, key, value);
  } else if (key == "seed") {
    s.master_seed = static_cast<std::uint64_t>(
        std::stoull(value));
  } else if (key == "learning_scope") {
    if (value == "all") s.learning_scope = LearningScope::All;
    else if (value == "members") s.learning_scope = LearningScope::MembersOnly;
    else fail(origin, line, "field 'learning_scope': unknown value '" + value + "'");
  } else if (key == "event_order") {
    if (value == "decide-then-learn") s.event_order = EventOrder::DecideThenLearn;
    else if (value == "learn-then-decide") s.event_order = EventOrder::LearnThenDecide;
    else fail(origin, line, "field 'event_order': unknown value '" + value + "'");
  } else {
    fail(origin, line, "unknown key '" + key + "'");
  }
}

Scenario finish(PendingScenario& p, const std::string& origin) {
  if (p.has_alpha != p.has_beta) {
    // Allow specifying only one; the other is the complement.
    if (p.has_alpha) p.beta = 1.0 - p.alpha;
    else p.alpha = 1.0 - p.beta;
  }
  try {
    p.s.scheme = make_scheme(p.alpha, p.beta);
    if (!p.matrix_path.empty()) {
      p.s.structure = StructureKind::FromFile;
      p.s.matrix = load_matrix_file(p.matrix_path);
      p.s.n = p.s.matrix->n;
      p.s.k = p.s.matrix->k;
    }
    p.s.validate();
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": scenario starting at line " +
                      std::to_string(p.start_line) + ": " + e.what());
  }
  if (p.s.label.empty()) p.s.label = p.s.signature();
  return p.s;
}

}  // namespace

std::vector<Scenario> parse_config_text(const std::string& text,
                                        const std::string& origin) {
  std::vector<Scenario> scenarios;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool open = false;
  PendingScenario pending;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(origin, line, "unterminated section header");
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (name != "scenario" && name.rfind("scenario ", 0) != 0)
        fail(origin, line, "unknown section '" + name + "'");
      if (open) scenarios.push_back(finish(pending, origin));
      pending = PendingScenario{};
      pending.start_line = line;
      if (name.size() > 9) pending.s.label = trim(name.substr(9));
      open = true;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      fail(origin, line, "expected 'key = value': '" + s + "'");
    if (!open) fail(origin, line, "key outside a [scenario] section");
    apply_key(pending, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), origin,
              line);
  }
  if (open) scenarios.push_back(finish(pending, origin));
  if (scenarios.empty()) throw ConfigError(origin + ": no scenarios");
  return scenarios;
}

std::vector<Scenario> parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

bool is_known_preset(const std::string& name) {
  return name == "paper-main" || name == "paper-roll" ||
         name == "paper-individualism" || name == "paper-collectivism";
}

std::vector<Scenario> preset_scenarios(const std::string& name) {
  double alpha = 0.5;
  std::vector<std::pair<StructureKind, int>> structures;
  if (name == "paper-main" || name == "paper-individualism" ||
      name == "paper-collectivism") {
    structures = {{StructureKind::Decomposed, 3},
                  {StructureKind::Interdependent, 5}};
    if (name == "paper-individualism") alpha = 0.75;
    if (name == "paper-collectivism") alpha = 0.25;
  } else if (name == "paper-roll") {
    structures = {{StructureKind::Roll, 3}, {StructureKind::Roll, 5}};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }

  const double learn_levels[] = {0.0, 0.25, 0.5};
  const std::optional<int> tau_levels[] = {std::nullopt, 10, 1};
  std::vector<Scenario> scenarios;
  for (const auto& [structure, k] : structures)
    for (double p : learn_levels)
      for (const auto& tau : tau_levels) {
        Scenario s;
        s.structure = structure;
        s.k = k;
        s.learn_prob = p;
        s.tau = tau;
        s.scheme = make_scheme(alpha, 1.0 - alpha);
        s.label = s.signature();
        scenarios.push_back(s);
      }
  return scenarios;
}

}  // namespace orgsim
