#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "orgsim/engine.hpp"

namespace orgsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario-block text format: one `[scenario]` section per grid point,
// `key = value` lines, `#` comments. See README for the grammar. Unknown
// keys and constraint violations raise ConfigError with line diagnostics.
std::vector<Scenario> parse_config_text(const std::string& text,
                                        const std::string& origin = "config");
std::vector<Scenario> parse_config(const std::string& path);

// Built-in grids: "paper-main", "paper-roll", "paper-individualism",
// "paper-collectivism". Each expands to 18 scenarios.
std::vector<Scenario> preset_scenarios(const std::string& name);
bool is_known_preset(const std::string& name);

}  // namespace orgsim
