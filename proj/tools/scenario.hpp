// Batch scenario: command, operator, grids, tau range, output directory and
// seed, resolved from defaults, an optional config file and flags.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace branewave::cli {

// Invalid configuration; `field` names the offending key.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string f, const std::string& what) : std::runtime_error(what), field(std::move(f)) {}
};

struct Scenario {
  std::string command;
  double alpha = -0.5;
  double M = 0.0;
  bool dirichlet = false;
  double c = 0.0;
  double kappa = 0.0;
  bool profile = false;
  double tau_star = 0.0;
  double tau_end = 0.0;  // 0 selects the command default
  std::string out = ".";
  std::uint64_t seed = 1;
  // Frequency grid: composite Gauss on [0, xi_max].
  double xi_max = 8.0;
  int xi_panels = 8;
  int xi_order = 8;
  // Continuum truncation.
  double m_max = 40.0;
  int m_order = 12;
  // Finite-difference oracle.
  int n_rho = 400;
  double rho_min = 0.005;
  int trials = 5;

  // tau_end with the command default applied.
  double resolved_tau_end() const;
  // Throws ConfigError for unknown commands and out-of-range values.
  void validate() const;
  // Full resolved configuration.
  nlohmann::json to_json() const;
};

// Sets one key from its textual value ("c" also accepts inf or dirichlet).
// Keys use the flag spelling without dashes; '_' and '-' are interchangeable.
void apply_key(Scenario& s, const std::string& key, const std::string& value);

// Merges a config file: a JSON object, or lines `key = value` with '#'
// comments. Throws ConfigError with field "config" when unreadable.
void apply_config_text(Scenario& s, const std::string& text);
void apply_config_file(Scenario& s, const std::string& path);

}  // namespace branewave::cli
