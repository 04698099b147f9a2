#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aqft/nets.hpp"
#include "aqft/report.hpp"
#include "json.hpp"

namespace aqft::config {

/// Parsed run configuration. The JSON schema is strict: unknown keys are
/// rejected so that report provenance stays clean.
struct RunConfig {
  // net
  std::string kind;  // spin_chain | fixed_point | kg_lattice
  int sites = 4;
  int site_dim = 2;
  int group_order = 2;                       // fixed_point
  std::vector<double> generator_diag_phases;  // fixed_point, fractions of 2*pi
  int grid_t = 6, grid_x = 6;                // kg_lattice
  double mass = 1.0;

  std::vector<std::string> suites;
  double tolerance = kDefaultTol;
  std::string fault = "none";  // none | hk5_drop_cover_part | kg_partition_gap
  std::optional<std::string> output;

  nlohmann::json echo;  // the raw parsed configuration
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_file(const std::string& path);

/// The group action described by a fixed_point configuration: the cyclic
/// group acting by powers of the diagonal site unitary with the given
/// phases.
nets::GroupAction config_group_action(const RunConfig& cfg);

struct RunResult {
  report::Report rep;
  nlohmann::json json;
};

/// Runs the selected suites and assembles the machine-readable report.
RunResult run_suites(const RunConfig& cfg);

struct InfoResult {
  std::string text;
};
InfoResult run_info(const RunConfig& cfg);

struct GammaResult {
  std::string text;
  size_t generators = 0, closure = 0, squares = 0;
};
GammaResult run_gamma(const RunConfig& cfg);

}  // namespace aqft::config
