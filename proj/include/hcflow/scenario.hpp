// Human-editable scenario files: a small sectioned key=value format with
// strict unknown-key rejection, plus the canonical echo used for
// reproducibility round trips.
#pragma once

#include <string>

#include "hcflow/flowcore.hpp"

namespace hcf {

struct OutputSpec {
  std::string directory = ".";
  std::string prefix = "run";
  bool operator==(const OutputSpec&) const = default;
};

struct ScenarioConfig {
  FlowConfig flow;
  OutputSpec output;
  int levels = 3;  // continuation levels

  bool operator==(const ScenarioConfig&) const = default;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses a scenario file; unspecified keys take the documented defaults
// (ball of radius 1, n = 2, 400 nodes, geometric-mean curvature function,
// sigma = 0.6, sigma_init = (sigma+1)/2, epsilon = 1e-3 * extent).
ScenarioConfig parse_scenario(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text, const std::string& name = "<text>");

// Canonical text with every key explicit; parsing it reproduces the
// configuration exactly.
std::string render_scenario(const ScenarioConfig& config);

}  // namespace hcf
