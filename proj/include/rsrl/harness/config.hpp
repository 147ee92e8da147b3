#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsrl/agent.hpp"
#include "rsrl/shape.hpp"

namespace rsrl::harness {

/// Validation failure tied to a config field path such as `agent.window`.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct EnvSpec {
  std::string family = "switching";  // switching | stationary | lower_bound | file
  MdpShape shape{4, 2, 5, 4096, 0.2, 0.1};
  int segments = 8;
  double change = 1.0;
  std::uint64_t seed = 1;
  int arms = 2;            // lower_bound
  int bandit_horizon = 3;  // lower_bound
  double budget = 1.0;     // lower_bound
  std::string path;        // file
};

struct AgentSpec {
  std::string kind = "rsq";  // rsmb | rsq | adaptive-rsmb | adaptive-rsq | oracle | uniform
  bool window_auto = true;
  int window = 0;            // used when !window_auto; 0 means W = M
  double bonus = 2.0;        // C1 or C2
  double rho_scale = 1.0;
  bool optimistic_init = true;
  RsqWindowRule window_rule = RsqWindowRule::kStandard;
};

struct RunSpec {
  std::uint64_t seed = 1;  // master seed
  int runs = 1;            // runs per sweep cell
  std::string out_dir;
  bool verbose = false;
  std::vector<int> grid_episodes;      // sweep over M
  std::vector<double> grid_variation;  // sweep over B: segment counts (switching) or budgets (lower_bound)
};

struct ExperimentConfig {
  EnvSpec env;
  AgentSpec agent;
  RunSpec run;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
/// Static checks only; environment-dependent checks happen when building.
void validate(const ExperimentConfig& config);

}  // namespace rsrl::harness
