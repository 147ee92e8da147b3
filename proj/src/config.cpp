#include "rsrl/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace rsrl::harness {

namespace pt = boost::property_tree;

namespace {

const std::vector<std::string> kFamilies{"switching", "stationary", "lower_bound", "file"};
const std::vector<std::string> kAgents{"rsmb", "rsq", "adaptive-rsmb", "adaptive-rsq", "oracle", "uniform"};

template <typename T>
T get(const pt::ptree& tree, const std::string& path, T fallback) {
  auto node = tree.get_child_optional(pt::ptree::path_type(path, '.'));
  if (!node) return fallback;
  auto value = node->get_value_optional<T>();
  if (!value) throw ConfigError(path, "cannot parse '" + node->data() + "'");
  return *value;
}

template <typename T>
std::vector<T> get_list(const pt::ptree& tree, const std::string& path) {
  std::vector<T> out;
  auto raw = tree.get_optional<std::string>(path);
  if (!raw) return out;
  std::stringstream ss(*raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T value{};
    if (!(is >> value)) throw ConfigError(path, "cannot parse list item '" + item + "'");
    out.push_back(value);
  }
  return out;
}

bool get_bool(const pt::ptree& tree, const std::string& path, bool fallback) {
  auto raw = tree.get_optional<std::string>(path);
  if (!raw) return fallback;
  if (*raw == "true" || *raw == "1" || *raw == "yes") return true;
  if (*raw == "false" || *raw == "0" || *raw == "no") return false;
  throw ConfigError(path, "expected true/false, got '" + *raw + "'");
}

void check_known_keys(const pt::ptree& tree) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> known{
      {"env",
       {"family", "states", "actions", "horizon", "episodes", "beta", "delta", "segments", "change", "seed", "arms",
        "bandit_horizon", "budget", "path"}},
      {"agent", {"kind", "window", "bonus", "rho_scale", "optimistic_init", "window_rule"}},
      {"run", {"seed", "runs", "out", "verbose"}},
      {"sweep", {"episodes", "variation"}},
  };
  for (const auto& [section, body] : tree) {
    auto it = std::find_if(known.begin(), known.end(), [&](const auto& k) { return k.first == section; });
    if (it == known.end()) throw ConfigError(section, "unknown section");
    for (const auto& [key, value] : body) {
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ConfigError(section + "." + key, "unknown key");
    }
  }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", "line " + std::to_string(e.line()) + ": " + e.message());
  }
  check_known_keys(tree);

  ExperimentConfig cfg;
  auto& env = cfg.env;
  env.family = get<std::string>(tree, "env.family", env.family);
  env.shape.num_states = get(tree, "env.states", env.shape.num_states);
  env.shape.num_actions = get(tree, "env.actions", env.shape.num_actions);
  env.shape.horizon = get(tree, "env.horizon", env.shape.horizon);
  env.shape.num_episodes = get(tree, "env.episodes", env.shape.num_episodes);
  env.shape.beta = get(tree, "env.beta", env.shape.beta);
  env.shape.delta = get(tree, "env.delta", env.shape.delta);
  env.segments = get(tree, "env.segments", env.segments);
  env.change = get(tree, "env.change", env.change);
  env.seed = get<std::uint64_t>(tree, "env.seed", env.seed);
  env.arms = get(tree, "env.arms", env.arms);
  env.bandit_horizon = get(tree, "env.bandit_horizon", env.bandit_horizon);
  env.budget = get(tree, "env.budget", env.budget);
  env.path = get<std::string>(tree, "env.path", env.path);

  auto& agent = cfg.agent;
  agent.kind = get<std::string>(tree, "agent.kind", agent.kind);
  const auto window = get<std::string>(tree, "agent.window", "auto");
  if (window == "auto") {
    agent.window_auto = true;
  } else if (window == "full") {
    agent.window_auto = false;
    agent.window = 0;
  } else {
    agent.window_auto = false;
    try {
      std::size_t used = 0;
      agent.window = std::stoi(window, &used);
      if (used != window.size()) throw std::invalid_argument(window);
    } catch (const std::exception&) {
      throw ConfigError("agent.window", "expected auto, full or a positive integer, got '" + window + "'");
    }
  }
  agent.bonus = get(tree, "agent.bonus", agent.bonus);
  agent.rho_scale = get(tree, "agent.rho_scale", agent.rho_scale);
  agent.optimistic_init = get_bool(tree, "agent.optimistic_init", agent.optimistic_init);
  const auto rule = get<std::string>(tree, "agent.window_rule", "standard");
  if (rule == "standard") agent.window_rule = RsqWindowRule::kStandard;
  else if (rule == "reduced") agent.window_rule = RsqWindowRule::kReduced;
  else throw ConfigError("agent.window_rule", "expected standard or reduced, got '" + rule + "'");

  auto& run = cfg.run;
  run.seed = get<std::uint64_t>(tree, "run.seed", run.seed);
  run.runs = get(tree, "run.runs", run.runs);
  run.out_dir = get<std::string>(tree, "run.out", run.out_dir);
  run.verbose = get_bool(tree, "run.verbose", run.verbose);
  run.grid_episodes = get_list<int>(tree, "sweep.episodes");
  run.grid_variation = get_list<double>(tree, "sweep.variation");

  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  return parse_config(in);
}

void validate(const ExperimentConfig& cfg) {
  const auto& env = cfg.env;
  if (std::find(kFamilies.begin(), kFamilies.end(), env.family) == kFamilies.end())
    throw ConfigError("env.family", "unknown family '" + env.family + "'");
  if (env.family != "file" && env.family != "lower_bound") {
    try {
      env.shape.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("env", e.what());
    }
  }
  if (env.family == "switching") {
    if (env.segments < 1 || env.segments > env.shape.num_episodes)
      throw ConfigError("env.segments", "must satisfy 1 <= segments <= episodes");
    if (!(env.change >= 0.0 && env.change <= 1.0)) throw ConfigError("env.change", "must lie in [0, 1]");
  }
  if (env.family == "lower_bound") {
    if (env.arms < 2) throw ConfigError("env.arms", "need at least 2 arms");
    if (env.bandit_horizon < 1) throw ConfigError("env.bandit_horizon", "must be >= 1");
    if (!(env.budget > 0.0)) throw ConfigError("env.budget", "must be positive");
  }
  if (env.family == "file" && env.path.empty()) throw ConfigError("env.path", "required for the file family");

  const auto& agent = cfg.agent;
  if (std::find(kAgents.begin(), kAgents.end(), agent.kind) == kAgents.end())
    throw ConfigError("agent.kind", "unknown agent '" + agent.kind + "'");
  if (!agent.window_auto && agent.window < 0) throw ConfigError("agent.window", "must be positive");
  if (!(agent.bonus > 1.0)) throw ConfigError("agent.bonus", "bonus constant must exceed 1");
  if (!(agent.rho_scale > 0.0)) throw ConfigError("agent.rho_scale", "must be positive");
  const bool restart_agent = agent.kind == "rsmb" || agent.kind == "rsq";
  if (restart_agent && agent.window_auto && env.family == "stationary")
    throw ConfigError("agent.window", "auto requires a known positive variation budget; stationary envs have none");

  const auto& run = cfg.run;
  if (run.runs < 1) throw ConfigError("run.runs", "must be >= 1");
  for (int m : run.grid_episodes)
    if (m < 1) throw ConfigError("sweep.episodes", "entries must be positive");
  for (double v : run.grid_variation)
    if (!(v > 0.0)) throw ConfigError("sweep.variation", "entries must be positive");
}

}  // namespace rsrl::harness
