#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "rsrl/agent.hpp"
#include "rsrl/env.hpp"
#include "rsrl/harness/config.hpp"
#include "rsrl/oracle.hpp"

namespace rsrl::harness {

/// Plays the optimal policy of the current snapshot; used for sanity runs.
class OracleAgent final : public EpisodicAgent {
 public:
  explicit OracleAgent(const MdpSequence& seq) : seq_(seq) {}
  void begin_episode(int m) override;
  int act(int h, int s) const override { return solution_.greedy(h, s); }
  void record(const EpisodeRecord&) override {}
  MarkovPolicy policy() const override { return solution_.greedy; }
  double exp_value_estimate(int s) const override { return solution_.expV(0, s); }
  EpisodeFlags flags() const override { return {}; }
  std::string label() const override { return "oracle"; }

 private:
  const MdpSequence& seq_;
  ValueSolution<double> solution_;
  std::size_t segment_ = static_cast<std::size_t>(-1);
};

/// Draws a fresh uniformly random deterministic policy every episode.
class UniformAgent final : public EpisodicAgent {
 public:
  UniformAgent(const MdpShape& shape, std::uint64_t seed) : shape_(shape), rng_(seed) {}
  void begin_episode(int m) override;
  int act(int h, int s) const override { return policy_(h, s); }
  void record(const EpisodeRecord&) override {}
  MarkovPolicy policy() const override { return policy_; }
  double exp_value_estimate(int) const override { return 0.0; }
  EpisodeFlags flags() const override { return {}; }
  std::string label() const override { return "uniform"; }

 private:
  MdpShape shape_;
  Rng rng_;
  MarkovPolicy policy_;
};

/// Runs every episode of `seq` with `agent`, computing oracle regret.
/// With `log` set, events are written one line per flagged episode.
RegretTrace simulate(const MdpSequence& seq, EpisodicAgent& agent, Rng& rng, std::ostream* log = nullptr);

MdpSequence build_environment(const EnvSpec& spec, std::uint64_t seed);

struct BuiltAgent {
  std::unique_ptr<EpisodicAgent> agent;
  int window = 0;  // restart period for restart agents, 0 otherwise
};

/// Resolves window=auto from the environment's `budget` metadata.
BuiltAgent build_agent(const AgentSpec& spec, const MdpSequence& seq, std::uint64_t seed);

/// Seed of run `run_index` in sweep cell `cell`.
std::uint64_t run_stream_seed(std::uint64_t master, std::size_t cell, std::size_t run_index);
/// Seed that generates the environment for run `run_index`.
std::uint64_t env_stream_seed(std::uint64_t env_seed, std::size_t run_index);

struct RunOutput {
  RegretTrace trace;
  VariationBudget budget;
  int window = 0;
};

/// One run of cell `cell`; the env uses `config.env` as given.
RunOutput run_once(const ExperimentConfig& config, std::size_t cell, std::size_t run_index, std::ostream* log = nullptr);

struct SweepCell {
  int episodes = 0;
  double variation = 0.0;  // segments (switching) or budget (lower_bound)
};

struct SweepRow {
  std::size_t cell = 0;
  std::size_t run = 0;
  int episodes = 0;
  double variation = 0.0;
  double budget = 0.0;  // realized B
  int window = 0;
  double final_regret = 0.0;
  int restarts = 0;
  std::string error;  // empty on success
};

std::vector<SweepCell> sweep_cells(const ExperimentConfig& config);
ExperimentConfig cell_config(const ExperimentConfig& config, const SweepCell& cell);

/// Runs every (cell, run) job on `threads` workers. Per-run traces are written
/// to `out_dir/cells/` when out_dir is non-empty. Rows come back ordered by
/// (cell, run) regardless of thread count.
std::vector<SweepRow> sweep(const ExperimentConfig& config, int threads, const std::string& out_dir = {});

struct SummaryRow {
  std::size_t cell = 0;
  int episodes = 0;
  double variation = 0.0;
  double mean_budget = 0.0;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  double mean_restarts = 0.0;
  int runs = 0;
};

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows);

}  // namespace rsrl::harness
