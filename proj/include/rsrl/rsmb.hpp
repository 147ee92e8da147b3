#pragma once

#include "rsrl/agent.hpp"

namespace rsrl {

struct RsmbConfig {
  MdpShape shape;
  int restart_period = 1;     // W
  double bonus_scale = 2.0;   // C1 > 1
  double regularizer = 1.0;   // lambda
  double confidence = 0.1;    // p in the bonus log factor
  bool optimistic_init = true;
  int initial_state = 0;

  void validate() const;
};

/// Periodically restarted risk-sensitive model-based agent.
///
/// Every episode it rebuilds smoothed estimates from the counters of the
/// current epoch,
///   P(s'|s,a) = (N(s,a,s') + lambda/S) / (N(s,a) + lambda),
///   r(s,a)    = sum of observed rewards / (N(s,a) + lambda),
/// and runs optimistic exponential value iteration with a bonus that decays
/// both in the visit count and across the remaining steps of the episode.
class RsmbAgent final : public EpisodicAgent {
 public:
  explicit RsmbAgent(RsmbConfig config);

  void begin_episode(int m) override;
  int act(int h, int s) const override;
  void record(const EpisodeRecord& episode) override;
  MarkovPolicy policy() const override;
  double exp_value_estimate(int s) const override;
  EpisodeFlags flags() const override { return flags_; }
  std::string label() const override { return "rsmb"; }

  /// Zeroes the counters and reinitializes the value tables.
  void reset();
  /// Optimistic value iteration from the current counters.
  void plan();
  /// One step of feedback; `record` calls this for every step of an episode.
  void observe(int h, int s, int a, double r, int s_next);

  double bonus(int h, double visits) const;
  double estimated_transition(int h, int s, int a, int s_next) const;
  KernelX<double> estimated_kernel(int h) const;
  double estimated_reward(int h, int s, int a) const;
  double visits(int h, int s, int a) const { return visit_counts_[h](s, a); }
  double transitions(int h, int s, int a, int s_next) const {
    return transition_counts_[h](s * config_.shape.num_actions + a, s_next);
  }
  int epoch_start() const { return epoch_start_; }
  const ExpValueTables& tables() const { return tables_; }
  const RsmbConfig& config() const { return config_; }

 private:
  RsmbConfig config_;
  double log_factor_;  // log(6 W H S A / p)
  std::vector<MatrixX<double>> visit_counts_;      // [h] S x A
  std::vector<KernelX<double>> transition_counts_;  // [h] (S*A) x S
  std::vector<MatrixX<double>> reward_sums_;       // [h] S x A
  ExpValueTables tables_;
  int epoch_start_ = 1;
  int epoch_ = 0;
  EpisodeFlags flags_;
};

}  // namespace rsrl
