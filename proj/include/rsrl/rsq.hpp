#pragma once

#include "rsrl/agent.hpp"

namespace rsrl {

struct RsqConfig {
  MdpShape shape;
  int restart_period = 1;    // W
  double bonus_scale = 2.0;  // C2 > 1
  bool optimistic_init = true;
  int initial_state = 0;

  void validate() const;
};

/// Periodically restarted risk-sensitive Q-learning on exponential values.
/// Each visit of (h, s, a) with count t applies
///   G <- clip((1 - alpha_t) G + alpha_t e^{beta (r + V_{h+1}(s'))} +/- alpha_t Gamma_t)
/// with alpha_t = (H+1)/(H+t).
class RsqAgent final : public EpisodicAgent {
 public:
  explicit RsqAgent(RsqConfig config);

  void begin_episode(int m) override;
  int act(int h, int s) const override;
  void record(const EpisodeRecord& episode) override;
  MarkovPolicy policy() const override;
  double exp_value_estimate(int s) const override;
  EpisodeFlags flags() const override { return flags_; }
  std::string label() const override { return "rsq"; }

  void reset();
  /// Online update for one visited step. Steps of an episode must be fed in
  /// increasing h.
  void update(int h, int s, int a, double r, int s_next);

  double bonus(int h, int visits) const;
  int visits(int h, int s, int a) const { return counts_[h](s, a); }
  int epoch_start() const { return epoch_start_; }
  const ExpValueTables& tables() const { return tables_; }
  const RsqConfig& config() const { return config_; }
  /// Whether the most recent update hit the clip bound.
  bool last_update_clipped() const { return last_clipped_; }

 private:
  RsqConfig config_;
  double log_factor_;  // log(M H S A / delta)
  std::vector<Eigen::MatrixXi> counts_;
  ExpValueTables tables_;
  int epoch_start_ = 1;
  int epoch_ = 0;
  bool last_clipped_ = false;
  EpisodeFlags flags_;
};

}  // namespace rsrl
