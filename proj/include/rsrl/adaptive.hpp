#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rsrl/agent.hpp"
#include "rsrl/random.hpp"
#include "rsrl/rsmb.hpp"
#include "rsrl/rsq.hpp"

namespace rsrl {

/// Stationary regret rate rho(m) of a base algorithm.
using RhoFn = std::function<double(double m)>;

/// Scheduled base instance on block offsets [start, end] (1-based), length 2^order.
struct InstanceSpan {
  int start = 1;
  int end = 1;
  int order = 0;
  int length() const { return end - start + 1; }
};

/// Multi-scale schedule for a block of length 2^n: for every offset tau and
/// order k = n..0 with 2^k | tau, an instance [tau+1, tau+2^k] is scheduled
/// with probability rho(2^n)/rho(2^k).
std::vector<InstanceSpan> malg_init(int n, const RhoFn& rho, Rng& rng);

/// Index of the shortest instance covering block offset `offset`.
std::size_t active_instance(const std::vector<InstanceSpan>& schedule, int offset);

/// 6 (log2 M + 1) log(M / delta) rho(m).
double rho_hat(double m, int num_episodes, double delta, const RhoFn& rho);

/// c (|e^{beta H} - 1| + g1(beta)) sqrt(H^2 S^2 A iota^2 / m), floored at 1/sqrt(m).
double rho_rsmb(double m, const MdpShape& shape, double scale = 1.0);
/// c |e^{beta H} - 1| sqrt(H S A iota / m), floored at 1/sqrt(m).
double rho_rsq(double m, const MdpShape& shape, double scale = 1.0);

/// Test1 fails when an instance's average exponential return beats the
/// running optimistic extremum by at least `threshold` (mirrored for beta < 0).
bool test1_fails(double mean_return, double extremum, double threshold, double beta);
/// Test2 fails when the block-average of (g - R) reaches `threshold`
/// (of (R - g) for beta < 0).
bool test2_fails(double mean_estimate_minus_return, double threshold, double beta);

struct BaseAlgSpec {
  /// Builds a fresh base agent that runs without restarts over `length` episodes.
  std::function<std::unique_ptr<EpisodicAgent>(int length)> factory;
  RhoFn rho;
  std::string label;
};

BaseAlgSpec rsmb_base(const RsmbConfig& base, double rho_scale = 1.0);
BaseAlgSpec rsq_base(const RsqConfig& base, double rho_scale = 1.0);

/// Scheduled instance with its running bookkeeping.
struct ScheduledInstance {
  InstanceSpan span;  // absolute episode indices
  std::unique_ptr<EpisodicAgent> agent;
  int local_episode = 0;
  double return_sum = 0.0;
};

/// Multi-scale base-instance scheduler with restart tests over doubling blocks.
class AdaptiveAgent final : public EpisodicAgent {
 public:
  AdaptiveAgent(const MdpShape& shape, BaseAlgSpec base, int initial_state, std::uint64_t schedule_seed);

  void begin_episode(int m) override;
  int act(int h, int s) const override;
  void record(const EpisodeRecord& episode) override;
  MarkovPolicy policy() const override;
  double exp_value_estimate(int s) const override;
  EpisodeFlags flags() const override { return flags_; }
  std::string label() const override { return "adaptive-" + base_.label; }

  double rho_hat_at(double m) const { return rho_hat(m, shape_.num_episodes, shape_.delta, base_.rho); }

  int block_start() const { return block_start_; }
  int block_order() const { return block_order_; }
  int block_length() const { return 1 << block_order_; }
  double running_extremum() const { return extremum_; }
  double current_estimate() const { return estimate_; }
  const std::vector<ScheduledInstance>& instances() const { return instances_; }
  std::size_t active_index() const { return active_; }
  int instances_started() const;

 private:
  void start_block(int m);

  MdpShape shape_;
  BaseAlgSpec base_;
  int initial_state_;
  Rng schedule_rng_;

  int next_block_start_ = 1;
  int next_block_order_ = 0;
  int block_start_ = 1;
  int block_order_ = 0;
  std::vector<ScheduledInstance> instances_;
  std::vector<InstanceSpan> spans_;  // block-relative copy for active lookup
  std::size_t active_ = 0;
  double estimate_ = 0.0;  // g_m
  double extremum_ = 0.0;  // U_m
  double gap_sum_ = 0.0;   // sum over the block of (g - R)
  int epoch_ = 0;
  bool pending_restart_ = false;
  int current_episode_ = 0;
  EpisodeFlags flags_;
};

}  // namespace rsrl
