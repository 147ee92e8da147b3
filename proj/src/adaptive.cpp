#include "rsrl/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsrl {

std::vector<InstanceSpan> malg_init(int n, const RhoFn& rho, Rng& rng) {
  if (n < 0 || n > 30) throw std::invalid_argument("malg_init: order must lie in [0, 30]");
  const int len = 1 << n;
  const double top = rho(len);
  std::vector<InstanceSpan> out;
  for (int tau = 0; tau < len; ++tau) {
    for (int k = n; k >= 0; --k) {
      const int width = 1 << k;
      if (tau % width != 0) continue;
      // The order-n draw has probability one; skip the RNG so it is exact.
      const bool keep = k == n || rng.uniform() < top / rho(width);
      if (keep) out.push_back({tau + 1, tau + width, k});
    }
  }
  return out;
}

std::size_t active_instance(const std::vector<InstanceSpan>& schedule, int offset) {
  std::size_t best = schedule.size();
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& sp = schedule[i];
    if (sp.start <= offset && offset <= sp.end && (best == schedule.size() || sp.order < schedule[best].order)) best = i;
  }
  if (best == schedule.size()) throw std::logic_error("active_instance: no instance covers the episode");
  return best;
}

double rho_hat(double m, int num_episodes, double delta, const RhoFn& rho) {
  const double n_hat = std::log2(static_cast<double>(num_episodes)) + 1.0;
  return 6.0 * n_hat * std::log(num_episodes / delta) * rho(m);
}

namespace {

double iota(const MdpShape& sh) {
  return std::log(static_cast<double>(sh.num_states) * sh.num_actions * sh.num_episodes * sh.horizon / sh.delta);
}

}  // namespace

double rho_rsmb(double m, const MdpShape& sh, double scale) {
  const double beta = sh.beta;
  const double spread = std::abs(std::exp(beta * sh.horizon) - 1.0);
  const double g1 = beta > 0.0 ? std::exp(beta * sh.horizon) * beta : -beta;
  const double H = sh.horizon, S = sh.num_states, A = sh.num_actions, i = iota(sh);
  const double rate = scale * (spread + g1) * std::sqrt(H * H * S * S * A * i * i / m);
  return std::max(rate, 1.0 / std::sqrt(m));
}

double rho_rsq(double m, const MdpShape& sh, double scale) {
  const double spread = std::abs(std::exp(sh.beta * sh.horizon) - 1.0);
  const double rate =
      scale * spread * std::sqrt(static_cast<double>(sh.horizon) * sh.num_states * sh.num_actions * iota(sh) / m);
  return std::max(rate, 1.0 / std::sqrt(m));
}

bool test1_fails(double mean_return, double extremum, double threshold, double beta) {
  return (beta > 0.0 ? mean_return - extremum : extremum - mean_return) >= threshold;
}

bool test2_fails(double mean_estimate_minus_return, double threshold, double beta) {
  return (beta > 0.0 ? mean_estimate_minus_return : -mean_estimate_minus_return) >= threshold;
}

BaseAlgSpec rsmb_base(const RsmbConfig& base, double rho_scale) {
  BaseAlgSpec spec;
  spec.label = "rsmb";
  spec.factory = [base](int length) -> std::unique_ptr<EpisodicAgent> {
    RsmbConfig cfg = base;
    cfg.restart_period = length;
    return std::make_unique<RsmbAgent>(cfg);
  };
  const MdpShape shape = base.shape;
  spec.rho = [shape, rho_scale](double m) { return rho_rsmb(m, shape, rho_scale); };
  return spec;
}

BaseAlgSpec rsq_base(const RsqConfig& base, double rho_scale) {
  BaseAlgSpec spec;
  spec.label = "rsq";
  spec.factory = [base](int length) -> std::unique_ptr<EpisodicAgent> {
    RsqConfig cfg = base;
    cfg.restart_period = length;
    return std::make_unique<RsqAgent>(cfg);
  };
  const MdpShape shape = base.shape;
  spec.rho = [shape, rho_scale](double m) { return rho_rsq(m, shape, rho_scale); };
  return spec;
}

AdaptiveAgent::AdaptiveAgent(const MdpShape& shape, BaseAlgSpec base, int initial_state, std::uint64_t schedule_seed)
    : shape_(shape), base_(std::move(base)), initial_state_(initial_state), schedule_rng_(schedule_seed) {
  shape_.validate();
  if (!base_.factory || !base_.rho) throw std::invalid_argument("adaptive: base algorithm spec is incomplete");
}

void AdaptiveAgent::start_block(int m) {
  block_start_ = m;
  block_order_ = next_block_order_;
  spans_ = malg_init(block_order_, base_.rho, schedule_rng_);
  instances_.clear();
  instances_.reserve(spans_.size());
  for (const auto& sp : spans_) {
    ScheduledInstance inst;
    inst.span = {m + sp.start - 1, m + sp.end - 1, sp.order};
    instances_.push_back(std::move(inst));
  }
  gap_sum_ = 0.0;
  next_block_start_ = m + (1 << block_order_);
}

void AdaptiveAgent::begin_episode(int m) {
  flags_ = {};
  current_episode_ = m;
  if (m == next_block_start_) {
    start_block(m);
    flags_.block_start = true;
    if (pending_restart_) {
      flags_.restart = true;
      ++epoch_;
      pending_restart_ = false;
    }
  } else if (m < block_start_ || m >= next_block_start_) {
    throw std::logic_error("adaptive: episodes must be played in order");
  }
  flags_.epoch_id = epoch_;

  active_ = active_instance(spans_, m - block_start_ + 1);
  auto& inst = instances_[active_];
  if (!inst.agent) inst.agent = base_.factory(inst.span.length());
  inst.agent->begin_episode(++inst.local_episode);
  estimate_ = inst.agent->exp_value_estimate(initial_state_);
  if (m == block_start_) extremum_ = estimate_;
  else extremum_ = shape_.beta > 0.0 ? std::min(extremum_, estimate_) : std::max(extremum_, estimate_);
}

int AdaptiveAgent::act(int h, int s) const { return instances_[active_].agent->act(h, s); }

MarkovPolicy AdaptiveAgent::policy() const { return instances_[active_].agent->policy(); }

double AdaptiveAgent::exp_value_estimate(int s) const { return instances_[active_].agent->exp_value_estimate(s); }

int AdaptiveAgent::instances_started() const {
  return static_cast<int>(std::count_if(instances_.begin(), instances_.end(),
                                        [](const ScheduledInstance& inst) { return inst.agent != nullptr; }));
}

void AdaptiveAgent::record(const EpisodeRecord& episode) {
  const int m = current_episode_;
  instances_[active_].agent->record(episode);
  const double R = episode.exp_return;
  gap_sum_ += estimate_ - R;

  bool fail1 = false;
  for (auto& inst : instances_) {
    if (inst.span.start > m || m > inst.span.end) continue;
    inst.return_sum += R;
    if (m == inst.span.end) {
      const double mean = inst.return_sum / inst.span.length();
      fail1 = fail1 || test1_fails(mean, extremum_, 9.0 * rho_hat_at(inst.span.length()), shape_.beta);
    }
  }
  const int elapsed = m - block_start_ + 1;
  const bool fail2 = test2_fails(gap_sum_ / elapsed, 3.0 * rho_hat_at(elapsed), shape_.beta);

  flags_.test1_fail = fail1;
  flags_.test2_fail = fail2;
  if (fail1 || fail2) {
    next_block_start_ = m + 1;
    next_block_order_ = 0;
    pending_restart_ = true;
  } else if (m + 1 == next_block_start_) {
    next_block_order_ = block_order_ + 1;
  }
}

}  // namespace rsrl
