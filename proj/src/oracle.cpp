#include "rsrl/oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace rsrl {

std::vector<MarkovPolicy> enumerate_policies(int num_states, int num_actions, int horizon) {
  const int cells = num_states * horizon;
  double count = std::pow(static_cast<double>(num_actions), cells);
  if (count > 1 << 20) throw std::invalid_argument("enumerate_policies: too many policies");
  std::vector<MarkovPolicy> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<int> digits(cells, 0);
  while (true) {
    MarkovPolicy p(horizon, num_states);
    for (int h = 0; h < horizon; ++h)
      for (int s = 0; s < num_states; ++s) p(h, s) = digits[h * num_states + s];
    out.push_back(std::move(p));
    int i = cells - 1;
    while (i >= 0 && ++digits[i] == num_actions) digits[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

int RegretTrace::restarts() const { return static_cast<int>(std::count(restart.begin(), restart.end(), 1)); }

RegretTracker::RegretTracker(const MdpSequence& seq)
    : seq_(seq), cache_(seq.segments().size()), cached_(seq.segments().size(), false) {}

const ValueSolution<double>& RegretTracker::optimal_solution(int m) {
  const std::size_t idx = seq_.segment_index(m);
  if (!cached_[idx]) {
    cache_[idx] = optimal_values(seq_.segments()[idx].snapshot, seq_.shape().beta);
    cached_[idx] = true;
  }
  return cache_[idx];
}

double RegretTracker::optimal_value(int m) { return optimal_solution(m).V(0, seq_.initial_state()); }

void RegretTracker::record(int m, const MarkovPolicy& policy, double exp_return, double exp_estimate,
                           const EpisodeFlags& flags) {
  if (static_cast<int>(trace_.size()) + 1 != m) throw std::logic_error("RegretTracker: episodes must be recorded in order");
  const int s1 = seq_.initial_state();
  const double v_star = optimal_value(m);
  const std::size_t seg = seq_.segment_index(m);
  if (seg != last_segment_ || policy.rows() != last_policy_.rows() || policy.cols() != last_policy_.cols() ||
      policy != last_policy_) {
    last_v_pi_ = policy_values(seq_.snapshot(m), policy, seq_.shape().beta).V(0, s1);
    last_policy_ = policy;
    last_segment_ = seg;
  }
  const double v_pi = last_v_pi_;
  const double inc = v_star - v_pi;
  trace_.v_star.push_back(v_star);
  trace_.v_pi.push_back(v_pi);
  trace_.regret_increment.push_back(inc);
  trace_.cumulative.push_back((trace_.cumulative.empty() ? 0.0 : trace_.cumulative.back()) + inc);
  trace_.exp_return.push_back(exp_return);
  trace_.exp_estimate.push_back(exp_estimate);
  trace_.epoch_id.push_back(flags.epoch_id);
  trace_.restart.push_back(flags.restart);
  trace_.test1_fail.push_back(flags.test1_fail);
  trace_.test2_fail.push_back(flags.test2_fail);
  trace_.block_start.push_back(flags.block_start);
}

RegretTrace dynamic_regret(const MdpSequence& seq, const std::vector<MarkovPolicy>& policies,
                           const std::vector<double>& exp_return) {
  if (static_cast<int>(policies.size()) != seq.num_episodes())
    throw std::invalid_argument("dynamic_regret: need exactly one policy per episode");
  RegretTracker tracker(seq);
  for (int m = 1; m <= seq.num_episodes(); ++m) {
    const double R = exp_return.empty() ? 0.0 : exp_return.at(m - 1);
    tracker.record(m, policies[m - 1], R, 0.0, {});
  }
  return tracker.release();
}

AlphaWeights alpha_weights(int t, int horizon) {
  if (t < 0) throw std::invalid_argument("alpha_weights: t must be nonnegative");
  AlphaWeights out;
  out.weights.resize(t);
  double tail = 1.0;  // prod_{j=i+1}^{t} (1 - alpha_j)
  for (int i = t; i >= 1; --i) {
    const double a = learning_rate(i, horizon);
    out.weights[i - 1] = a * tail;
    tail *= 1.0 - a;
  }
  out.zero = tail;
  return out;
}

}  // namespace rsrl
