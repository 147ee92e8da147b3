#include "rsrl/rsq.hpp"

#include <cmath>
#include <stdexcept>

namespace rsrl {

void RsqConfig::validate() const {
  shape.validate();
  if (restart_period < 1 || restart_period > shape.num_episodes)
    throw std::invalid_argument("rsq: restart period must satisfy 1 <= W <= M");
  if (!(bonus_scale > 1.0)) throw std::invalid_argument("rsq: bonus constant C2 must exceed 1");
  if (initial_state < 0 || initial_state >= shape.num_states) throw std::invalid_argument("rsq: bad initial state");
}

RsqAgent::RsqAgent(RsqConfig config) : config_(config) {
  config_.validate();
  const auto& sh = config_.shape;
  log_factor_ =
      std::log(static_cast<double>(sh.num_episodes) * sh.horizon * sh.num_states * sh.num_actions / sh.delta);
  counts_.assign(sh.horizon, Eigen::MatrixXi::Zero(sh.num_states, sh.num_actions));
  tables_.G.assign(sh.horizon, MatrixX<double>::Ones(sh.num_states, sh.num_actions));
  tables_.V = MatrixX<double>::Zero(sh.horizon + 1, sh.num_states);
  reset();
}

void RsqAgent::reset() {
  const auto& sh = config_.shape;
  for (int h = 0; h < sh.horizon; ++h) {
    counts_[h].setZero();
    const double v0 = initial_value(sh.steps_to_go(h), sh.beta, config_.optimistic_init);
    tables_.G[h].setConstant(std::exp(sh.beta * v0));
    tables_.V.row(h).setConstant(v0);
  }
  tables_.V.row(sh.horizon).setZero();
}

double RsqAgent::bonus(int h, int visits) const {
  const auto& sh = config_.shape;
  const double spread = std::abs(std::exp(sh.beta * sh.steps_to_go(h)) - 1.0);
  return config_.bonus_scale * spread * std::sqrt(sh.num_states * log_factor_ / visits);
}

void RsqAgent::update(int h, int s, int a, double r, int s_next) {
  const auto& sh = config_.shape;
  const double beta = sh.beta;
  const int t = ++counts_[h](s, a);
  const double alpha = learning_rate(t, sh.horizon);
  const double target = std::exp(beta * (r + tables_.V(h + 1, s_next)));
  auto& G = tables_.G[h];
  const double w = (1.0 - alpha) * G(s, a) + alpha * target;
  const double step = alpha * bonus(h, t);
  const double cap = std::exp(beta * sh.steps_to_go(h));
  const double raw = beta > 0.0 ? w + step : w - step;
  G(s, a) = clip_optimistic(raw, cap, beta);
  last_clipped_ = G(s, a) != raw;
  tables_.V(h, s) = std::log(G(s, greedy_action(G.row(s), beta))) / beta;
}

void RsqAgent::begin_episode(int m) {
  flags_ = {};
  if (m == restart_index(m, config_.restart_period)) {
    reset();
    epoch_start_ = m;
    if (m > 1) {
      ++epoch_;
      flags_.restart = true;
    }
  }
  flags_.epoch_id = epoch_;
}

int RsqAgent::act(int h, int s) const { return greedy_action(tables_.G[h].row(s), config_.shape.beta); }

MarkovPolicy RsqAgent::policy() const {
  const auto& sh = config_.shape;
  MarkovPolicy p(sh.horizon, sh.num_states);
  for (int h = 0; h < sh.horizon; ++h)
    for (int s = 0; s < sh.num_states; ++s) p(h, s) = act(h, s);
  return p;
}

double RsqAgent::exp_value_estimate(int s) const { return std::exp(config_.shape.beta * tables_.V(0, s)); }

void RsqAgent::record(const EpisodeRecord& episode) {
  for (int h = 0; h < static_cast<int>(episode.steps.size()); ++h) {
    const auto& st = episode.steps[h];
    update(h, st.state, st.action, st.reward, episode.next_state(h));
  }
}

}  // namespace rsrl
