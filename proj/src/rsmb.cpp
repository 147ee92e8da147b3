#include "rsrl/rsmb.hpp"

#include <cmath>
#include <stdexcept>

namespace rsrl {

void RsmbConfig::validate() const {
  shape.validate();
  if (restart_period < 1 || restart_period > shape.num_episodes)
    throw std::invalid_argument("rsmb: restart period must satisfy 1 <= W <= M");
  if (!(bonus_scale > 1.0)) throw std::invalid_argument("rsmb: bonus constant C1 must exceed 1");
  if (regularizer != 1.0) throw std::invalid_argument("rsmb: regularizer lambda is fixed to 1");
  if (!(confidence > 0.0 && confidence <= 1.0)) throw std::invalid_argument("rsmb: confidence must lie in (0, 1]");
  if (initial_state < 0 || initial_state >= shape.num_states) throw std::invalid_argument("rsmb: bad initial state");
}

RsmbAgent::RsmbAgent(RsmbConfig config) : config_(config) {
  config_.validate();
  const auto& sh = config_.shape;
  log_factor_ = std::log(6.0 * config_.restart_period * sh.horizon * sh.num_states * sh.num_actions / config_.confidence);
  visit_counts_.assign(sh.horizon, MatrixX<double>::Zero(sh.num_states, sh.num_actions));
  reward_sums_ = visit_counts_;
  transition_counts_.assign(sh.horizon, KernelX<double>::Zero(sh.num_states * sh.num_actions, sh.num_states));
  tables_.G.assign(sh.horizon, MatrixX<double>::Ones(sh.num_states, sh.num_actions));
  tables_.V = MatrixX<double>::Zero(sh.horizon + 1, sh.num_states);
  reset();
}

void RsmbAgent::reset() {
  const auto& sh = config_.shape;
  for (int h = 0; h < sh.horizon; ++h) {
    visit_counts_[h].setZero();
    reward_sums_[h].setZero();
    transition_counts_[h].setZero();
    const double v0 = initial_value(sh.steps_to_go(h), sh.beta, config_.optimistic_init);
    tables_.G[h].setConstant(std::exp(sh.beta * v0));
    tables_.V.row(h).setConstant(v0);
  }
  tables_.V.row(sh.horizon).setZero();
}

double RsmbAgent::bonus(int h, double visits) const {
  const auto& sh = config_.shape;
  const double beta = sh.beta;
  const double cap = std::exp(beta * sh.steps_to_go(h));
  const double scale = beta > 0.0 ? (cap - 1.0) + cap * beta : (1.0 - cap) - beta;
  return config_.bonus_scale * scale * std::sqrt(sh.num_states * log_factor_ / (visits + 1.0));
}

KernelX<double> RsmbAgent::estimated_kernel(int h) const {
  const double lambda = config_.regularizer;
  const int S = config_.shape.num_states;
  KernelX<double> p = transition_counts_[h].array() + lambda / S;
  p.array().colwise() /= transition_counts_[h].rowwise().sum().array() + lambda;
  return p;
}

double RsmbAgent::estimated_transition(int h, int s, int a, int s_next) const {
  const double lambda = config_.regularizer;
  return (transitions(h, s, a, s_next) + lambda / config_.shape.num_states) / (visits(h, s, a) + lambda);
}

double RsmbAgent::estimated_reward(int h, int s, int a) const {
  return reward_sums_[h](s, a) / (visits(h, s, a) + config_.regularizer);
}

void RsmbAgent::plan() {
  const auto& sh = config_.shape;
  const double beta = sh.beta;
  const int S = sh.num_states;
  const int A = sh.num_actions;
  for (int h = sh.horizon - 1; h >= 0; --h) {
    const double cap = std::exp(beta * sh.steps_to_go(h));
    const VectorX<double> exp_next = (beta * tables_.V.row(h + 1).transpose().array()).exp().matrix();
    const VectorX<double> cont = estimated_kernel(h) * exp_next;
    const MatrixX<double> r_hat = reward_sums_[h].array() / (visit_counts_[h].array() + config_.regularizer);
    auto& G = tables_.G[h];
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double w = std::exp(beta * r_hat(s, a)) * cont[s * A + a];
        const double gamma = bonus(h, visit_counts_[h](s, a));
        G(s, a) = clip_optimistic(beta > 0.0 ? w + gamma : w - gamma, cap, beta);
      }
      tables_.V(h, s) = std::log(G(s, greedy_action(G.row(s), beta))) / beta;
    }
  }
}

void RsmbAgent::begin_episode(int m) {
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
  plan();
}

int RsmbAgent::act(int h, int s) const { return greedy_action(tables_.G[h].row(s), config_.shape.beta); }

MarkovPolicy RsmbAgent::policy() const {
  const auto& sh = config_.shape;
  MarkovPolicy p(sh.horizon, sh.num_states);
  for (int h = 0; h < sh.horizon; ++h)
    for (int s = 0; s < sh.num_states; ++s) p(h, s) = act(h, s);
  return p;
}

double RsmbAgent::exp_value_estimate(int s) const { return std::exp(config_.shape.beta * tables_.V(0, s)); }

void RsmbAgent::observe(int h, int s, int a, double r, int s_next) {
  visit_counts_[h](s, a) += 1.0;
  transition_counts_[h](s * config_.shape.num_actions + a, s_next) += 1.0;
  reward_sums_[h](s, a) += r;
}

void RsmbAgent::record(const EpisodeRecord& episode) {
  for (int h = 0; h < static_cast<int>(episode.steps.size()); ++h) {
    const auto& st = episode.steps[h];
    observe(h, st.state, st.action, st.reward, episode.next_state(h));
  }
}

}  // namespace rsrl
