#include "rsrl/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsrl {

int restart_index(int m, int period) {
  if (m < 1 || period < 1) throw std::invalid_argument("restart_index: m and W must be >= 1");
  return ((m + period - 1) / period - 1) * period + 1;
}

namespace {

int clamp_window(double raw, int num_episodes) {
  if (!std::isfinite(raw)) return raw > 0 ? num_episodes : 1;
  // pow() rounding can land just below an exact integer, e.g. 511.99999999999983 for 2^9
  const double nudged = std::floor(raw * (1.0 + 1e-12));
  return static_cast<int>(std::clamp(nudged, 1.0, static_cast<double>(num_episodes)));
}

}  // namespace

int recommended_window_rsmb(int num_episodes, double budget, int num_states, int num_actions) {
  if (!(budget > 0.0)) throw std::invalid_argument("recommended W needs a positive variation budget");
  const double raw = std::pow(num_episodes, 2.0 / 3.0) * std::pow(budget, -2.0 / 3.0) *
                     std::pow(num_states, 2.0 / 3.0) * std::cbrt(static_cast<double>(num_actions));
  return clamp_window(raw, num_episodes);
}

int recommended_window_rsq(int num_episodes, double budget, int num_states, int num_actions, int horizon,
                           RsqWindowRule rule) {
  if (!(budget > 0.0)) throw std::invalid_argument("recommended W needs a positive variation budget");
  const double state_exp = rule == RsqWindowRule::kStandard ? 2.0 / 3.0 : 1.0 / 3.0;
  const double raw = std::pow(num_episodes, 2.0 / 3.0) * std::pow(horizon, -0.75) * std::pow(budget, -2.0 / 3.0) *
                     std::pow(num_states, state_exp) * std::cbrt(static_cast<double>(num_actions));
  return clamp_window(raw, num_episodes);
}

}  // namespace rsrl
