#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace rsrl {

/// Largest |beta| * (H + 1) accepted; keeps every exponential value inside
/// [e^-30, e^30].
inline constexpr double kMaxExponent = 30.0;

/// Dimensions and risk parameters of an episodic tabular problem.
///
/// Steps are indexed 0..H-1 in code; step h has `steps_to_go(h) = H - h`
/// remaining rewards including its own. Episodes are indexed 1..M.
struct MdpShape {
  int num_states = 1;
  int num_actions = 1;
  int horizon = 1;
  int num_episodes = 1;
  double beta = 1.0;
  double delta = 0.1;

  int steps_to_go(int h) const { return horizon - h; }

  void validate() const {
    if (num_states < 1) throw std::invalid_argument("MdpShape: num_states must be >= 1");
    if (num_actions < 1) throw std::invalid_argument("MdpShape: num_actions must be >= 1");
    if (horizon < 1) throw std::invalid_argument("MdpShape: horizon must be >= 1");
    if (num_episodes < 1) throw std::invalid_argument("MdpShape: num_episodes must be >= 1");
    if (beta == 0.0 || !std::isfinite(beta)) throw std::invalid_argument("MdpShape: beta must be finite and nonzero");
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("MdpShape: delta must lie in (0, 1]");
    if (std::abs(beta) * (horizon + 1) > kMaxExponent) {
      throw std::invalid_argument("MdpShape: |beta|*(H+1) = " + std::to_string(std::abs(beta) * (horizon + 1)) +
                                  " exceeds the numeric guard of 30");
    }
  }
};

}  // namespace rsrl
