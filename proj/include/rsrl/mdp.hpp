#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsrl/shape.hpp"

namespace rsrl {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
/// Row-major kernel: row `s * A + a` holds P(. | s, a).
template <typename Scalar>
using KernelX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Deterministic rewards and transition kernels of one episode.
template <typename Scalar>
struct MdpSnapshot {
  std::vector<MatrixX<Scalar>> rewards;      // [h] S x A, values in [0, 1]
  std::vector<KernelX<Scalar>> transitions;  // [h] (S*A) x S

  static MdpSnapshot zeros(int num_states, int num_actions, int horizon) {
    MdpSnapshot snap;
    snap.rewards.assign(horizon, MatrixX<Scalar>::Zero(num_states, num_actions));
    snap.transitions.assign(horizon, KernelX<Scalar>::Zero(num_states * num_actions, num_states));
    return snap;
  }

  int horizon() const { return static_cast<int>(rewards.size()); }
  int num_states() const { return rewards.empty() ? 0 : static_cast<int>(rewards.front().rows()); }
  int num_actions() const { return rewards.empty() ? 0 : static_cast<int>(rewards.front().cols()); }

  Scalar reward(int h, int s, int a) const { return rewards[h](s, a); }
  auto kernel(int h, int s, int a) const { return transitions[h].row(s * num_actions() + a); }
  auto kernel(int h, int s, int a) { return transitions[h].row(s * num_actions() + a); }

  /// Throws std::invalid_argument naming the first offending entry.
  void validate(double tol = 1e-12) const {
    if (transitions.size() != rewards.size()) throw std::invalid_argument("snapshot: rewards/transitions horizon mismatch");
    const int S = num_states();
    const int A = num_actions();
    for (int h = 0; h < horizon(); ++h) {
      if (rewards[h].rows() != S || rewards[h].cols() != A) throw std::invalid_argument("snapshot: reward table shape mismatch");
      if (transitions[h].rows() != S * A || transitions[h].cols() != S)
        throw std::invalid_argument("snapshot: transition table shape mismatch");
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          const double r = static_cast<double>(rewards[h](s, a));
          if (!(r >= 0.0 && r <= 1.0)) {
            throw std::invalid_argument("snapshot: reward r[" + std::to_string(h) + "][" + std::to_string(s) + "][" +
                                        std::to_string(a) + "] outside [0,1]");
          }
          const auto row = kernel(h, s, a);
          if ((row.array() < Scalar(0)).any())
            throw std::invalid_argument("snapshot: negative transition probability at h=" + std::to_string(h));
          if (std::abs(static_cast<double>(row.sum()) - 1.0) > tol) {
            throw std::invalid_argument("snapshot: transition row p[" + std::to_string(h) + "][" + std::to_string(s) + "][" +
                                        std::to_string(a) + "] does not sum to 1");
          }
        }
      }
    }
  }
};

using Snapshot = MdpSnapshot<double>;

/// Deterministic Markov policy, `actions(h, s)`.
using MarkovPolicy = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Snapshot held constant on episodes [first, last].
struct Segment {
  int first = 1;
  int last = 1;
  Snapshot snapshot;
};

/// Non-stationary episodic MDP stored as piecewise-constant segments.
/// Immutable after construction.
class MdpSequence {
 public:
  MdpSequence(MdpShape shape, int initial_state, std::vector<Segment> segments,
              std::map<std::string, double> metadata = {});

  const MdpShape& shape() const { return shape_; }
  int initial_state() const { return initial_state_; }
  int num_episodes() const { return shape_.num_episodes; }

  /// Snapshot in force during episode m (1-based).
  const Snapshot& snapshot(int m) const { return segments_[segment_index(m)].snapshot; }
  std::size_t segment_index(int m) const;
  const std::vector<Segment>& segments() const { return segments_; }

  const std::map<std::string, double>& metadata() const { return metadata_; }
  double meta(const std::string& key, double fallback = 0.0) const {
    auto it = metadata_.find(key);
    return it == metadata_.end() ? fallback : it->second;
  }
  void set_meta(const std::string& key, double value) { metadata_[key] = value; }

 private:
  MdpShape shape_;
  int initial_state_;
  std::vector<Segment> segments_;
  std::map<std::string, double> metadata_;
};

struct Step {
  int state = 0;
  int action = 0;
  double reward = 0.0;
};

struct EpisodeRecord {
  int episode = 1;
  std::vector<Step> steps;  // length H
  int terminal_state = 0;
  double total_reward = 0.0;
  double exp_return = 1.0;  // e^{beta * total_reward}

  int next_state(int h) const {
    return h + 1 < static_cast<int>(steps.size()) ? steps[h + 1].state : terminal_state;
  }
};

}  // namespace rsrl
