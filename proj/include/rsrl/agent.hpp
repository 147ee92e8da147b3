#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rsrl/mdp.hpp"
#include "rsrl/oracle.hpp"

namespace rsrl {

/// Exponential-domain tables kept by the optimistic agents.
struct ExpValueTables {
  std::vector<MatrixX<double>> G;  // [h] S x A, e^{beta Q_h(s,a)}
  MatrixX<double> V;               // (H+1) x S, value domain, row H is zero
};

/// Interaction contract used by the harness: the policy of episode m is
/// fixed by `begin_episode(m)` and the feedback arrives through `record`.
class EpisodicAgent {
 public:
  virtual ~EpisodicAgent() = default;

  virtual void begin_episode(int m) = 0;
  virtual int act(int h, int s) const = 0;
  virtual void record(const EpisodeRecord& episode) = 0;

  /// Markov policy followed during the current episode.
  virtual MarkovPolicy policy() const = 0;
  /// Current optimistic estimate e^{beta V_1(s)}.
  virtual double exp_value_estimate(int s) const = 0;
  /// Events attached to the current episode.
  virtual EpisodeFlags flags() const = 0;
  virtual std::string label() const = 0;
};

/// First episode of the epoch containing m: l = (ceil(m/W) - 1) W + 1.
int restart_index(int m, int period);

/// Greedy action on (1/beta) log G; ties go to the smallest index.
template <typename Row>
int greedy_action(const Row& g_row, double beta) {
  int best = 0;
  for (int a = 1; a < g_row.size(); ++a) {
    if (beta > 0.0 ? g_row[a] > g_row[best] : g_row[a] < g_row[best]) best = a;
  }
  return best;
}

/// Clip toward the optimistic bound e^{beta * steps}: min for beta > 0,
/// max for beta < 0.
inline double clip_optimistic(double value, double cap, double beta) {
  return beta > 0.0 ? std::min(cap, value) : std::max(cap, value);
}

/// Value assigned by the restart initialization at step h. Literal reading
/// gives H-h+1 for beta > 0 and 0 for beta < 0; `optimistic_init` uses H-h+1
/// for both signs.
inline double initial_value(int steps_to_go, double beta, bool optimistic_init) {
  return (beta > 0.0 || optimistic_init) ? static_cast<double>(steps_to_go) : 0.0;
}

/// Which exponent set to use in the recommended restart period of Restart-RSQ.
enum class RsqWindowRule { kStandard, kReduced };

/// W = clamp(floor(M^{2/3} B^{-2/3} S^{2/3} A^{1/3}), 1, M).
int recommended_window_rsmb(int num_episodes, double budget, int num_states, int num_actions);

/// W = clamp(floor(M^{2/3} H^{-3/4} B^{-2/3} S^{e} A^{1/3}), 1, M), e = 2/3
/// (standard) or 1/3 (reduced).
int recommended_window_rsq(int num_episodes, double budget, int num_states, int num_actions, int horizon,
                           RsqWindowRule rule = RsqWindowRule::kStandard);

}  // namespace rsrl
