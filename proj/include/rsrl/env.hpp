#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "rsrl/mdp.hpp"
#include "rsrl/random.hpp"

namespace rsrl {

using PolicyFn = std::function<int(int h, int s)>;

/// Samples one episode of `seq` at episode m from the fixed initial state.
/// Throws std::out_of_range for a bad episode index or action.
EpisodeRecord run_episode(const MdpSequence& seq, int m, const PolicyFn& policy, Rng& rng);

struct VariationBudget {
  double reward = 0.0;      // B_r
  double transition = 0.0;  // B_P
  double total() const { return reward + transition; }
};

/// Sum over consecutive pairs (m, m+1) with m1 <= m < m2 of the per-step sup
/// drift in rewards and L1 drift in kernels.
VariationBudget variation_budgets(const MdpSequence& seq, int m1, int m2);

/// Per-pair drift between two snapshots of equal shape.
VariationBudget snapshot_drift(const Snapshot& lhs, const Snapshot& rhs);

/// Rewards uniform on [0,1]; kernel rows drawn from a flat Dirichlet.
Snapshot make_random_snapshot(int num_states, int num_actions, int horizon, Rng& rng);

/// Segment bounds for splitting M episodes into chunks of ceil(M/L).
std::vector<std::pair<int, int>> segment_bounds(int num_episodes, int num_segments);

/// Piecewise-constant family. At each boundary the snapshot moves to
/// `(1 - c) * previous + c * fresh_random` with c = change_magnitude in [0,1],
/// so every switch changes each reward by at most c and each kernel row by at
/// most 2c in L1. Metadata: segments, budget_r, budget_p, budget.
MdpSequence make_switching_sequence(const MdpShape& shape, int num_segments, double change_magnitude, Rng& rng);

/// Switching k-armed bandit embedded in an MDP with 2k+1 states, k actions and
/// horizon H_bandit + 2. State 0 is the start; arm j leads to absorbing state
/// 1 + 2j (reward 1 per step) or 2 + 2j (reward 0). The optimal arm is resampled
/// uniformly at every segment boundary. Metadata: segments, gap, segment_length,
/// base_prob, budget_r, budget_p, budget.
MdpSequence make_lower_bound_instance(int num_arms, int bandit_horizon, int num_episodes, double beta, double budget,
                                      Rng& rng, double delta = 0.1);

/// Plain-text dump: a `shape`/`initial_state` preamble, then per segment a
/// `segment m_start m_end` header followed by `r h s a value` and
/// `p h s a s' value` lines (zero probabilities omitted).
void write_sequence(std::ostream& out, const MdpSequence& seq);
MdpSequence read_sequence(std::istream& in);

}  // namespace rsrl
