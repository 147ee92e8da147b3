#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "rsrl/mdp.hpp"

namespace rsrl {

/// Value and action-value tables in both the value and the exponential
/// domain. `V` has H+1 rows (row H is the terminal zero row).
template <typename Scalar>
struct ValueSolution {
  Scalar beta = Scalar(0);
  MatrixX<Scalar> V;                  // (H+1) x S
  MatrixX<Scalar> expV;               // e^{beta V}
  std::vector<MatrixX<Scalar>> Q;     // [h] S x A
  std::vector<MatrixX<Scalar>> expQ;  // [h] e^{beta Q}
  MarkovPolicy greedy;                // H x S, argmax with smallest-index ties

  int horizon() const { return static_cast<int>(Q.size()); }
};

template <typename Scalar>
struct Backup {
  MatrixX<Scalar> q;      // S x A
  MatrixX<Scalar> exp_q;  // S x A
};

/// One exponential Bellman backup at step h:
/// e^{beta Q(s,a)} = sum_{s'} P(s'|s,a) e^{beta (r(s,a) + V_next(s'))}.
template <typename Scalar>
Backup<Scalar> exp_bellman_backup(const MdpSnapshot<Scalar>& snap, int h, const VectorX<Scalar>& v_next, Scalar beta) {
  const int S = snap.num_states();
  const int A = snap.num_actions();
  const VectorX<Scalar> exp_next = (beta * v_next.array()).exp().matrix();
  const VectorX<Scalar> cont = snap.transitions[h] * exp_next;  // index s*A + a
  Backup<Scalar> out;
  out.exp_q = (beta * snap.rewards[h].array()).exp().matrix();
  out.exp_q.array() *= cont.reshaped(A, S).transpose().array();
  out.q = out.exp_q.array().log().matrix() / beta;
  return out;
}

namespace detail {

template <typename Scalar>
ValueSolution<Scalar> empty_solution(const MdpSnapshot<Scalar>& snap, Scalar beta) {
  const int H = snap.horizon();
  const int S = snap.num_states();
  ValueSolution<Scalar> sol;
  sol.beta = beta;
  sol.V = MatrixX<Scalar>::Zero(H + 1, S);
  sol.expV = MatrixX<Scalar>::Ones(H + 1, S);
  sol.Q.resize(H);
  sol.expQ.resize(H);
  sol.greedy = MarkovPolicy::Zero(H, S);
  return sol;
}

/// Index of the largest entry; first one wins on ties.
template <typename Row>
int first_argmax(const Row& row) {
  int best = 0;
  for (int a = 1; a < row.size(); ++a)
    if (row[a] > row[best]) best = a;
  return best;
}

}  // namespace detail

/// Backward induction of the optimal exponential Bellman equation.
template <typename Scalar>
ValueSolution<Scalar> optimal_values(const MdpSnapshot<Scalar>& snap, Scalar beta) {
  auto sol = detail::empty_solution(snap, beta);
  for (int h = snap.horizon() - 1; h >= 0; --h) {
    auto backup = exp_bellman_backup<Scalar>(snap, h, sol.V.row(h + 1).transpose(), beta);
    for (int s = 0; s < snap.num_states(); ++s) {
      const int a = detail::first_argmax(backup.q.row(s));
      sol.greedy(h, s) = a;
      sol.V(h, s) = backup.q(s, a);
      sol.expV(h, s) = backup.exp_q(s, a);
    }
    sol.Q[h] = std::move(backup.q);
    sol.expQ[h] = std::move(backup.exp_q);
  }
  return sol;
}

/// Entropic value of a fixed deterministic Markov policy.
template <typename Scalar>
ValueSolution<Scalar> policy_values(const MdpSnapshot<Scalar>& snap, const MarkovPolicy& policy, Scalar beta) {
  auto sol = detail::empty_solution(snap, beta);
  sol.greedy = policy;
  for (int h = snap.horizon() - 1; h >= 0; --h) {
    auto backup = exp_bellman_backup<Scalar>(snap, h, sol.V.row(h + 1).transpose(), beta);
    for (int s = 0; s < snap.num_states(); ++s) {
      const int a = policy(h, s);
      sol.V(h, s) = backup.q(s, a);
      sol.expV(h, s) = backup.exp_q(s, a);
    }
    sol.Q[h] = std::move(backup.q);
    sol.expQ[h] = std::move(backup.exp_q);
  }
  return sol;
}

/// Expected-return values (the beta -> 0 limit). Exponential tables are ones.
template <typename Scalar>
ValueSolution<Scalar> risk_neutral_values(const MdpSnapshot<Scalar>& snap, const MarkovPolicy& policy) {
  auto sol = detail::empty_solution(snap, Scalar(0));
  sol.greedy = policy;
  const int S = snap.num_states();
  const int A = snap.num_actions();
  for (int h = snap.horizon() - 1; h >= 0; --h) {
    const VectorX<Scalar> cont = snap.transitions[h] * sol.V.row(h + 1).transpose();
    sol.Q[h] = snap.rewards[h] + cont.reshaped(A, S).transpose();
    sol.expQ[h] = MatrixX<Scalar>::Ones(S, A);
    for (int s = 0; s < S; ++s) sol.V(h, s) = sol.Q[h](s, policy(h, s));
  }
  return sol;
}

/// Every deterministic Markov policy, `A^(S*H)` of them, in lexicographic order.
std::vector<MarkovPolicy> enumerate_policies(int num_states, int num_actions, int horizon);

/// Per-episode regret bookkeeping.
struct RegretTrace {
  std::vector<double> v_star;
  std::vector<double> v_pi;
  std::vector<double> regret_increment;
  std::vector<double> cumulative;
  std::vector<double> exp_return;
  std::vector<double> exp_estimate;  // g_m, the agent's e^{beta V_1(s1)}
  std::vector<int> epoch_id;
  std::vector<int> restart;
  std::vector<int> test1_fail;
  std::vector<int> test2_fail;
  std::vector<int> block_start;
  std::map<std::string, std::string> header;

  std::size_t size() const { return v_star.size(); }
  double final_regret() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
  int restarts() const;
};

struct EpisodeFlags {
  bool restart = false;
  bool test1_fail = false;
  bool test2_fail = false;
  bool block_start = false;
  int epoch_id = 0;
};

/// Appends per-episode oracle values to a RegretTrace; optimal values are
/// cached per segment.
class RegretTracker {
 public:
  explicit RegretTracker(const MdpSequence& seq);

  /// Records episode m (1-based, strictly increasing) played with `policy`.
  void record(int m, const MarkovPolicy& policy, double exp_return, double exp_estimate, const EpisodeFlags& flags);

  double optimal_value(int m);
  const ValueSolution<double>& optimal_solution(int m);

  const RegretTrace& trace() const { return trace_; }
  RegretTrace& trace() { return trace_; }
  RegretTrace release() { return std::move(trace_); }

 private:
  const MdpSequence& seq_;
  std::vector<ValueSolution<double>> cache_;
  std::vector<bool> cached_;
  RegretTrace trace_;
  MarkovPolicy last_policy_;
  std::size_t last_segment_ = static_cast<std::size_t>(-1);
  double last_v_pi_ = 0.0;
};

/// Regret of a per-episode list of executed policies. `exp_return` (if
/// given) fills the realized-return channel; otherwise it is left at 0.
RegretTrace dynamic_regret(const MdpSequence& seq, const std::vector<MarkovPolicy>& policies,
                           const std::vector<double>& exp_return = {});

/// Learning-rate weights for alpha_j = (H+1)/(H+j):
/// `zero` = prod_{j<=t}(1-alpha_j), `weights[i-1]` = alpha_i prod_{i<j<=t}(1-alpha_j).
struct AlphaWeights {
  double zero = 1.0;
  std::vector<double> weights;
};

inline double learning_rate(int t, int horizon) { return (horizon + 1.0) / (horizon + static_cast<double>(t)); }

AlphaWeights alpha_weights(int t, int horizon);

}  // namespace rsrl
