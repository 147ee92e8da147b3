#include <doctest.h>

#include <cmath>
#include <functional>

#include "rsrl/env.hpp"
#include "rsrl/oracle.hpp"

using namespace rsrl;

namespace {

// E[e^{beta * sum r}] by summing over every trajectory of a fixed policy.
double trajectory_utility(const Snapshot& snap, const MarkovPolicy& pi, double beta, int s1) {
  const int H = snap.horizon();
  std::function<double(int, int, double, double)> walk = [&](int h, int s, double prob, double ret) -> double {
    if (h == H) return prob * std::exp(beta * ret);
    const int a = pi(h, s);
    double total = 0.0;
    const auto row = snap.kernel(h, s, a);
    for (int n = 0; n < snap.num_states(); ++n)
      if (row[n] > 0.0) total += walk(h + 1, n, prob * row[n], ret + snap.reward(h, s, a));
    return total;
  };
  return walk(0, s1, 1.0, 0.0);
}

Snapshot two_outcome(double risky_reward_next, double safe) {
  // State 0: action 0 is safe (reward `safe`, then absorbing zero),
  // action 1 is risky (reward 0, then 50/50 to state 1 or 2).
  // Collapsed into H=2 with the terminal step paying the outcome.
  Snapshot snap = Snapshot::zeros(3, 2, 2);
  snap.rewards[0](0, 0) = safe;
  snap.kernel(0, 0, 0)[2] = 1.0;
  snap.kernel(0, 0, 1)[1] = 0.5;
  snap.kernel(0, 0, 1)[2] = 0.5;
  for (int s = 1; s < 3; ++s)
    for (int a = 0; a < 2; ++a) snap.kernel(0, s, a)[s] = 1.0;
  for (int s = 0; s < 3; ++s)
    for (int a = 0; a < 2; ++a) snap.kernel(1, s, a)[s] = 1.0;
  snap.rewards[1](1, 0) = snap.rewards[1](1, 1) = risky_reward_next;
  return snap;
}

}  // namespace

TEST_CASE("terminal backup returns the reward") {
  Rng rng(1);
  Snapshot snap = make_random_snapshot(3, 2, 4, rng);
  snap.rewards[3].setOnes();
  for (double beta : {-2.0, -0.1, 0.3, 1.7}) {
    const auto b = exp_bellman_backup<double>(snap, 3, VectorX<double>::Zero(3), beta);
    CHECK((b.q.array() - 1.0).abs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("two-outcome backup") {
  Snapshot snap = Snapshot::zeros(2, 1, 1);
  snap.kernel(0, 0, 0) << 0.5, 0.5;
  snap.kernel(0, 1, 0) << 0.5, 0.5;
  VectorX<double> v(2);
  v << 0.0, 1.0;
  auto up = exp_bellman_backup<double>(snap, 0, v, 1.0);
  CHECK(up.exp_q(0, 0) == doctest::Approx((1 + std::exp(1.0)) / 2).epsilon(1e-14));
  CHECK(up.q(0, 0) == doctest::Approx(0.620115).epsilon(1e-6));
  auto down = exp_bellman_backup<double>(snap, 0, v, -1.0);
  CHECK(down.q(0, 0) == doctest::Approx(0.379885).epsilon(1e-6));
  CHECK(down.q(0, 0) == doctest::Approx(-std::log((1 + std::exp(-1.0)) / 2)).epsilon(1e-14));
}

TEST_CASE("optimal values: simple cases") {
  SUBCASE("single step max") {
    Snapshot snap = Snapshot::zeros(1, 2, 1);
    snap.rewards[0] << 0.3, 0.8;
    snap.kernel(0, 0, 0)[0] = snap.kernel(0, 0, 1)[0] = 1.0;
    for (double beta : {-3.0, -0.5, 0.01, 2.0}) {
      const auto sol = optimal_values(snap, beta);
      CHECK(sol.V(0, 0) == doctest::Approx(0.8).epsilon(1e-14));
      CHECK(sol.greedy(0, 0) == 1);
    }
  }
  SUBCASE("risk preference flips the choice") {
    const Snapshot snap = two_outcome(1.0, 0.5);
    const auto seek = optimal_values(snap, 1.0);
    CHECK(seek.V(0, 0) == doctest::Approx(std::log((1 + std::exp(1.0)) / 2)).epsilon(1e-14));
    CHECK(seek.greedy(0, 0) == 1);
    const auto avert = optimal_values(snap, -1.0);
    CHECK(avert.V(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(avert.greedy(0, 0) == 0);
  }
  SUBCASE("ties go to the smallest action") {
    Snapshot snap = Snapshot::zeros(1, 3, 1);
    snap.rewards[0] << 0.4, 0.7, 0.7;
    for (int a = 0; a < 3; ++a) snap.kernel(0, 0, a)[0] = 1.0;
    CHECK(optimal_values(snap, 1.0).greedy(0, 0) == 1);
    CHECK(optimal_values(snap, -1.0).greedy(0, 0) == 1);
  }
}

TEST_CASE("policy enumeration") {
  const auto all = enumerate_policies(3, 2, 3);
  CHECK(all.size() == 512);
  CHECK(all.front().isZero());
  CHECK((all.back().array() == 1).all());
  CHECK(enumerate_policies(1, 3, 2).size() == 9);
}

TEST_CASE("values agree with trajectory enumeration") {
  Rng rng(5);
  const auto policies = enumerate_policies(2, 2, 3);
  for (int trial = 0; trial < 5; ++trial) {
    const Snapshot snap = make_random_snapshot(2, 2, 3, rng);
    for (double beta : {-1.3, 0.7}) {
      double best = -1e300;
      for (const auto& pi : policies) {
        const auto sol = policy_values(snap, pi, beta);
        const double u = trajectory_utility(snap, pi, beta, 0);
        CHECK(sol.expV(0, 0) == doctest::Approx(u).epsilon(1e-12));
        best = std::max(best, std::log(u) / beta);
      }
      CHECK(optimal_values(snap, beta).V(0, 0) == doctest::Approx(best).epsilon(1e-12));
    }
  }
}

TEST_CASE("value solution invariants") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Snapshot snap = make_random_snapshot(4, 3, 5, rng);
    for (double beta : {-2.0, -0.2, 0.2, 2.0}) {
      const auto sol = optimal_values(snap, beta);
      CHECK(sol.V.row(5).isZero());
      for (int h = 0; h < 5; ++h) {
        const double steps = 5 - h;
        CHECK(sol.V.row(h).minCoeff() >= -1e-12);
        CHECK(sol.V.row(h).maxCoeff() <= steps + 1e-12);
        const double lo = std::min(1.0, std::exp(beta * steps)), hi = std::max(1.0, std::exp(beta * steps));
        CHECK(sol.expQ[h].minCoeff() >= lo * (1 - 1e-12));
        CHECK(sol.expQ[h].maxCoeff() <= hi * (1 + 1e-12));
        const auto back = (sol.expV.row(h).array().log() / beta).matrix();
        CHECK((back - sol.V.row(h)).cwiseAbs().maxCoeff() < 1e-10);
      }
      const auto same = policy_values(snap, sol.greedy, beta);
      CHECK((same.V - sol.V).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("deterministic MDP values do not depend on beta") {
  Snapshot snap = Snapshot::zeros(3, 2, 4);
  Rng rng(2);
  for (int h = 0; h < 4; ++h)
    for (int s = 0; s < 3; ++s)
      for (int a = 0; a < 2; ++a) {
        snap.kernel(h, s, a)[(2 * s + a) % 3] = 1.0;
        snap.rewards[h](s, a) = rng.uniform();
      }
  MarkovPolicy pi(4, 3);
  pi << 0, 1, 0, 1, 1, 0, 0, 0, 1, 1, 0, 1;
  double total = 0.0;
  int s = 0;
  for (int h = 0; h < 4; ++h) {
    total += snap.rewards[h](s, pi(h, s));
    s = (2 * s + pi(h, s)) % 3;
  }
  CHECK(risk_neutral_values(snap, pi).V(0, 0) == doctest::Approx(total).epsilon(1e-14));
  for (double beta : {-5.0, -0.01, 0.01, 5.0}) CHECK(policy_values(snap, pi, beta).V(0, 0) == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("risk-neutral values") {
  Snapshot snap = Snapshot::zeros(3, 1, 2);
  snap.kernel(0, 0, 0) << 0.0, 0.5, 0.5;
  for (int s = 0; s < 3; ++s) snap.kernel(1, s, 0)[s] = 1.0;
  snap.kernel(0, 1, 0)[1] = snap.kernel(0, 2, 0)[2] = 1.0;
  snap.rewards[1](1, 0) = 1.0;
  const MarkovPolicy pi = MarkovPolicy::Zero(2, 3);
  CHECK(risk_neutral_values(snap, pi).V(0, 0) == doctest::Approx(0.5).epsilon(1e-15));

  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Snapshot r = make_random_snapshot(3, 2, 3, rng);
    MarkovPolicy p(3, 3);
    for (int h = 0; h < 3; ++h)
      for (int s = 0; s < 3; ++s) p(h, s) = rng.uniform_int(2);
    const auto neutral = risk_neutral_values(r, p);
    for (double beta : {1e-6, -1e-6}) CHECK((policy_values(r, p, beta).V - neutral.V).cwiseAbs().maxCoeff() <= 1e-4);
  }
}

TEST_CASE("policy value is nondecreasing in beta") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Snapshot snap = make_random_snapshot(3, 2, 4, rng);
    MarkovPolicy p(4, 3);
    for (int h = 0; h < 4; ++h)
      for (int s = 0; s < 3; ++s) p(h, s) = rng.uniform_int(2);
    MatrixX<double> prev = policy_values(snap, p, -3.0).V;
    for (double beta = -2.75; beta <= 3.0; beta += 0.25) {
      if (std::abs(beta) < 1e-9) continue;
      const MatrixX<double> cur = policy_values(snap, p, beta).V;
      CHECK((cur - prev).minCoeff() >= -1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("dynamic regret") {
  const Snapshot snap = two_outcome(1.0, 0.5);
  MdpSequence seq({3, 2, 2, 10, 1.0, 0.1}, 0, {{1, 10, snap}});
  MarkovPolicy safe = MarkovPolicy::Zero(2, 3);
  const auto trace = dynamic_regret(seq, std::vector<MarkovPolicy>(10, safe));
  CHECK(trace.final_regret() == doctest::Approx(10 * (std::log((1 + std::exp(1.0)) / 2) - 0.5)).epsilon(1e-12));
  CHECK(trace.final_regret() == doctest::Approx(1.20115).epsilon(1e-5));
  for (std::size_t i = 0; i < trace.size(); ++i) {
    CHECK(trace.regret_increment[i] == doctest::Approx(trace.v_star[i] - trace.v_pi[i]));
    CHECK(trace.cumulative[i] == doctest::Approx(0.120115 * (i + 1)).epsilon(1e-5));
  }

  const auto opt = optimal_values(snap, 1.0).greedy;
  CHECK(dynamic_regret(seq, std::vector<MarkovPolicy>(10, opt)).final_regret() == 0.0);
  CHECK_THROWS(dynamic_regret(seq, std::vector<MarkovPolicy>(9, opt)));
}

TEST_CASE("regret increments are nonnegative on switching environments") {
  Rng rng(8);
  const auto seq = make_switching_sequence({3, 2, 3, 60, -0.7, 0.1}, 5, 1.0, rng);
  std::vector<MarkovPolicy> policies;
  for (int m = 0; m < 60; ++m) {
    MarkovPolicy p(3, 3);
    for (int h = 0; h < 3; ++h)
      for (int s = 0; s < 3; ++s) p(h, s) = rng.uniform_int(2);
    policies.push_back(p);
  }
  const auto trace = dynamic_regret(seq, policies);
  for (double inc : trace.regret_increment) CHECK(inc >= -1e-10);
}

TEST_CASE("alpha weights") {
  SUBCASE("t = 0 and t = 1") {
    const auto w0 = alpha_weights(0, 4);
    CHECK(w0.zero == 1.0);
    CHECK(w0.weights.empty());
    for (int H : {1, 3, 50}) {
      const auto w1 = alpha_weights(1, H);
      CHECK(w1.zero == 0.0);
      REQUIRE(w1.weights.size() == 1);
      CHECK(w1.weights[0] == 1.0);
    }
  }
  SUBCASE("t = 2, H = 1") {
    const auto w = alpha_weights(2, 1);
    CHECK(learning_rate(2, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(w.weights[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(w.weights[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(w.zero == 0.0);
  }
  SUBCASE("identities on a sample of t") {
    for (int H : {1, 5, 100}) {
      for (int t : {1, 2, 3, 10, 77, 500, 2048}) {
        const auto w = alpha_weights(t, H);
        double sum = 0, inv_sqrt = 0, sq = 0, mx = 0;
        for (int i = 1; i <= t; ++i) {
          const double a = w.weights[i - 1];
          sum += a;
          inv_sqrt += a / std::sqrt(i);
          sq += a * a;
          mx = std::max(mx, a);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(inv_sqrt >= 1.0 / std::sqrt(t) - 1e-12);
        CHECK(inv_sqrt <= 2.0 / std::sqrt(t) + 1e-12);
        CHECK(mx <= 2.0 * H / t + 1e-12);
        CHECK(sq <= 2.0 * H / t + 1e-12);
      }
    }
  }
  CHECK_THROWS(alpha_weights(-1, 2));
}
