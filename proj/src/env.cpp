#include "rsrl/env.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace rsrl {

MdpSequence::MdpSequence(MdpShape shape, int initial_state, std::vector<Segment> segments,
                         std::map<std::string, double> metadata)
    : shape_(shape), initial_state_(initial_state), segments_(std::move(segments)), metadata_(std::move(metadata)) {
  shape_.validate();
  if (initial_state_ < 0 || initial_state_ >= shape_.num_states)
    throw std::invalid_argument("MdpSequence: initial state out of range");
  if (segments_.empty()) throw std::invalid_argument("MdpSequence: no segments");
  int expected = 1;
  for (const auto& seg : segments_) {
    if (seg.first != expected || seg.last < seg.first)
      throw std::invalid_argument("MdpSequence: segments must be contiguous and start at episode 1");
    const auto& snap = seg.snapshot;
    if (snap.horizon() != shape_.horizon || snap.num_states() != shape_.num_states ||
        snap.num_actions() != shape_.num_actions) {
      throw std::invalid_argument("MdpSequence: snapshot dimensions do not match the shape");
    }
    snap.validate();
    expected = seg.last + 1;
  }
  if (expected != shape_.num_episodes + 1)
    throw std::invalid_argument("MdpSequence: segments must cover episodes 1..M exactly");
}

std::size_t MdpSequence::segment_index(int m) const {
  if (m < 1 || m > shape_.num_episodes) throw std::out_of_range("episode index " + std::to_string(m) + " out of range");
  auto it = std::upper_bound(segments_.begin(), segments_.end(), m,
                             [](int value, const Segment& seg) { return value < seg.first; });
  return static_cast<std::size_t>(std::distance(segments_.begin(), it) - 1);
}

namespace {

int sample_row(const Eigen::Ref<const Eigen::RowVectorXd>& row, double u) {
  double acc = 0.0;
  int last_positive = 0;
  for (int j = 0; j < row.size(); ++j) {
    if (row[j] <= 0.0) continue;
    last_positive = j;
    acc += row[j];
    if (u < acc) return j;
  }
  return last_positive;
}

}  // namespace

EpisodeRecord run_episode(const MdpSequence& seq, int m, const PolicyFn& policy, Rng& rng) {
  const Snapshot& snap = seq.snapshot(m);
  const MdpShape& shape = seq.shape();
  EpisodeRecord rec;
  rec.episode = m;
  rec.steps.reserve(shape.horizon);
  int s = seq.initial_state();
  for (int h = 0; h < shape.horizon; ++h) {
    const int a = policy(h, s);
    if (a < 0 || a >= shape.num_actions) {
      throw std::out_of_range("policy returned action " + std::to_string(a) + " at h=" + std::to_string(h) +
                              ", s=" + std::to_string(s));
    }
    const double r = snap.reward(h, s, a);
    rec.steps.push_back({s, a, r});
    rec.total_reward += r;
    s = sample_row(snap.kernel(h, s, a), rng.uniform());
  }
  rec.terminal_state = s;
  rec.exp_return = std::exp(shape.beta * rec.total_reward);
  return rec;
}

VariationBudget snapshot_drift(const Snapshot& lhs, const Snapshot& rhs) {
  VariationBudget out;
  for (int h = 0; h < lhs.horizon(); ++h) {
    out.reward += (lhs.rewards[h] - rhs.rewards[h]).cwiseAbs().maxCoeff();
    out.transition += (lhs.transitions[h] - rhs.transitions[h]).cwiseAbs().rowwise().sum().maxCoeff();
  }
  return out;
}

VariationBudget variation_budgets(const MdpSequence& seq, int m1, int m2) {
  if (m1 < 1 || m2 > seq.num_episodes() || m1 > m2)
    throw std::out_of_range("variation_budgets: interval must satisfy 1 <= m1 <= m2 <= M");
  VariationBudget total;
  const auto& segs = seq.segments();
  // Only segment boundaries (last, last + 1) with m1 <= last < m2 contribute.
  for (std::size_t i = seq.segment_index(m1); i + 1 < segs.size() && segs[i].last < m2; ++i) {
    const auto d = snapshot_drift(segs[i].snapshot, segs[i + 1].snapshot);
    total.reward += d.reward;
    total.transition += d.transition;
  }
  return total;
}

Snapshot make_random_snapshot(int num_states, int num_actions, int horizon, Rng& rng) {
  Snapshot snap = Snapshot::zeros(num_states, num_actions, horizon);
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < num_actions; ++a) {
        snap.rewards[h](s, a) = rng.uniform();
        auto row = snap.kernel(h, s, a);
        for (int j = 0; j < num_states; ++j) row[j] = -std::log1p(-rng.uniform());
        row /= row.sum();
      }
    }
  }
  return snap;
}

std::vector<std::pair<int, int>> segment_bounds(int num_episodes, int num_segments) {
  if (num_segments < 1 || num_segments > num_episodes)
    throw std::invalid_argument("segment count must satisfy 1 <= L <= M");
  const int len = (num_episodes + num_segments - 1) / num_segments;
  std::vector<std::pair<int, int>> out;
  for (int first = 1; first <= num_episodes; first += len) out.emplace_back(first, std::min(first + len - 1, num_episodes));
  return out;
}

MdpSequence make_switching_sequence(const MdpShape& shape, int num_segments, double change_magnitude, Rng& rng) {
  shape.validate();
  if (!(change_magnitude >= 0.0 && change_magnitude <= 1.0))
    throw std::invalid_argument("make_switching_sequence: change magnitude must lie in [0, 1]");
  const auto bounds = segment_bounds(shape.num_episodes, num_segments);
  std::vector<Segment> segments;
  Snapshot current = make_random_snapshot(shape.num_states, shape.num_actions, shape.horizon, rng);
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (i > 0) {
      const Snapshot fresh = make_random_snapshot(shape.num_states, shape.num_actions, shape.horizon, rng);
      for (int h = 0; h < shape.horizon; ++h) {
        current.rewards[h] = (1.0 - change_magnitude) * current.rewards[h] + change_magnitude * fresh.rewards[h];
        current.transitions[h] =
            (1.0 - change_magnitude) * current.transitions[h] + change_magnitude * fresh.transitions[h];
        current.transitions[h].array().colwise() /= current.transitions[h].rowwise().sum().array();
      }
    }
    segments.push_back({bounds[i].first, bounds[i].second, current});
  }
  MdpSequence seq(shape, 0, std::move(segments));
  const auto b = variation_budgets(seq, 1, shape.num_episodes);
  seq.set_meta("segments", static_cast<double>(seq.segments().size()));
  seq.set_meta("budget_r", b.reward);
  seq.set_meta("budget_p", b.transition);
  seq.set_meta("budget", b.total());
  return seq;
}

MdpSequence make_lower_bound_instance(int num_arms, int bandit_horizon, int num_episodes, double beta, double budget,
                                      Rng& rng, double delta) {
  if (num_arms < 2) throw std::invalid_argument("lower bound instance: need at least 2 arms");
  if (bandit_horizon < 1) throw std::invalid_argument("lower bound instance: bandit horizon must be >= 1");
  if (beta == 0.0) throw std::invalid_argument("lower bound instance: beta must be nonzero");
  if (beta > 0.0 && bandit_horizon < std::log(2.0) / beta)
    throw std::invalid_argument("lower bound instance: requires H >= log(2)/beta for beta > 0");
  if (!(budget > 0.0)) throw std::invalid_argument("lower bound instance: budget must be positive");

  MdpShape shape;
  shape.num_states = 2 * num_arms + 1;
  shape.num_actions = num_arms;
  shape.horizon = bandit_horizon + 2;
  shape.num_episodes = num_episodes;
  shape.beta = beta;
  shape.delta = delta;
  shape.validate();

  const double scale = std::exp(std::abs(beta) * bandit_horizon);  // e^{|beta| H}
  const double base_prob = 1.0 / scale;
  const double M = num_episodes;
  auto gap_for = [&](double segments) { return std::sqrt(num_arms * segments / (16.0 * M * scale)); };

  // Largest L with 2 * gap(L) * L <= B, where gap(L) grows like sqrt(L).
  const double unit = 2.0 * std::sqrt(num_arms / (16.0 * M * scale));
  int L = static_cast<int>(std::min<double>(std::floor(std::pow(budget / unit, 2.0 / 3.0)) + 1.0, M));
  while (L >= 1 && 2.0 * gap_for(L) * L > budget) --L;
  if (L < 1) throw std::invalid_argument("lower bound instance: budget too small for a single segment");
  const double gap = gap_for(L);
  if (gap > base_prob) {
    throw std::invalid_argument("lower bound instance: gap " + std::to_string(gap) + " exceeds e^{-|beta|H} = " +
                                std::to_string(base_prob) + "; increase the number of episodes");
  }

  auto build = [&](int best_arm) {
    Snapshot snap = Snapshot::zeros(shape.num_states, shape.num_actions, shape.horizon);
    for (int h = 0; h < shape.horizon; ++h) {
      for (int a = 0; a < num_arms; ++a) {
        auto start = snap.kernel(h, 0, a);
        if (h == 0) {
          // beta > 0: p_j is the chance of the rewarding state; beta < 0: of the empty one.
          const double p_j = beta > 0.0 ? base_prob + (a == best_arm ? gap : 0.0) : base_prob - (a == best_arm ? gap : 0.0);
          const double good = beta > 0.0 ? p_j : 1.0 - p_j;
          start[1 + 2 * a] = good;
          start[2 + 2 * a] = 1.0 - good;
        } else {
          start[0] = 1.0;
        }
        for (int j = 0; j < num_arms; ++j) {
          snap.rewards[h](1 + 2 * j, a) = 1.0;
          snap.kernel(h, 1 + 2 * j, a)[1 + 2 * j] = 1.0;
          snap.kernel(h, 2 + 2 * j, a)[2 + 2 * j] = 1.0;
        }
      }
    }
    return snap;
  };

  std::vector<Segment> segments;
  for (const auto& [first, last] : segment_bounds(num_episodes, L)) {
    segments.push_back({first, last, build(rng.uniform_int(num_arms))});
  }
  MdpSequence seq(shape, 0, std::move(segments));
  const auto b = variation_budgets(seq, 1, num_episodes);
  seq.set_meta("segments", static_cast<double>(L));
  seq.set_meta("realized_segments", static_cast<double>(seq.segments().size()));
  seq.set_meta("gap", gap);
  seq.set_meta("segment_length", M / L);
  seq.set_meta("base_prob", base_prob);
  seq.set_meta("budget_r", b.reward);
  seq.set_meta("budget_p", b.transition);
  seq.set_meta("budget", b.total());
  seq.set_meta("requested_budget", budget);
  return seq;
}

void write_sequence(std::ostream& out, const MdpSequence& seq) {
  const auto& sh = seq.shape();
  const auto old_precision = out.precision(17);
  out << "# rsrl mdp sequence v1\n";
  out << "shape " << sh.num_states << ' ' << sh.num_actions << ' ' << sh.horizon << ' ' << sh.num_episodes << ' '
      << sh.beta << ' ' << sh.delta << '\n';
  out << "initial_state " << seq.initial_state() << '\n';
  for (const auto& [key, value] : seq.metadata()) out << "meta " << key << ' ' << value << '\n';
  for (const auto& seg : seq.segments()) {
    out << "segment " << seg.first << ' ' << seg.last << '\n';
    const auto& snap = seg.snapshot;
    for (int h = 0; h < sh.horizon; ++h)
      for (int s = 0; s < sh.num_states; ++s)
        for (int a = 0; a < sh.num_actions; ++a) out << "r " << h << ' ' << s << ' ' << a << ' ' << snap.reward(h, s, a) << '\n';
    for (int h = 0; h < sh.horizon; ++h)
      for (int s = 0; s < sh.num_states; ++s)
        for (int a = 0; a < sh.num_actions; ++a) {
          const auto row = snap.kernel(h, s, a);
          for (int t = 0; t < sh.num_states; ++t)
            if (row[t] != 0.0) out << "p " << h << ' ' << s << ' ' << a << ' ' << t << ' ' << row[t] << '\n';
        }
  }
  out.precision(old_precision);
}

MdpSequence read_sequence(std::istream& in) {
  MdpShape shape;
  int initial = 0;
  bool have_shape = false;
  std::map<std::string, double> meta;
  std::vector<Segment> segments;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("sequence line " + std::to_string(lineno) + ": " + why);
  };
  auto in_range = [&](int h, int s, int a) {
    return h >= 0 && h < shape.horizon && s >= 0 && s < shape.num_states && a >= 0 && a < shape.num_actions;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "shape") {
      ls >> shape.num_states >> shape.num_actions >> shape.horizon >> shape.num_episodes >> shape.beta >> shape.delta;
      if (!ls) fail("malformed shape");
      have_shape = true;
    } else if (tag == "initial_state") {
      ls >> initial;
    } else if (tag == "meta") {
      std::string key;
      double value = 0.0;
      ls >> key >> value;
      meta[key] = value;
    } else if (tag == "segment") {
      if (!have_shape) fail("segment before shape");
      Segment seg;
      ls >> seg.first >> seg.last;
      seg.snapshot = Snapshot::zeros(shape.num_states, shape.num_actions, shape.horizon);
      segments.push_back(std::move(seg));
    } else if (tag == "r" || tag == "p") {
      if (segments.empty()) fail("entry before first segment");
      int h = 0, s = 0, a = 0, t = 0;
      double value = 0.0;
      ls >> h >> s >> a;
      if (tag == "p") ls >> t;
      ls >> value;
      if (!ls || !in_range(h, s, a) || t < 0 || t >= shape.num_states) fail("malformed entry");
      auto& snap = segments.back().snapshot;
      if (tag == "r") snap.rewards[h](s, a) = value;
      else snap.kernel(h, s, a)[t] = value;
    } else {
      fail("unknown tag '" + tag + "'");
    }
  }
  if (!have_shape) throw std::invalid_argument("sequence: missing shape line");
  return MdpSequence(shape, initial, std::move(segments), std::move(meta));
}

}  // namespace rsrl
