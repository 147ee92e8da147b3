#include "rsrl/harness/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>

#include "rsrl/adaptive.hpp"
#include "rsrl/harness/csv.hpp"
#include "rsrl/rsmb.hpp"
#include "rsrl/rsq.hpp"

namespace rsrl::harness {

void OracleAgent::begin_episode(int m) {
  const std::size_t seg = seq_.segment_index(m);
  if (seg != segment_) {
    solution_ = optimal_values(seq_.segments()[seg].snapshot, seq_.shape().beta);
    segment_ = seg;
  }
}

void UniformAgent::begin_episode(int) {
  policy_.resize(shape_.horizon, shape_.num_states);
  for (int h = 0; h < shape_.horizon; ++h)
    for (int s = 0; s < shape_.num_states; ++s) policy_(h, s) = rng_.uniform_int(shape_.num_actions);
}

RegretTrace simulate(const MdpSequence& seq, EpisodicAgent& agent, Rng& rng, std::ostream* log) {
  RegretTracker tracker(seq);
  const int s1 = seq.initial_state();
  const PolicyFn act = [&agent](int h, int s) { return agent.act(h, s); };
  for (int m = 1; m <= seq.num_episodes(); ++m) {
    agent.begin_episode(m);
    const MarkovPolicy pi = agent.policy();
    const double g = agent.exp_value_estimate(s1);
    const EpisodeRecord ep = run_episode(seq, m, act, rng);
    agent.record(ep);
    const EpisodeFlags fl = agent.flags();
    tracker.record(m, pi, ep.exp_return, g, fl);
    if (log && (fl.restart || fl.test1_fail || fl.test2_fail || fl.block_start)) {
      *log << "episode " << m << ':' << (fl.block_start ? " block_start" : "") << (fl.restart ? " restart" : "")
           << (fl.test1_fail ? " test1_fail" : "") << (fl.test2_fail ? " test2_fail" : "") << " epoch=" << fl.epoch_id
           << " cum_regret=" << tracker.trace().cumulative.back() << '\n';
    }
  }
  return tracker.release();
}

MdpSequence build_environment(const EnvSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  if (spec.family == "switching") return make_switching_sequence(spec.shape, spec.segments, spec.change, rng);
  if (spec.family == "stationary") return make_switching_sequence(spec.shape, 1, 0.0, rng);
  if (spec.family == "lower_bound") {
    return make_lower_bound_instance(spec.arms, spec.bandit_horizon, spec.shape.num_episodes, spec.shape.beta,
                                     spec.budget, rng, spec.shape.delta);
  }
  if (spec.family == "file") {
    std::ifstream in(spec.path);
    if (!in) throw ConfigError("env.path", "cannot open '" + spec.path + "'");
    return read_sequence(in);
  }
  throw ConfigError("env.family", "unknown family '" + spec.family + "'");
}

namespace {

int resolve_window(const AgentSpec& spec, const MdpSequence& seq) {
  const auto& sh = seq.shape();
  if (!spec.window_auto) {
    if (spec.window == 0) return sh.num_episodes;
    if (spec.window > sh.num_episodes) throw ConfigError("agent.window", "exceeds the number of episodes");
    return spec.window;
  }
  const double budget = seq.meta("budget");
  if (!(budget > 0.0)) throw ConfigError("agent.window", "auto requires a positive variation budget in the environment");
  if (spec.kind == "rsmb") return recommended_window_rsmb(sh.num_episodes, budget, sh.num_states, sh.num_actions);
  return recommended_window_rsq(sh.num_episodes, budget, sh.num_states, sh.num_actions, sh.horizon, spec.window_rule);
}

RsmbConfig rsmb_config(const AgentSpec& spec, const MdpSequence& seq, int window) {
  RsmbConfig cfg;
  cfg.shape = seq.shape();
  cfg.restart_period = window;
  cfg.bonus_scale = spec.bonus;
  cfg.confidence = seq.shape().delta;
  cfg.optimistic_init = spec.optimistic_init;
  cfg.initial_state = seq.initial_state();
  return cfg;
}

RsqConfig rsq_config(const AgentSpec& spec, const MdpSequence& seq, int window) {
  RsqConfig cfg;
  cfg.shape = seq.shape();
  cfg.restart_period = window;
  cfg.bonus_scale = spec.bonus;
  cfg.optimistic_init = spec.optimistic_init;
  cfg.initial_state = seq.initial_state();
  return cfg;
}

}  // namespace

BuiltAgent build_agent(const AgentSpec& spec, const MdpSequence& seq, std::uint64_t seed) {
  BuiltAgent out;
  if (spec.kind == "rsmb") {
    out.window = resolve_window(spec, seq);
    out.agent = std::make_unique<RsmbAgent>(rsmb_config(spec, seq, out.window));
  } else if (spec.kind == "rsq") {
    out.window = resolve_window(spec, seq);
    out.agent = std::make_unique<RsqAgent>(rsq_config(spec, seq, out.window));
  } else if (spec.kind == "adaptive-rsmb") {
    out.agent = std::make_unique<AdaptiveAgent>(seq.shape(), rsmb_base(rsmb_config(spec, seq, 1), spec.rho_scale),
                                                seq.initial_state(), seed);
  } else if (spec.kind == "adaptive-rsq") {
    out.agent = std::make_unique<AdaptiveAgent>(seq.shape(), rsq_base(rsq_config(spec, seq, 1), spec.rho_scale),
                                                seq.initial_state(), seed);
  } else if (spec.kind == "oracle") {
    out.agent = std::make_unique<OracleAgent>(seq);
  } else if (spec.kind == "uniform") {
    out.agent = std::make_unique<UniformAgent>(seq.shape(), seed);
  } else {
    throw ConfigError("agent.kind", "unknown agent '" + spec.kind + "'");
  }
  return out;
}

std::uint64_t run_stream_seed(std::uint64_t master, std::size_t cell, std::size_t run_index) {
  return mix_seed(master, cell, run_index);
}

std::uint64_t env_stream_seed(std::uint64_t env_seed, std::size_t run_index) {
  return mix_seed(env_seed, 0x656e76ULL, run_index);
}

RunOutput run_once(const ExperimentConfig& config, std::size_t cell, std::size_t run_index, std::ostream* log) {
  const MdpSequence seq = build_environment(config.env, env_stream_seed(config.env.seed, run_index));
  const std::uint64_t stream = run_stream_seed(config.run.seed, cell, run_index);
  BuiltAgent built = build_agent(config.agent, seq, mix_seed(stream, 1));
  Rng rng(mix_seed(stream, 2));

  RunOutput out;
  out.window = built.window;
  out.budget = {seq.meta("budget_r"), seq.meta("budget_p")};
  out.trace = simulate(seq, *built.agent, rng, log);
  auto& hdr = out.trace.header;
  const auto& sh = seq.shape();
  hdr["agent"] = built.agent->label();
  hdr["window"] = std::to_string(built.window);
  hdr["family"] = config.env.family;
  hdr["states"] = std::to_string(sh.num_states);
  hdr["actions"] = std::to_string(sh.num_actions);
  hdr["horizon"] = std::to_string(sh.horizon);
  hdr["episodes"] = std::to_string(sh.num_episodes);
  hdr["beta"] = format_double(sh.beta);
  hdr["delta"] = format_double(sh.delta);
  hdr["budget"] = format_double(out.budget.total());
  hdr["budget_r"] = format_double(out.budget.reward);
  hdr["budget_p"] = format_double(out.budget.transition);
  hdr["master_seed"] = std::to_string(config.run.seed);
  hdr["cell"] = std::to_string(cell);
  hdr["run"] = std::to_string(run_index);
  return out;
}

std::vector<SweepCell> sweep_cells(const ExperimentConfig& config) {
  std::vector<int> ms = config.run.grid_episodes;
  if (ms.empty()) ms.push_back(config.env.shape.num_episodes);
  std::vector<double> vs = config.run.grid_variation;
  if (vs.empty()) vs.push_back(config.env.family == "lower_bound" ? config.env.budget : config.env.segments);
  std::vector<SweepCell> out;
  for (int m : ms)
    for (double v : vs) out.push_back({m, v});
  return out;
}

ExperimentConfig cell_config(const ExperimentConfig& config, const SweepCell& cell) {
  ExperimentConfig c = config;
  c.env.shape.num_episodes = cell.episodes;
  if (c.env.family == "lower_bound") c.env.budget = cell.variation;
  else if (c.env.family == "switching") c.env.segments = static_cast<int>(std::lround(cell.variation));
  return c;
}

std::vector<SweepRow> sweep(const ExperimentConfig& config, int threads, const std::string& out_dir) {
  const auto cells = sweep_cells(config);
  const std::size_t runs = static_cast<std::size_t>(config.run.runs);
  std::vector<SweepRow> rows(cells.size() * runs);
  if (!out_dir.empty()) std::filesystem::create_directories(std::filesystem::path(out_dir) / "cells");

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t job = next++; job < rows.size(); job = next++) {
      const std::size_t c = job / runs;
      const std::size_t r = job % runs;
      SweepRow& row = rows[job];
      row.cell = c;
      row.run = r;
      row.episodes = cells[c].episodes;
      row.variation = cells[c].variation;
      try {
        const ExperimentConfig cfg = cell_config(config, cells[c]);
        validate(cfg);
        const RunOutput out = run_once(cfg, c, r);
        row.budget = out.budget.total();
        row.window = out.window;
        row.final_regret = out.trace.final_regret();
        row.restarts = out.trace.restarts();
        if (!out_dir.empty()) {
          const auto path = std::filesystem::path(out_dir) / "cells" /
                            ("cell" + std::to_string(c) + "_run" + std::to_string(r) + ".csv");
          std::ofstream f(path);
          write_trace(f, out.trace);
          if (!f) throw std::runtime_error("cannot write " + path.string());
        }
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const int n = std::max(1, threads);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows) {
  std::map<std::size_t, std::vector<const SweepRow*>> groups;
  for (const auto& r : rows)
    if (r.error.empty()) groups[r.cell].push_back(&r);
  std::vector<SummaryRow> out;
  for (const auto& [cell, members] : groups) {
    SummaryRow s;
    s.cell = cell;
    s.episodes = members.front()->episodes;
    s.variation = members.front()->variation;
    s.runs = static_cast<int>(members.size());
    for (const auto* r : members) {
      s.mean_budget += r->budget;
      s.mean_regret += r->final_regret;
      s.mean_restarts += r->restarts;
    }
    s.mean_budget /= s.runs;
    s.mean_regret /= s.runs;
    s.mean_restarts /= s.runs;
    if (s.runs > 1) {
      double ss = 0.0;
      for (const auto* r : members) ss += (r->final_regret - s.mean_regret) * (r->final_regret - s.mean_regret);
      s.stderr_regret = std::sqrt(ss / (s.runs - 1)) / std::sqrt(static_cast<double>(s.runs));
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace rsrl::harness
