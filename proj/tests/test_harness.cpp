#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "rsrl/harness/config.hpp"
#include "rsrl/harness/csv.hpp"
#include "rsrl/harness/experiment.hpp"
#include "rsrl/harness/fit.hpp"
#include "rsrl/harness/plot.hpp"

using namespace rsrl;
using namespace rsrl::harness;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string field_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

std::string trace_csv(const RegretTrace& t) {
  std::ostringstream out;
  write_trace(out, t);
  return out.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rsrl_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse(
      "[env]\nfamily = lower_bound\narms = 3\nbandit_horizon = 4\nepisodes = 5000\nbeta = -0.5\nbudget = 0.2\n"
      "[agent]\nkind = adaptive-rsmb\nbonus = 3\nrho_scale = 0.5\noptimistic_init = false\n"
      "[run]\nseed = 9\nruns = 4\nout = res\n"
      "[sweep]\nepisodes = 1024, 2048\nvariation = 0.1,0.2\n");
  CHECK(cfg.env.family == "lower_bound");
  CHECK(cfg.env.arms == 3);
  CHECK(cfg.env.shape.beta == -0.5);
  CHECK(cfg.agent.kind == "adaptive-rsmb");
  CHECK(cfg.agent.bonus == 3.0);
  CHECK_FALSE(cfg.agent.optimistic_init);
  CHECK(cfg.run.seed == 9);
  CHECK(cfg.run.out_dir == "res");
  CHECK(cfg.run.grid_episodes == std::vector<int>{1024, 2048});
  CHECK(cfg.run.grid_variation == std::vector<double>{0.1, 0.2});

  const auto w = parse("[agent]\nkind = rsmb\nwindow = 17\n[env]\nepisodes=100\n");
  CHECK_FALSE(w.agent.window_auto);
  CHECK(w.agent.window == 17);
  const auto full = parse("[agent]\nwindow = full\n");
  CHECK_FALSE(full.agent.window_auto);
  CHECK(full.agent.window == 0);
  CHECK(parse("[agent]\nwindow_rule = reduced\n").agent.window_rule == RsqWindowRule::kReduced);
}

TEST_CASE("config errors name the field") {
  CHECK(field_of("[env]\nstates = x\n") == "env.states");
  CHECK(field_of("[env]\nsates = 3\n") == "env.sates");
  CHECK(field_of("[nope]\na = 1\n") == "nope");
  CHECK(field_of("[agent]\nwindow = soon\n") == "agent.window");
  CHECK(field_of("[agent]\nkind = sarsa\n") == "agent.kind");
  CHECK(field_of("[agent]\nbonus = 1\n") == "agent.bonus");
  CHECK(field_of("[env]\nfamily = stationary\n[agent]\nkind = rsq\nwindow = auto\n") == "agent.window");
  CHECK(field_of("[env]\nhorizon = 40\nbeta = 1\n") == "env");
  CHECK(field_of("[env]\nsegments = 0\n") == "env.segments");
  CHECK(field_of("[env]\nfamily = file\n") == "env.path");
  CHECK(field_of("[run]\nruns = 0\n") == "run.runs");
  CHECK(field_of("[sweep]\nepisodes = 10, x\n") == "sweep.episodes");
  CHECK(field_of("[agent]\noptimistic_init = maybe\n") == "agent.optimistic_init");
  CHECK(field_of("[env\n") == "config");
  CHECK(field_of("[env]\nfamily = switching\n") == "");
  CHECK_THROWS_AS(load_config("/nonexistent/file.ini"), ConfigError);
}

TEST_CASE("oracle agent on a stationary env has zero regret") {
  const auto cfg = parse("[env]\nfamily = stationary\nepisodes = 200\n[agent]\nkind = oracle\n");
  const auto out = run_once(cfg, 0, 0);
  CHECK(out.trace.size() == 200);
  for (double c : out.trace.cumulative) CHECK(c == 0.0);
}

TEST_CASE("oracle agent on a switching env has zero regret") {
  const auto cfg = parse("[env]\nfamily = switching\nepisodes = 300\nsegments = 5\n[agent]\nkind = oracle\n");
  CHECK(run_once(cfg, 0, 0).trace.final_regret() == 0.0);
}

TEST_CASE("auto window matches the recommended window") {
  const auto cfg = parse("[env]\nfamily = switching\nepisodes = 4096\nsegments = 4\nchange = 0.1\n[agent]\nkind = rsq\n");
  const auto out = run_once(cfg, 0, 0);
  const auto seq = build_environment(cfg.env, env_stream_seed(cfg.env.seed, 0));
  const int expected = recommended_window_rsq(4096, seq.meta("budget"), 4, 2, 5);
  CHECK(out.window == expected);
  CHECK(out.trace.header.at("window") == std::to_string(expected));
  CHECK(out.trace.restarts() == (4096 - 1) / expected);

  auto mb = cfg;
  mb.agent.kind = "rsmb";
  CHECK(run_once(mb, 0, 0).window == recommended_window_rsmb(4096, seq.meta("budget"), 4, 2));
}

TEST_CASE("same config and seed, identical CSV") {
  for (const char* kind : {"rsmb", "rsq", "adaptive-rsq", "uniform"}) {
    auto cfg = parse("[env]\nfamily = switching\nepisodes = 300\n[agent]\nwindow = 50\n");
    cfg.agent.kind = kind;
    if (std::string(kind).rfind("adaptive", 0) == 0) cfg.agent.window_auto = true;
    const auto a = trace_csv(run_once(cfg, 0, 0).trace);
    const auto b = trace_csv(run_once(cfg, 0, 0).trace);
    CHECK(a == b);
    auto other = cfg;
    other.run.seed = 2;
    CHECK(trace_csv(run_once(other, 0, 0).trace) != a);
  }
}

TEST_CASE("trace CSV round trip") {
  const auto cfg = parse("[env]\nepisodes = 257\nbeta = -0.3\n[agent]\nkind = adaptive-rsq\n");
  const auto t = run_once(cfg, 0, 0).trace;
  const std::string text = trace_csv(t);
  CHECK(text.rfind("# schema=rsrl-trace-v1\n", 0) == 0);
  std::istringstream in(text);
  const auto back = read_trace(in);
  CHECK(back.v_star == t.v_star);
  CHECK(back.v_pi == t.v_pi);
  CHECK(back.regret_increment == t.regret_increment);
  CHECK(back.cumulative == t.cumulative);
  CHECK(back.exp_return == t.exp_return);
  CHECK(back.exp_estimate == t.exp_estimate);
  CHECK(back.epoch_id == t.epoch_id);
  CHECK(back.restart == t.restart);
  CHECK(back.test1_fail == t.test1_fail);
  CHECK(back.test2_fail == t.test2_fail);
  CHECK(back.block_start == t.block_start);
  CHECK(back.header == t.header);
  CHECK(trace_csv(back) == text);

  std::istringstream bad_row("# schema=rsrl-trace-v1\n" + std::string(kTraceColumns) + "\n1,0,0,0,0,1,0,0,0\n");
  try {
    read_trace(bad_row);
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream bad_num("# schema=rsrl-trace-v1\n" + std::string(kTraceColumns) + "\n1,x,0,0,0,1,0,0,0,0,1,0\n");
  CHECK_THROWS(read_trace(bad_num));
  std::istringstream no_schema(std::string(kTraceColumns) + "\n");
  CHECK_THROWS(read_trace(no_schema));
}

TEST_CASE("sweep") {
  auto cfg = parse(
      "[env]\nfamily = switching\nstates = 2\nhorizon = 3\n[agent]\nkind = rsq\n[run]\nruns = 3\n"
      "[sweep]\nepisodes = 256, 512\nvariation = 2, 4\n");
  const auto dir = scratch("sweep");
  const auto rows = sweep(cfg, 2, dir.string());
  REQUIRE(rows.size() == 12);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].cell == i / 3);
    CHECK(rows[i].run == i % 3);
    CHECK(rows[i].error.empty());
  }
  CHECK(rows[0].episodes == 256);
  CHECK(rows[0].variation == 2);
  CHECK(rows[3].variation == 4);
  CHECK(rows[6].episodes == 512);

  SUBCASE("aggregation matches the per-run traces") {
    const auto summary = summarize(rows);
    REQUIRE(summary.size() == 4);
    for (const auto& s : summary) {
      std::vector<double> finals;
      for (int r = 0; r < 3; ++r) {
        std::ifstream f(dir / "cells" / ("cell" + std::to_string(s.cell) + "_run" + std::to_string(r) + ".csv"));
        REQUIRE(f);
        finals.push_back(read_trace(f).final_regret());
      }
      const double mean = (finals[0] + finals[1] + finals[2]) / 3;
      double ss = 0;
      for (double x : finals) ss += (x - mean) * (x - mean);
      CHECK(s.mean_regret == doctest::Approx(mean).epsilon(1e-12));
      CHECK(s.stderr_regret == doctest::Approx(std::sqrt(ss / 2) / std::sqrt(3.0)).epsilon(1e-12));
      CHECK(s.runs == 3);
    }
  }
  SUBCASE("1x1 grid reduces to run") {
    auto one = cfg;
    one.run.grid_episodes = {256};
    one.run.grid_variation = {2};
    one.run.runs = 1;
    const auto r = sweep(one, 1);
    auto single = cell_config(one, {256, 2});
    CHECK(r[0].final_regret == run_once(single, 0, 0).trace.final_regret());
  }
  SUBCASE("thread count does not change results") {
    const auto rows1 = sweep(cfg, 1);
    const auto rows4 = sweep(cfg, 4);
    std::ostringstream a, b, c;
    write_sweep(a, rows);
    write_sweep(b, rows1);
    write_sweep(c, rows4);
    CHECK(a.str() == b.str());
    CHECK(a.str() == c.str());
  }
  SUBCASE("adding cells leaves existing cells alone") {
    auto more = cfg;
    more.run.grid_variation = {2, 4, 6};
    const auto wide = sweep(more, 1);
    for (const auto& r : rows) {
      for (const auto& w : wide)
        if (w.episodes == r.episodes && w.variation == r.variation && w.run == r.run && w.cell == r.cell)
          CHECK(w.final_regret == r.final_regret);
    }
    CHECK(wide[0].final_regret == rows[0].final_regret);
  }
  SUBCASE("failing cells are recorded and the sweep continues") {
    auto broken = cfg;
    broken.run.grid_episodes = {3, 256};
    broken.run.grid_variation = {4};
    const auto r = sweep(broken, 1);
    REQUIRE(r.size() == 6);
    CHECK_FALSE(r[0].error.empty());
    CHECK(r[3].error.empty());
    CHECK(summarize(r).size() == 1);
  }
  SUBCASE("sweep and summary CSV round trip") {
    std::ostringstream a;
    write_sweep(a, rows);
    std::istringstream ia(a.str());
    const auto back = read_sweep(ia);
    REQUIRE(back.size() == rows.size());
    CHECK(back[5].final_regret == rows[5].final_regret);
    std::ostringstream b;
    write_summary(b, summarize(rows));
    std::istringstream ib(b.str());
    CHECK(read_summary(ib)[1].mean_regret == summarize(rows)[1].mean_regret);
  }
  fs::remove_all(dir);
}

TEST_CASE("fit exponent") {
  std::vector<std::pair<double, double>> pts;
  for (int k = 10; k <= 15; ++k) pts.emplace_back(std::ldexp(1.0, k), std::pow(std::ldexp(1.0, k), 2.0 / 3.0));
  const auto f = fit_exponent(pts);
  CHECK(f.slope == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(f.std_error < 1e-9);

  pts.clear();
  for (double m : {10.0, 100.0, 1000.0}) pts.emplace_back(m, 3.5 * m);
  CHECK(fit_exponent(pts).slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit_exponent(pts).intercept == doctest::Approx(std::log(3.5)).epsilon(1e-12));

  Rng rng(3);
  std::normal_distribution<double> noise(0.0, 0.05);
  pts.clear();
  for (int k = 10; k <= 15; ++k)
    for (int rep = 0; rep < 20; ++rep) {
      const double m = std::ldexp(1.0, k);
      pts.emplace_back(m, std::pow(m, 0.6) * std::exp(noise(rng.engine())));
    }
  CHECK(std::abs(fit_exponent(pts).slope - 0.6) <= 0.05);

  CHECK_THROWS(fit_exponent({{1, 1}, {2, 2}}));
  CHECK_THROWS(fit_exponent({{1, 1}, {2, 0}, {3, 3}}));
  CHECK_THROWS(fit_exponent({{1, 1}, {2, -1}, {3, 3}}));
}

TEST_CASE("plots") {
  const auto cfg = parse("[env]\nepisodes = 128\n[agent]\nkind = rsq\nwindow = 32\n");
  const auto in = scratch("plot_in");
  const auto out = in / "svg";

  CHECK_THROWS(emit_plots(in.string(), out.string()));
  CHECK_THROWS(regret_curve_svg(RegretTrace{}, "empty"));

  {
    std::ofstream f(in / "trace_seed1.csv");
    write_trace(f, run_once(cfg, 0, 0).trace);
  }
  const auto files = emit_plots(in.string(), out.string());
  REQUIRE(files.size() == 1);
  CHECK(fs::exists(out / "trace_seed1.svg"));
  CHECK(slurp(out / "trace_seed1.svg").find("<svg") != std::string::npos);

  std::vector<SummaryRow> rows;
  for (int k = 10; k <= 13; ++k) rows.push_back({0, 1 << k, 8, 1.0, std::pow(1 << k, 0.7) * (k % 2 ? 1.02 : 0.98), 0, 0, 1});
  {
    std::ofstream f(in / "summary.csv");
    write_summary(f, rows);
  }
  emit_plots(in.string(), out.string());
  const auto svg = slurp(out / "summary.svg");
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) pts.emplace_back(r.episodes, r.mean_regret);
  char label[64];
  std::snprintf(label, sizeof label, "slope %.4f", fit_exponent(pts).slope);
  CHECK(svg.find(label) != std::string::npos);

  {
    std::ofstream f(in / "broken.csv");
    f << "# schema=rsrl-trace-v1\n" << kTraceColumns << "\n1,2,3\n";
  }
  try {
    emit_plots(in.string(), out.string());
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("broken.csv") != std::string::npos);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  fs::remove_all(in);
}
