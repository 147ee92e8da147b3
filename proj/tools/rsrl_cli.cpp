#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rsrl/harness/config.hpp"
#include "rsrl/harness/csv.hpp"
#include "rsrl/harness/experiment.hpp"
#include "rsrl/harness/plot.hpp"

namespace fs = std::filesystem;
using namespace rsrl::harness;

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kValidationError = 2;

std::string default_out(const std::string& flag, const std::string& from_config) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv("RSRL_OUT_DIR"); env && *env) return env;
  return "out";
}

ExperimentConfig load_checked(const std::string& path) {
  ExperimentConfig cfg = load_config(path);
  validate(cfg);
  return cfg;
}

void write_file(const fs::path& path, const auto& writer) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  writer(f);
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_flag,
            bool verbose) {
  ExperimentConfig cfg = load_checked(config_path);
  if (seed) cfg.run.seed = *seed;
  const fs::path out = default_out(out_flag, cfg.run.out_dir);
  fs::create_directories(out);
  const RunOutput res = run_once(cfg, 0, 0, (verbose || cfg.run.verbose) ? &std::cerr : nullptr);
  const fs::path path = out / ("trace_seed" + std::to_string(cfg.run.seed) + ".csv");
  write_file(path, [&](std::ostream& f) { write_trace(f, res.trace); });
  std::cout << path.string() << ": final_regret=" << format_double(res.trace.final_regret())
            << " restarts=" << res.trace.restarts() << " window=" << res.window << '\n';
  return kOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_flag, int parallel, bool verbose) {
  const ExperimentConfig cfg = load_checked(config_path);
  const fs::path out = default_out(out_flag, cfg.run.out_dir);
  fs::create_directories(out);
  const auto rows = sweep(cfg, parallel, out.string());
  write_file(out / "sweep.csv", [&](std::ostream& f) { write_sweep(f, rows); });
  const auto summary = summarize(rows);
  write_file(out / "summary.csv", [&](std::ostream& f) { write_summary(f, summary); });
  int failed = 0;
  for (const auto& r : rows) {
    if (r.error.empty()) continue;
    ++failed;
    std::cerr << "cell " << r.cell << " run " << r.run << " failed: " << r.error << '\n';
  }
  if (verbose || cfg.run.verbose)
    for (const auto& s : summary)
      std::cerr << "cell " << s.cell << " M=" << s.episodes << " variation=" << s.variation
                << " mean_regret=" << s.mean_regret << " +- " << s.stderr_regret << '\n';
  std::cout << (out / "sweep.csv").string() << ": " << rows.size() << " runs, " << failed << " failed\n";
  return failed == static_cast<int>(rows.size()) ? kRuntimeError : kOk;
}

int cmd_plot(const std::string& in, const std::string& out) {
  for (const auto& f : emit_plots(in, out)) std::cout << f << '\n';
  return kOk;
}

int cmd_validate(const std::string& config_path) {
  const ExperimentConfig cfg = load_checked(config_path);
  for (const auto& cell : sweep_cells(cfg)) {
    const ExperimentConfig c = cell_config(cfg, cell);
    validate(c);
    try {
      const auto seq = build_environment(c.env, env_stream_seed(c.env.seed, 0));
      const auto built = build_agent(c.agent, seq, 0);
      std::cout << "M=" << cell.episodes << " variation=" << cell.variation << " budget=" << seq.meta("budget")
                << " agent=" << built.agent->label() << " window=" << built.window << '\n';
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("env", e.what());
    }
  }
  std::cout << "ok\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-sensitive RL simulator for non-stationary episodic MDPs"};
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log restarts and test failures per episode");

  std::string config, out, in;
  std::optional<std::uint64_t> seed;
  int parallel = 1;

  auto* run = app.add_subcommand("run", "Single run, writes a trace CSV");
  run->add_option("--config", config)->required();
  run->add_option("--seed", seed, "Master seed (overrides run.seed)");
  run->add_option("--out", out, "Output directory (default: run.out_dir, $RSRL_OUT_DIR, ./out)");

  auto* sw = app.add_subcommand("sweep", "Grid sweep over episodes and variation");
  sw->add_option("--config", config)->required();
  sw->add_option("--out", out, "Output directory (default: run.out_dir, $RSRL_OUT_DIR, ./out)");
  sw->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);

  auto* plot = app.add_subcommand("plot", "Render SVGs from trace and summary CSVs");
  plot->add_option("--in", in)->required();
  plot->add_option("--out", out)->required();

  auto* val = app.add_subcommand("validate", "Check a config without running it");
  val->add_option("--config", config)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (*run) return cmd_run(config, seed, out, verbose);
    if (*sw) return cmd_sweep(config, out, parallel, verbose);
    if (*plot) return cmd_plot(in, out);
    if (*val) return cmd_validate(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kRuntimeError;
}
