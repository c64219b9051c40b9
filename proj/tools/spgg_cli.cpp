// spgg: run, sweep and summarise spatial public goods game experiments.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "spgg/experiment.hpp"
#include "spgg/io.hpp"
#include "spgg/stats.hpp"

namespace {

// Long flags that map 1:1 onto ExperimentConfig settings.
const char* const kRunFlags[][2] = {
    {"algo", "lmfppo-ubp | lmfppo | ppo | fermi | qlearn"},
    {"L", "lattice side"},
    {"r", "enhancement factor"},
    {"p", "punishment strength (lmfppo-ubp only)"},
    {"rho", "entropy coefficient"},
    {"gamma", "discount factor"},
    {"lambda", "GAE lambda"},
    {"eps", "PPO clip threshold"},
    {"delta", "value-loss coefficient"},
    {"K", "PPO epochs per iteration"},
    {"H", "rollout horizon (environment steps per iteration)"},
    {"iters", "iterations (Monte Carlo steps for fermi/qlearn)"},
    {"init", "all-d | all-c | half | bernoulli:P"},
    {"seed", "base seed"},
    {"snapshots", "comma-separated snapshot times"},
    {"out", "output directory"},
    {"lr", "Adam learning rate"},
    {"lr-interval", "iterations between learning-rate decays"},
    {"lr-factor", "learning-rate decay factor"},
    {"hidden", "hidden sizes: h or h1,h2"},
    {"normalize-adv", "standardise advantages per batch (0/1)"},
    {"window", "trailing fraction of iterations averaged for final f_C"},
    {"fermi-temp", "Fermi selection temperature K"},
    {"q-alpha", "Q-learning rate"},
    {"q-gamma", "Q-learning discount"},
    {"q-eps", "initial exploration rate"},
    {"q-eps-min", "exploration floor"},
    {"q-eps-decay", "per-step exploration decay"},
    {"checkpoint", "write final network weights to this file"},
};

struct RunOptions {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_run_flags(CLI::App* cmd, RunOptions& opts) {
  cmd->add_option("--config", opts.config_file, "key = value config file (flags override)");
  for (const auto& flag : kRunFlags) {
    const std::string name = flag[0];
    opts.options[name] = cmd->add_option("--" + name, opts.values[name], flag[1]);
  }
}

spgg::ExperimentConfig build_config(const RunOptions& opts) {
  spgg::ExperimentConfig config;
  if (!opts.config_file.empty()) spgg::load_config_file(config, opts.config_file);
  for (const auto& [name, opt] : opts.options) {
    if (opt->count() > 0) spgg::apply_setting(config, name, opts.values.at(name));
  }
  return config;
}

void print_stats(const std::vector<spgg::TrialStats>& stats) {
  for (const auto& s : stats) {
    std::printf("value=%s n=%zu mean=%s std=%s ci=[%s,%s] raw=[%s,%s]%s%s\n",
                spgg::format_real(s.axis_value).c_str(), s.n, spgg::format_real(s.mean).c_str(),
                spgg::format_real(s.std).c_str(), spgg::format_real(s.ci_lo).c_str(),
                spgg::format_real(s.ci_hi).c_str(), spgg::format_real(s.ci_lo_raw).c_str(),
                spgg::format_real(s.ci_hi_raw).c_str(), s.degenerate ? " degenerate" : "",
                s.clamped ? " clamped" : "");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial public goods game: LMFPPO-UBP and baseline dynamics"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "single run; writes timeseries, snapshots, payoffs");
  add_run_flags(run_cmd, run_opts);

  RunOptions sweep_opts;
  std::string axis = "r", values;
  double from = 0.0, to = 0.0, step = 0.0;
  int trials = 1, jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "multi-trial parameter sweep");
  add_run_flags(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", axis, "r | p | rho")->check(CLI::IsMember({"r", "p", "rho"}));
  auto* values_opt = sweep_cmd->add_option("--values", values, "comma-separated axis values");
  auto* from_opt = sweep_cmd->add_option("--from", from, "range start");
  auto* to_opt = sweep_cmd->add_option("--to", to, "range end (inclusive)");
  auto* step_opt = sweep_cmd->add_option("--step", step, "range step");
  sweep_cmd->add_option("--trials", trials, "trials per value (seeds base..base+N-1)");
  sweep_cmd->add_option("--jobs", jobs, "worker threads");
  values_opt->excludes(from_opt);
  from_opt->needs(to_opt)->needs(step_opt);

  std::string stats_in, stats_out;
  auto* stats_cmd = app.add_subcommand("stats", "recompute stats.csv from sweep.csv");
  stats_cmd->add_option("--in", stats_in, "sweep.csv")->required();
  stats_cmd->add_option("--out", stats_out, "stats.csv")->required();

  std::string threshold_in;
  double level = 0.99;
  auto* threshold_cmd = app.add_subcommand("threshold", "smallest axis value with mean f_C >= level");
  threshold_cmd->add_option("--in", threshold_in, "stats.csv")->required();
  threshold_cmd->add_option("--level", level, "cooperation level");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const auto config = build_config(run_opts);
      const auto out = spgg::run_and_export(config);
      std::printf("algo=%s final_f_C=%s final_mean_payoff=%s\n",
                  spgg::to_string(config.algorithm).c_str(),
                  spgg::format_real(out.final_coop_fraction).c_str(),
                  spgg::format_real(out.final_mean_payoff).c_str());
    } else if (sweep_cmd->parsed()) {
      const auto config = build_config(sweep_opts);
      spgg::SweepSpec spec;
      spec.axis = spgg::parse_axis(axis);
      spec.values = from_opt->count() ? spgg::arithmetic_range(from, to, step)
                                      : spgg::parse_double_list(values);
      spec.trials = trials;
      spec.jobs = jobs;
      const auto result = spgg::sweep(config, spec);
      const std::filesystem::path dir = config.output_dir.empty() ? "." : config.output_dir;
      std::filesystem::create_directories(dir);
      spgg::write_file_atomic((dir / "sweep.csv").string(), spgg::format_sweep_csv(result.rows));
      spgg::write_file_atomic((dir / "stats.csv").string(), spgg::format_stats_csv(result.stats));
      for (const auto& row : result.rows) {
        if (row.failed) {
          std::fprintf(stderr, "trial failed: value=%s trial=%d: %s\n",
                       spgg::format_real(row.axis_value).c_str(), row.trial, row.error.c_str());
        }
      }
      print_stats(result.stats);
    } else if (stats_cmd->parsed()) {
      const auto rows = spgg::parse_sweep_csv(spgg::read_file(stats_in));
      const auto stats = spgg::stats_from_rows(rows);
      spgg::write_file_atomic(stats_out, spgg::format_stats_csv(stats));
      print_stats(stats);
    } else if (threshold_cmd->parsed()) {
      const auto stats = spgg::parse_stats_csv(spgg::read_file(threshold_in));
      const auto est = spgg::threshold_estimate(stats, level);
      std::printf("threshold=%s non_monotone=%d\n",
                  est.value ? spgg::format_real(*est.value).c_str() : "none",
                  est.non_monotone ? 1 : 0);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
