#pragma once

// Experiment harness: one configuration type shared by single runs and
// sweeps, plus the algorithm dispatch.

#include <cstdint>
#include <string>
#include <vector>

#include "spgg/baselines.hpp"
#include "spgg/lattice.hpp"
#include "spgg/ppo.hpp"
#include "spgg/run_record.hpp"
#include "spgg/stats.hpp"

namespace spgg {

enum class Algorithm { kLmfppoUbp, kLmfppo, kPpo, kFermi, kQLearning };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm algo);
bool is_learning_algorithm(Algorithm algo);  // the PPO family

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kLmfppoUbp;
  int side = 200;
  double r = 4.5;
  double p = 0.5;
  PpoHyperparams ppo{};
  InitMode init = InitMode::bernoulli(0.5);
  std::uint64_t seed = 1;
  int iterations = 1000;  // PPO iterations, or Monte Carlo steps for fermi/qlearn
  std::vector<int> snapshots;
  bool snapshots_set = false;
  std::string output_dir;
  double final_window = 0.1;
  FermiParams fermi{};
  QLearningParams qlearning{};
  std::string checkpoint_path;  // PPO family: write final weights here if set

  // lmfppo and ppo force p = 0; the baselines never punish.
  GameParams effective_game() const;
  std::vector<int> effective_snapshots() const;
  void validate() const;
};

// Applies one "key = value" setting (same keys as the CLI long flags).
// Throws std::invalid_argument on unknown keys or bad values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

// Flat "key = value" text with '#' comments.
void load_config_file(ExperimentConfig& config, const std::string& path);

std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);
// from, from+step, ... up to `to` inclusive (with a 1e-9 relative guard).
std::vector<double> arithmetic_range(double from, double to, double step);

struct RunOutcome {
  RunRecord record;
  double final_coop_fraction = 0.0;
  double final_mean_payoff = 0.0;
};

RunOutcome run_experiment(const ExperimentConfig& config);

// Runs and, when output_dir is set, writes timeseries.csv, snapshot_t{N}.txt,
// payoff_t{N}.csv and summary.txt.
RunOutcome run_and_export(const ExperimentConfig& config);

enum class SweepAxis { kR, kP, kRho };
SweepAxis parse_axis(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepSpec {
  SweepAxis axis = SweepAxis::kR;
  std::vector<double> values;
  int trials = 1;
  int jobs = 1;  // worker threads; never changes results
};

struct SweepRow {
  double axis_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double final_coop_fraction = 0.0;  // NaN when the trial failed
  double final_mean_payoff = 0.0;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // value-major, then trial
  std::vector<TrialStats> stats;
};

// Trial i uses seed base_seed + i. Failed trials are kept and marked.
SweepResult sweep(const ExperimentConfig& base, const SweepSpec& spec);

// Per axis value, over non-failed trials; values with no successful trial
// are skipped.
std::vector<TrialStats> stats_from_rows(const std::vector<SweepRow>& rows);

}  // namespace spgg
