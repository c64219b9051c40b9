#include "spgg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "spgg/io.hpp"

namespace spgg {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "lmfppo-ubp") return Algorithm::kLmfppoUbp;
  if (name == "lmfppo") return Algorithm::kLmfppo;
  if (name == "ppo") return Algorithm::kPpo;
  if (name == "fermi") return Algorithm::kFermi;
  if (name == "qlearn") return Algorithm::kQLearning;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kLmfppoUbp: return "lmfppo-ubp";
    case Algorithm::kLmfppo: return "lmfppo";
    case Algorithm::kPpo: return "ppo";
    case Algorithm::kFermi: return "fermi";
    case Algorithm::kQLearning: return "qlearn";
  }
  return "?";
}

bool is_learning_algorithm(Algorithm algo) {
  return algo == Algorithm::kLmfppoUbp || algo == Algorithm::kLmfppo || algo == Algorithm::kPpo;
}

GameParams ExperimentConfig::effective_game() const {
  return GameParams{r, algorithm == Algorithm::kLmfppoUbp ? p : 0.0};
}

std::vector<int> ExperimentConfig::effective_snapshots() const {
  if (snapshots_set) return snapshots;
  if (is_learning_algorithm(algorithm)) return {0, 1, 10, 100, 1000};
  return {0, 10, 100, 1000, 10000};
}

void ExperimentConfig::validate() const {
  if (side < StrategyGrid::kMinSide) throw std::invalid_argument("L must be >= 3");
  if (init.kind == InitMode::Kind::kHalfAndHalf && side % 2 != 0) {
    throw std::invalid_argument("half-and-half initialisation needs an even L");
  }
  GameParams{r, p}.validate();
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (!(final_window > 0.0 && final_window <= 1.0)) {
    throw std::invalid_argument("final window fraction must lie in (0,1]");
  }
  for (int t : snapshots) {
    if (t < 0) throw std::invalid_argument("snapshot times must be >= 0");
  }
  if (is_learning_algorithm(algorithm)) {
    ppo.validate();
  } else if (algorithm == Algorithm::kFermi) {
    fermi.validate();
  } else {
    qlearning.validate();
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number for " + key + ": '" + value + "'");
  }
  if (used != value.size()) throw std::invalid_argument("bad number for " + key + ": '" + value + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad integer for " + key + ": '" + value + "'");
  }
  if (used != value.size()) throw std::invalid_argument("bad integer for " + key + ": '" + value + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw std::invalid_argument("bad boolean for " + key + ": '" + value + "'");
}

}  // namespace

void apply_setting(ExperimentConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string v = trim(raw_value);
  auto& h = c.ppo;
  if (key == "algo") c.algorithm = parse_algorithm(v);
  else if (key == "L") c.side = static_cast<int>(to_int(key, v));
  else if (key == "r") c.r = to_double(key, v);
  else if (key == "p") c.p = to_double(key, v);
  else if (key == "rho") h.entropy_coef = to_double(key, v);
  else if (key == "gamma") h.gamma = to_double(key, v);
  else if (key == "lambda") h.lambda = to_double(key, v);
  else if (key == "eps") h.clip_eps = to_double(key, v);
  else if (key == "delta") h.value_coef = to_double(key, v);
  else if (key == "K") h.epochs = static_cast<int>(to_int(key, v));
  else if (key == "H") h.horizon = static_cast<int>(to_int(key, v));
  else if (key == "iters") c.iterations = static_cast<int>(to_int(key, v));
  else if (key == "init") c.init = InitMode::parse(v);
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_int(key, v));
  else if (key == "snapshots") {
    c.snapshots = parse_int_list(v);
    c.snapshots_set = true;
  }
  else if (key == "out") c.output_dir = v;
  else if (key == "lr") h.adam.learning_rate = to_double(key, v);
  else if (key == "lr-interval") h.adam.decay_interval = static_cast<int>(to_int(key, v));
  else if (key == "lr-factor") h.adam.decay_factor = to_double(key, v);
  else if (key == "hidden") {
    const auto sizes = parse_int_list(v);
    if (sizes.empty() || sizes.size() > 2) throw std::invalid_argument("hidden expects h or h1,h2");
    h.hidden1 = sizes.front();
    h.hidden2 = sizes.back();
  }
  else if (key == "normalize-adv") h.normalize_advantages = to_bool(key, v);
  else if (key == "window") c.final_window = to_double(key, v);
  else if (key == "fermi-temp") c.fermi.temperature = to_double(key, v);
  else if (key == "q-alpha") c.qlearning.alpha = to_double(key, v);
  else if (key == "q-gamma") c.qlearning.gamma = to_double(key, v);
  else if (key == "q-eps") c.qlearning.epsilon = to_double(key, v);
  else if (key == "q-eps-min") c.qlearning.epsilon_min = to_double(key, v);
  else if (key == "q-eps-decay") c.qlearning.epsilon_decay = to_double(key, v);
  else if (key == "checkpoint") c.checkpoint_path = v;
  else throw std::invalid_argument("unknown setting: " + key);
}

void load_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
  }
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(static_cast<int>(to_int("list", item)));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double("list", item));
  }
  return out;
}

std::vector<double> arithmetic_range(double from, double to, double step) {
  if (!(step > 0.0) || !(to >= from)) {
    throw std::invalid_argument("range needs step > 0 and to >= from");
  }
  std::vector<double> out;
  const double guard = 1e-9 * std::max(1.0, std::abs(to));
  for (long k = 0;; ++k) {
    const double x = from + static_cast<double>(k) * step;
    if (x > to + guard) break;
    // Snap to 12 decimals so 3.5 + 3*0.1 is exactly the double nearest 3.8.
    out.push_back(std::round(x * 1e12) / 1e12);
  }
  return out;
}

RunOutcome run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto game = config.effective_game();
  const auto snaps = config.effective_snapshots();
  RunOutcome out;
  if (is_learning_algorithm(config.algorithm)) {
    EnvConfig env;
    env.side = config.side;
    env.game = game;
    env.init = config.init;
    env.local_mean_field = config.algorithm != Algorithm::kPpo;
    auto hyper = config.ppo;
    hyper.iterations = config.iterations;
    auto result = train(env, hyper, config.seed, snaps);
    if (!config.checkpoint_path.empty()) {
      save_checkpoint(config.checkpoint_path, Checkpoint{result.params, config.seed,
                                                         static_cast<std::int64_t>(config.iterations)});
    }
    out.record = std::move(result.record);
  } else if (config.algorithm == Algorithm::kFermi) {
    out.record = run_fermi(config.side, game, config.init, config.fermi, config.iterations,
                           config.seed, snaps);
  } else {
    out.record = run_qlearning(config.side, game, config.init, config.qlearning, config.iterations,
                               config.seed, snaps);
  }
  out.final_coop_fraction = out.record.final_coop_fraction(config.final_window);
  out.final_mean_payoff = out.record.final_mean_payoff(config.final_window);
  return out;
}

RunOutcome run_and_export(const ExperimentConfig& config) {
  auto out = run_experiment(config);
  if (config.output_dir.empty()) return out;
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  write_file_atomic((dir / "timeseries.csv").string(), format_timeseries(out.record));
  for (const auto& snap : out.record.snapshots) {
    const auto tag = std::to_string(snap.iteration);
    write_file_atomic((dir / ("snapshot_t" + tag + ".txt")).string(), format_snapshot(snap.grid));
    write_file_atomic((dir / ("payoff_t" + tag + ".csv")).string(),
                      format_payoff_heatmap(snap.payoffs, snap.grid.side()));
  }
  std::ostringstream summary;
  summary << "algo=" << to_string(config.algorithm) << " L=" << config.side
          << " r=" << format_real(config.r) << " p=" << format_real(config.effective_game().p)
          << " rho=" << format_real(config.ppo.entropy_coef) << " init=" << config.init.to_string()
          << " seed=" << config.seed << " iters=" << config.iterations
          << " final_f_C=" << format_real(out.final_coop_fraction)
          << " final_mean_payoff=" << format_real(out.final_mean_payoff) << '\n';
  write_file_atomic((dir / "summary.txt").string(), summary.str());
  return out;
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "r") return SweepAxis::kR;
  if (name == "p") return SweepAxis::kP;
  if (name == "rho") return SweepAxis::kRho;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kR: return "r";
    case SweepAxis::kP: return "p";
    case SweepAxis::kRho: return "rho";
  }
  return "?";
}

SweepResult sweep(const ExperimentConfig& base, const SweepSpec& spec) {
  if (spec.values.empty()) throw std::invalid_argument("sweep needs at least one axis value");
  if (spec.trials < 1) throw std::invalid_argument("sweep needs trials >= 1");
  const std::size_t total = spec.values.size() * static_cast<std::size_t>(spec.trials);
  SweepResult result;
  result.rows.resize(total);

  auto run_one = [&](std::size_t k) {
    const double value = spec.values[k / spec.trials];
    const int trial = static_cast<int>(k % spec.trials);
    ExperimentConfig cfg = base;
    cfg.output_dir.clear();
    cfg.checkpoint_path.clear();
    cfg.snapshots.clear();
    cfg.snapshots_set = true;
    cfg.seed = base.seed + static_cast<std::uint64_t>(trial);
    switch (spec.axis) {
      case SweepAxis::kR: cfg.r = value; break;
      case SweepAxis::kP: cfg.p = value; break;
      case SweepAxis::kRho: cfg.ppo.entropy_coef = value; break;
    }
    SweepRow row;
    row.axis_value = value;
    row.trial = trial;
    row.seed = cfg.seed;
    try {
      const auto out = run_experiment(cfg);
      row.final_coop_fraction = out.final_coop_fraction;
      row.final_mean_payoff = out.final_mean_payoff;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
      row.final_coop_fraction = std::nan("");
      row.final_mean_payoff = std::nan("");
    }
    result.rows[k] = std::move(row);
  };

  const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(total)));
  if (jobs == 1) {
    for (std::size_t k = 0; k < total; ++k) run_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t k = next++; k < total; k = next++) run_one(k);
      });
    }
  }
  result.stats = stats_from_rows(result.rows);
  return result;
}

std::vector<TrialStats> stats_from_rows(const std::vector<SweepRow>& rows) {
  std::vector<double> values;
  for (const auto& row : rows) {
    if (std::find(values.begin(), values.end(), row.axis_value) == values.end()) {
      values.push_back(row.axis_value);
    }
  }
  std::sort(values.begin(), values.end());
  std::vector<TrialStats> out;
  for (double v : values) {
    std::vector<double> samples;
    for (const auto& row : rows) {
      if (row.axis_value == v && !row.failed && std::isfinite(row.final_coop_fraction)) {
        samples.push_back(row.final_coop_fraction);
      }
    }
    if (!samples.empty()) out.push_back(summarize(samples, v));
  }
  return out;
}

}  // namespace spgg
