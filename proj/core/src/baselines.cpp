#include "spgg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace spgg {

void FermiParams::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("Fermi temperature K must be finite and > 0");
  }
}

double fermi_adopt_prob(double payoff_self, double payoff_neighbor, double temperature) {
  return 1.0 / (1.0 + std::exp((payoff_self - payoff_neighbor) / temperature));
}

void fermi_step(StrategyGrid& grid, const GameParams& game, const FermiParams& params, Rng& rng) {
  const int L = grid.side();
  const std::size_t attempts = grid.size();
  for (std::size_t k = 0; k < attempts; ++k) {
    const auto idx = uniform_index(rng, grid.size());
    const int row = static_cast<int>(idx / L), col = static_cast<int>(idx % L);
    const auto nb = neighbors(grid, row, col)[uniform_index(rng, 4)];
    if (grid.at(row, col) == grid.at(nb.row, nb.col)) continue;
    const double self = total_payoff(grid, row, col, game);
    const double other = total_payoff(grid, nb.row, nb.col, game);
    if (uniform01(rng) < fermi_adopt_prob(self, other, params.temperature)) {
      grid.set(row, col, static_cast<Strategy>(grid.at(nb.row, nb.col)));
    }
  }
}

void QLearningParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha_q must lie in [0,1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma_q must lie in [0,1)");
  if (!(epsilon >= 0.0 && epsilon <= 1.0) || !(epsilon_min >= 0.0 && epsilon_min <= 1.0)) {
    throw std::invalid_argument("exploration rates must lie in [0,1]");
  }
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) {
    throw std::invalid_argument("epsilon decay must lie in (0,1]");
  }
}

double QTable::max_value(int state) const {
  return std::max(values_[state][0], values_[state][1]);
}

int select_action(const QTable& table, int state, double epsilon, Rng& rng) {
  if (uniform01(rng) < epsilon) return static_cast<int>(uniform_index(rng, 2));
  const double q0 = table.at(state, 0), q1 = table.at(state, 1);
  if (q0 == q1) return static_cast<int>(uniform_index(rng, 2));
  return q1 > q0 ? 1 : 0;
}

void q_update(QTable& table, int state, int action, double reward, int next_state, double alpha,
              double gamma) {
  double& q = table.at(state, action);
  q += alpha * (reward + gamma * table.max_value(next_state) - q);
}

double QLearningState::epsilon(const QLearningParams& params) const {
  const double decayed = params.epsilon * std::pow(params.epsilon_decay, static_cast<double>(steps));
  return std::max(params.epsilon_min, decayed);
}

void qlearn_step(StrategyGrid& grid, QLearningState& state, const GameParams& game,
                 const QLearningParams& params, Rng& rng) {
  const int L = grid.side();
  const std::size_t n = grid.size();
  const double eps = state.epsilon(params);
  std::vector<int> states(n);
  std::vector<std::uint8_t> actions(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int row = static_cast<int>(i / L), col = static_cast<int>(i % L);
    states[i] = QTable::state_index(grid.at(i), coop_neighbors(grid, row, col));
    actions[i] = static_cast<std::uint8_t>(select_action(state.table, states[i], eps, rng));
  }
  grid = apply_actions(grid, actions);
  const auto payoffs = payoff_field(grid, game);
  for (std::size_t i = 0; i < n; ++i) {
    const int row = static_cast<int>(i / L), col = static_cast<int>(i % L);
    const int next = QTable::state_index(grid.at(i), coop_neighbors(grid, row, col));
    q_update(state.table, states[i], actions[i], payoffs[i], next, params.alpha, params.gamma);
  }
  ++state.steps;
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

template <typename Step>
RunRecord run_dynamics(StrategyGrid grid, const GameParams& game, int steps,
                       std::span<const int> snapshot_times, Step&& step) {
  RunRecord record;
  auto observe_step = [&](int t) {
    auto payoffs = payoff_field(grid, game);
    record.coop_fraction.push_back(cooperation_fraction(grid));
    record.mean_payoff.push_back(mean_of(payoffs));
    if (std::find(snapshot_times.begin(), snapshot_times.end(), t) != snapshot_times.end()) {
      record.snapshots.push_back({t, grid, std::move(payoffs)});
    }
  };
  observe_step(0);
  for (int t = 1; t <= steps; ++t) {
    step(grid);
    observe_step(t);
  }
  return record;
}

}  // namespace

RunRecord run_fermi(int side, const GameParams& game, const InitMode& init, const FermiParams& params,
                    int steps, std::uint64_t seed, std::span<const int> snapshot_times) {
  game.validate();
  params.validate();
  Rng rng(mix_seed(seed, 2));
  return run_dynamics(init_grid(side, init, mix_seed(seed, 0)), game, steps, snapshot_times,
                      [&](StrategyGrid& g) { fermi_step(g, game, params, rng); });
}

RunRecord run_qlearning(int side, const GameParams& game, const InitMode& init,
                        const QLearningParams& params, int steps, std::uint64_t seed,
                        std::span<const int> snapshot_times) {
  game.validate();
  params.validate();
  Rng rng(mix_seed(seed, 2));
  QLearningState state;
  return run_dynamics(init_grid(side, init, mix_seed(seed, 0)), game, steps, snapshot_times,
                      [&](StrategyGrid& g) { qlearn_step(g, state, game, params, rng); });
}

}  // namespace spgg
