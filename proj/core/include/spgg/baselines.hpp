#pragma once

// Classical comparison dynamics on the same lattice and payoff engine:
// Fermi pairwise imitation and shared tabular Q-learning. Neither uses the
// punishment term.

#include <array>
#include <cstdint>
#include <span>

#include "spgg/lattice.hpp"
#include "spgg/random.hpp"
#include "spgg/run_record.hpp"

namespace spgg {

struct FermiParams {
  double temperature = 0.5;  // K
  void validate() const;
};

// W = 1 / (1 + exp((payoff_self - payoff_neighbor) / K)).
double fermi_adopt_prob(double payoff_self, double payoff_neighbor, double temperature);

// One Monte Carlo step: L*L random sequential imitation attempts.
void fermi_step(StrategyGrid& grid, const GameParams& game, const FermiParams& params, Rng& rng);

struct QLearningParams {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon = 0.05;
  double epsilon_min = 0.01;
  double epsilon_decay = 0.999;  // per step, epsilon_t = max(min, epsilon * decay^t)
  void validate() const;
};

// Ten states: own strategy (0/1) x cooperating-neighbour count (0..4).
class QTable {
 public:
  static constexpr int kStates = 10;

  static int state_index(int own_strategy, int coop_neighbors) {
    return own_strategy * 5 + coop_neighbors;
  }

  double& at(int state, int action) { return values_[state][action]; }
  double at(int state, int action) const { return values_[state][action]; }
  double max_value(int state) const;

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::array<std::array<double, 2>, kStates> values_{};
};

// Epsilon-greedy; greedy ties broken uniformly at random.
int select_action(const QTable& table, int state, double epsilon, Rng& rng);

// Q[s,a] += alpha (reward + gamma max_a' Q[s',a'] - Q[s,a]).
void q_update(QTable& table, int state, int action, double reward, int next_state, double alpha,
              double gamma);

struct QLearningState {
  QTable table;
  std::int64_t steps = 0;
  double epsilon(const QLearningParams& params) const;
};

// Synchronous round: all agents choose, the profile is applied, then each
// agent updates the shared table in row-major order.
void qlearn_step(StrategyGrid& grid, QLearningState& state, const GameParams& game,
                 const QLearningParams& params, Rng& rng);

RunRecord run_fermi(int side, const GameParams& game, const InitMode& init, const FermiParams& params,
                    int steps, std::uint64_t seed, std::span<const int> snapshot_times);

RunRecord run_qlearning(int side, const GameParams& game, const InitMode& init,
                        const QLearningParams& params, int steps, std::uint64_t seed,
                        std::span<const int> snapshot_times);

}  // namespace spgg
