#pragma once

// Parameter-shared PPO over the lattice: every agent samples from one
// actor-critic network, experience from all agents is pooled, and the
// network is updated with the clipped surrogate, a value MSE and an entropy
// bonus.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "spgg/lattice.hpp"
#include "spgg/network.hpp"
#include "spgg/run_record.hpp"

namespace spgg {

struct PpoHyperparams {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip_eps = 0.2;
  double value_coef = 0.5;     // delta
  double entropy_coef = 0.01;  // rho
  int epochs = 4;              // K
  int horizon = 4;             // H, environment steps per iteration
  int iterations = 1000;       // T
  bool normalize_advantages = false;
  int hidden1 = 64;
  int hidden2 = 64;
  AdamConfig adam{};

  void validate() const;
};

class NonFiniteLossError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A_t = sum_l (gamma*lambda)^l delta_{t+l}; values carries the bootstrap
// V(x_H) as its last entry.
std::vector<double> compute_gae(std::span<const double> rewards, std::span<const double> values,
                                double gamma, double lambda);

double clip_objective(std::span<const double> log_probs_new, std::span<const double> log_probs_old,
                      std::span<const double> advantages, double clip_eps);

double value_loss(std::span<const double> values_pred, std::span<const double> returns);

double policy_entropy(const std::array<double, 2>& probs);
double entropy_bonus(std::span<const std::array<double, 2>> probs);

// Per-agent, per-step storage. Slot (t, i) lives at t * agents + i.
struct RolloutBuffer {
  int agents = 0;
  int horizon = 0;
  int input_dim = 0;
  std::vector<double> observations;  // horizon * agents * input_dim
  std::vector<int> actions;
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<double> rewards;
  std::vector<double> advantages;
  std::vector<double> returns;
  std::vector<double> bootstrap_values;  // V(x_H), one per agent

  RolloutBuffer(int agents, int horizon, int input_dim);

  std::size_t slots() const { return actions.size(); }
  std::size_t slot(int t, int agent) const {
    return static_cast<std::size_t>(t) * agents + agent;
  }

  // Fills advantages and returns (= advantage + value) per agent.
  void finish(double gamma, double lambda);
};

struct PpoBatch {
  int input_dim = 0;
  std::vector<double> observations;
  std::vector<int> actions;
  std::vector<double> old_log_probs;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return actions.size(); }
  static PpoBatch from_buffer(const RolloutBuffer& buffer, bool normalize_advantages);
};

struct LossBreakdown {
  double total = 0.0;      // -surrogate - rho*entropy + delta*value_loss
  double surrogate = 0.0;  // L^CLIP
  double value_loss = 0.0;
  double entropy = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
};

// Combined PPO loss on a batch; when grad is non-null it receives the exact
// gradient. Rows with identical observations share one network evaluation.
LossBreakdown ppo_loss(const ActorCriticParams& params, const PpoBatch& batch,
                       const PpoHyperparams& hyper, ActorCriticParams* grad = nullptr);

struct UpdateDiagnostics {
  LossBreakdown first_epoch;
  LossBreakdown last_epoch;
  double learning_rate = 0.0;
};

// K full-batch Adam epochs, then one schedule step. Throws NonFiniteLossError.
UpdateDiagnostics ppo_update(ActorCriticParams& params, OptimizerState& optimizer,
                             const PpoBatch& batch, const PpoHyperparams& hyper);

struct EnvConfig {
  int side = 50;
  GameParams game{};
  InitMode init = InitMode::all_defect();
  bool local_mean_field = true;  // false drops mu from the observation

  int input_dim() const { return local_mean_field ? 4 : 3; }
};

// Observation rows for every agent, row-major (agents x input_dim).
std::vector<double> observation_matrix(const StrategyGrid& grid, bool local_mean_field);

struct TrainCallbacks {
  std::function<void(int iteration, const StrategyGrid&, const UpdateDiagnostics&)> on_iteration;
};

struct TrainResult {
  RunRecord record;
  ActorCriticParams params;
};

TrainResult train(const EnvConfig& env, const PpoHyperparams& hyper, std::uint64_t seed,
                  std::span<const int> snapshot_times, const TrainCallbacks& callbacks = {});

}  // namespace spgg
