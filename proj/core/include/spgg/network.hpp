#pragma once

// Shared actor-critic MLP: two ReLU layers feeding a 2-way softmax policy
// head and a scalar value head, with hand-written reverse-mode gradients and
// Adam under a step-decay learning-rate schedule.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spgg/random.hpp"

namespace spgg {

struct NetworkShape {
  int input_dim = 4;
  int hidden1 = 64;
  int hidden2 = 64;
  static constexpr int kActions = 2;

  std::size_t parameter_count() const;
  void validate() const;
  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

// All weights live in one flat buffer so the optimizer, gradients and
// checkpoints treat them uniformly. Layout: W1 (h1 x in), b1, W2 (h2 x h1),
// b2, Wa (2 x h2), ba, wv (h2), bv. Matrices are row-major.
class ActorCriticParams {
 public:
  ActorCriticParams() = default;
  explicit ActorCriticParams(const NetworkShape& shape);  // zero-filled

  // Uniform in +-sqrt(6 / (fan_in + fan_out)) per layer, zero biases.
  static ActorCriticParams glorot(const NetworkShape& shape, std::uint64_t seed);

  const NetworkShape& shape() const { return shape_; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::span<double> w1() { return block(0); }
  std::span<double> b1() { return block(1); }
  std::span<double> w2() { return block(2); }
  std::span<double> b2() { return block(3); }
  std::span<double> wa() { return block(4); }
  std::span<double> ba() { return block(5); }
  std::span<double> wv() { return block(6); }
  double& bv() { return values_.back(); }

  std::span<const double> w1() const { return block(0); }
  std::span<const double> b1() const { return block(1); }
  std::span<const double> w2() const { return block(2); }
  std::span<const double> b2() const { return block(3); }
  std::span<const double> wa() const { return block(4); }
  std::span<const double> ba() const { return block(5); }
  std::span<const double> wv() const { return block(6); }
  double bv() const { return values_.back(); }

  bool all_finite() const;

  friend bool operator==(const ActorCriticParams&, const ActorCriticParams&) = default;

 private:
  std::span<double> block(int k);
  std::span<const double> block(int k) const;

  NetworkShape shape_;
  std::array<std::size_t, 9> offsets_{};
  std::vector<double> values_;
};

struct PolicyOutput {
  std::array<double, 2> probs{};
  std::array<double, 2> logits{};
  double value = 0.0;

  // Log-softmax from the logits; finite even when probs underflow.
  double log_prob(int action) const;
};

std::array<double, 2> softmax2(const std::array<double, 2>& logits);

// Activations cached for the backward pass.
struct ForwardPass {
  int rows = 0;
  std::vector<double> hidden1;  // rows x h1, post-ReLU
  std::vector<double> hidden2;  // rows x h2, post-ReLU
  std::vector<double> logits;   // rows x 2
  std::vector<double> values;   // rows

  PolicyOutput output(int row) const;
};

// inputs is row-major, rows x input_dim.
ForwardPass forward(const ActorCriticParams& params, std::span<const double> inputs);

std::vector<PolicyOutput> evaluate(const ActorCriticParams& params, std::span<const double> inputs);

struct SampledAction {
  int action = 0;
  double log_prob = 0.0;
};

SampledAction sample_action(const PolicyOutput& policy, Rng& rng);

// Gradient of a scalar loss given dL/dlogits (rows x 2) and dL/dvalue (rows).
ActorCriticParams backward(const ActorCriticParams& params, std::span<const double> inputs,
                           const ForwardPass& pass, std::span<const double> grad_logits,
                           std::span<const double> grad_values);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int decay_interval = 100;  // schedule steps between decays
  double decay_factor = 0.9;
};

struct OptimizerState {
  AdamConfig config;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t adam_steps = 0;      // drives bias correction
  std::int64_t schedule_steps = 0;  // drives the step decay (one per training iteration)

  static OptimizerState for_params(const ActorCriticParams& params, const AdamConfig& config);

  double learning_rate_at(std::int64_t schedule_step) const;
  double current_learning_rate() const { return learning_rate_at(schedule_steps); }
  void advance_schedule() { ++schedule_steps; }
};

// Gradient-descent Adam step with bias correction.
void adam_step(OptimizerState& state, ActorCriticParams& params, const ActorCriticParams& grads);

// Versioned text checkpoint; doubles round-trip exactly.
struct Checkpoint {
  ActorCriticParams params;
  std::uint64_t seed = 0;
  std::int64_t step = 0;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace spgg
