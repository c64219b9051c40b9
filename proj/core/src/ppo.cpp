#include "spgg/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <string_view>
#include <unordered_map>

#include "spgg/random.hpp"

namespace spgg {

void PpoHyperparams::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0,1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0,1]");
  if (!(clip_eps > 0.0)) throw std::invalid_argument("clip epsilon must be > 0");
  if (!(value_coef >= 0.0)) throw std::invalid_argument("value coefficient must be >= 0");
  if (!(entropy_coef >= 0.0)) throw std::invalid_argument("entropy coefficient must be >= 0");
  if (epochs < 1) throw std::invalid_argument("PPO epochs K must be >= 1");
  if (horizon < 1) throw std::invalid_argument("rollout horizon H must be >= 1");
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (hidden1 < 1 || hidden2 < 1) throw std::invalid_argument("hidden sizes must be >= 1");
}

std::vector<double> compute_gae(std::span<const double> rewards, std::span<const double> values,
                                double gamma, double lambda) {
  const std::size_t h = rewards.size();
  if (values.size() != h + 1) {
    throw std::invalid_argument("compute_gae: values must hold H+1 entries (bootstrap last)");
  }
  std::vector<double> adv(h);
  double running = 0.0;
  for (std::size_t k = h; k-- > 0;) {
    const double delta = rewards[k] + gamma * values[k + 1] - values[k];
    running = delta + gamma * lambda * running;
    adv[k] = running;
  }
  return adv;
}

double clip_objective(std::span<const double> log_probs_new, std::span<const double> log_probs_old,
                      std::span<const double> advantages, double clip_eps) {
  const std::size_t n = advantages.size();
  if (log_probs_new.size() != n || log_probs_old.size() != n) {
    throw std::invalid_argument("clip_objective: length mismatch");
  }
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = std::exp(log_probs_new[i] - log_probs_old[i]);
    const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
    sum += std::min(ratio * advantages[i], clipped * advantages[i]);
  }
  return sum / static_cast<double>(n);
}

double value_loss(std::span<const double> values_pred, std::span<const double> returns) {
  if (values_pred.size() != returns.size()) throw std::invalid_argument("value_loss: length mismatch");
  if (returns.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < returns.size(); ++i) {
    const double e = values_pred[i] - returns[i];
    sum += e * e;
  }
  return sum / static_cast<double>(returns.size());
}

double policy_entropy(const std::array<double, 2>& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double entropy_bonus(std::span<const std::array<double, 2>> probs) {
  if (probs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : probs) sum += policy_entropy(p);
  return sum / static_cast<double>(probs.size());
}

RolloutBuffer::RolloutBuffer(int agents_, int horizon_, int input_dim_)
    : agents(agents_), horizon(horizon_), input_dim(input_dim_) {
  const std::size_t n = static_cast<std::size_t>(agents) * horizon;
  observations.assign(n * input_dim, 0.0);
  actions.assign(n, 0);
  log_probs.assign(n, 0.0);
  values.assign(n, 0.0);
  rewards.assign(n, 0.0);
  advantages.assign(n, 0.0);
  returns.assign(n, 0.0);
  bootstrap_values.assign(agents, 0.0);
}

void RolloutBuffer::finish(double gamma, double lambda) {
  std::vector<double> r(horizon), v(horizon + 1);
  for (int i = 0; i < agents; ++i) {
    for (int t = 0; t < horizon; ++t) {
      r[t] = rewards[slot(t, i)];
      v[t] = values[slot(t, i)];
    }
    v[horizon] = bootstrap_values[i];
    const auto adv = compute_gae(r, v, gamma, lambda);
    for (int t = 0; t < horizon; ++t) {
      advantages[slot(t, i)] = adv[t];
      returns[slot(t, i)] = adv[t] + v[t];
    }
  }
}

PpoBatch PpoBatch::from_buffer(const RolloutBuffer& buffer, bool normalize_advantages) {
  PpoBatch b;
  b.input_dim = buffer.input_dim;
  b.observations = buffer.observations;
  b.actions = buffer.actions;
  b.old_log_probs = buffer.log_probs;
  b.advantages = buffer.advantages;
  b.returns = buffer.returns;
  if (normalize_advantages && b.advantages.size() > 1) {
    double mean = 0.0;
    for (double a : b.advantages) mean += a;
    mean /= static_cast<double>(b.advantages.size());
    double var = 0.0;
    for (double a : b.advantages) var += (a - mean) * (a - mean);
    var /= static_cast<double>(b.advantages.size());
    const double sd = std::sqrt(var) + 1e-8;
    for (double& a : b.advantages) a = (a - mean) / sd;
  }
  return b;
}

namespace {

// Collapses bitwise-identical observation rows; first occurrence order.
struct UniqueRows {
  std::vector<double> rows;
  std::vector<int> row_of_sample;
};

UniqueRows dedupe_rows(std::span<const double> inputs, int dim) {
  UniqueRows out;
  const std::size_t n = inputs.size() / dim;
  out.row_of_sample.resize(n);
  std::unordered_map<std::string_view, int> seen;
  const auto* bytes = reinterpret_cast<const char*>(inputs.data());
  const std::size_t row_bytes = sizeof(double) * dim;
  for (std::size_t i = 0; i < n; ++i) {
    std::string_view key(bytes + i * row_bytes, row_bytes);
    auto [it, inserted] = seen.try_emplace(key, static_cast<int>(seen.size()));
    if (inserted) {
      out.rows.insert(out.rows.end(), inputs.begin() + i * dim, inputs.begin() + (i + 1) * dim);
    }
    out.row_of_sample[i] = it->second;
  }
  return out;
}

}  // namespace

LossBreakdown ppo_loss(const ActorCriticParams& params, const PpoBatch& batch,
                       const PpoHyperparams& hyper, ActorCriticParams* grad) {
  const std::size_t n = batch.size();
  if (batch.input_dim != params.shape().input_dim ||
      batch.observations.size() != n * batch.input_dim || batch.old_log_probs.size() != n ||
      batch.advantages.size() != n || batch.returns.size() != n) {
    throw std::invalid_argument("ppo_loss: batch is inconsistent with the network");
  }
  LossBreakdown out;
  if (n == 0) {
    if (grad) *grad = ActorCriticParams(params.shape());
    return out;
  }

  const auto unique = dedupe_rows(batch.observations, batch.input_dim);
  const auto pass = forward(params, unique.rows);
  const std::size_t rows = pass.rows;
  std::vector<PolicyOutput> policy(rows);
  std::vector<std::array<double, 2>> log_pi(rows);
  std::vector<double> entropy(rows);
  for (std::size_t u = 0; u < rows; ++u) {
    policy[u] = pass.output(static_cast<int>(u));
    log_pi[u] = {policy[u].log_prob(0), policy[u].log_prob(1)};
    entropy[u] = policy_entropy(policy[u].probs);
  }

  std::vector<double> grad_logits(rows * 2, 0.0), grad_values(rows, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double eps = hyper.clip_eps;
  double surr_sum = 0.0, vf_sum = 0.0, ent_sum = 0.0, ratio_sum = 0.0;
  std::size_t clipped_count = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const int u = unique.row_of_sample[i];
    const int a = batch.actions[i];
    const auto& pi = policy[u];
    const double ratio = std::exp(log_pi[u][a] - batch.old_log_probs[i]);
    const double adv = batch.advantages[i];
    const double unclipped = ratio * adv;
    const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * adv;
    surr_sum += std::min(unclipped, clipped);
    ratio_sum += ratio;
    if (std::abs(ratio - 1.0) > eps) ++clipped_count;
    const double err = pi.value - batch.returns[i];
    vf_sum += err * err;
    ent_sum += entropy[u];

    if (grad) {
      // d/dlogp of the surrogate term: ratio*A on the unclipped branch, 0 otherwise.
      const double d_logp = unclipped <= clipped ? unclipped : 0.0;
      for (int j = 0; j < 2; ++j) {
        const double dlogp_dz = (j == a ? 1.0 : 0.0) - pi.probs[j];
        const double dent_dz = -pi.probs[j] * (log_pi[u][j] + entropy[u]);
        grad_logits[2 * u + j] +=
            inv_n * (-d_logp * dlogp_dz - hyper.entropy_coef * dent_dz);
      }
      grad_values[u] += inv_n * hyper.value_coef * 2.0 * err;
    }
  }

  out.surrogate = surr_sum * inv_n;
  out.value_loss = vf_sum * inv_n;
  out.entropy = ent_sum * inv_n;
  out.mean_ratio = ratio_sum * inv_n;
  out.clip_fraction = static_cast<double>(clipped_count) * inv_n;
  out.total = -out.surrogate - hyper.entropy_coef * out.entropy + hyper.value_coef * out.value_loss;

  if (grad) *grad = backward(params, unique.rows, pass, grad_logits, grad_values);
  return out;
}

UpdateDiagnostics ppo_update(ActorCriticParams& params, OptimizerState& optimizer,
                             const PpoBatch& batch, const PpoHyperparams& hyper) {
  if (hyper.epochs < 1) throw std::invalid_argument("PPO epochs K must be >= 1");
  UpdateDiagnostics diag;
  diag.learning_rate = optimizer.current_learning_rate();
  ActorCriticParams grad;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    const auto loss = ppo_loss(params, batch, hyper, &grad);
    if (!std::isfinite(loss.total) || !grad.all_finite()) {
      throw NonFiniteLossError("non-finite PPO loss at epoch " + std::to_string(epoch) +
                               " (surrogate " + std::to_string(loss.surrogate) + ", value " +
                               std::to_string(loss.value_loss) + ")");
    }
    if (epoch == 0) diag.first_epoch = loss;
    diag.last_epoch = loss;
    adam_step(optimizer, params, grad);
  }
  if (!params.all_finite()) throw NonFiniteLossError("parameters became non-finite");
  optimizer.advance_schedule();
  return diag;
}

std::vector<double> observation_matrix(const StrategyGrid& grid, bool local_mean_field) {
  const auto obs = observe_all(grid);
  const int dim = local_mean_field ? 4 : 3;
  std::vector<double> out(obs.size() * dim);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    double* row = out.data() + i * dim;
    row[0] = obs[i].own_strategy;
    row[1] = obs[i].n_coop_neighbors;
    row[2] = obs[i].global_coop_freq;
    if (local_mean_field) row[3] = obs[i].local_mean_field;
  }
  return out;
}

namespace {

// One network evaluation per distinct observation row.
std::vector<PolicyOutput> evaluate_dedup(const ActorCriticParams& params,
                                         std::span<const double> inputs) {
  const auto unique = dedupe_rows(inputs, params.shape().input_dim);
  const auto pass = forward(params, unique.rows);
  std::vector<PolicyOutput> out(unique.row_of_sample.size());
  std::vector<PolicyOutput> per_row(pass.rows);
  for (int u = 0; u < pass.rows; ++u) per_row[u] = pass.output(u);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = per_row[unique.row_of_sample[i]];
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

bool wants_snapshot(std::span<const int> times, int t) {
  return std::find(times.begin(), times.end(), t) != times.end();
}

}  // namespace

TrainResult train(const EnvConfig& env, const PpoHyperparams& hyper, std::uint64_t seed,
                  std::span<const int> snapshot_times, const TrainCallbacks& callbacks) {
  hyper.validate();
  env.game.validate();

  StrategyGrid grid = init_grid(env.side, env.init, mix_seed(seed, 0));
  const NetworkShape shape{env.input_dim(), hyper.hidden1, hyper.hidden2};
  TrainResult result{RunRecord{}, ActorCriticParams::glorot(shape, mix_seed(seed, 1))};
  auto& params = result.params;
  auto& record = result.record;
  OptimizerState optimizer = OptimizerState::for_params(params, hyper.adam);
  Rng rng(mix_seed(seed, 2));

  const int agents = static_cast<int>(grid.size());
  const int dim = env.input_dim();

  auto payoffs = payoff_field(grid, env.game);
  record.coop_fraction.push_back(cooperation_fraction(grid));
  record.mean_payoff.push_back(mean_of(payoffs));
  if (wants_snapshot(snapshot_times, 0)) record.snapshots.push_back({0, grid, payoffs});

  std::vector<std::uint8_t> actions(agents);
  for (int it = 1; it <= hyper.iterations; ++it) {
    RolloutBuffer buffer(agents, hyper.horizon, dim);
    for (int t = 0; t < hyper.horizon; ++t) {
      const auto obs = observation_matrix(grid, env.local_mean_field);
      const auto policy = evaluate_dedup(params, obs);
      for (int i = 0; i < agents; ++i) {
        const auto s = sample_action(policy[i], rng);
        actions[i] = static_cast<std::uint8_t>(s.action);
        const auto k = buffer.slot(t, i);
        buffer.actions[k] = s.action;
        buffer.log_probs[k] = s.log_prob;
        buffer.values[k] = policy[i].value;
      }
      std::copy(obs.begin(), obs.end(),
                buffer.observations.begin() + static_cast<std::ptrdiff_t>(buffer.slot(t, 0)) * dim);

      grid = apply_actions(grid, actions);
      payoffs = payoff_field(grid, env.game);
      for (int i = 0; i < agents; ++i) {
        const int row = i / grid.side(), col = i % grid.side();
        buffer.rewards[buffer.slot(t, i)] = payoffs[i] + punishment_reward(grid, row, col, env.game);
      }
    }
    {
      const auto obs = observation_matrix(grid, env.local_mean_field);
      const auto policy = evaluate_dedup(params, obs);
      for (int i = 0; i < agents; ++i) buffer.bootstrap_values[i] = policy[i].value;
    }
    buffer.finish(hyper.gamma, hyper.lambda);
    const auto batch = PpoBatch::from_buffer(buffer, hyper.normalize_advantages);
    const auto diag = ppo_update(params, optimizer, batch, hyper);

    record.coop_fraction.push_back(cooperation_fraction(grid));
    record.mean_payoff.push_back(mean_of(payoffs));
    if (wants_snapshot(snapshot_times, it)) record.snapshots.push_back({it, grid, payoffs});
    if (callbacks.on_iteration) callbacks.on_iteration(it, grid, diag);
  }
  return result;
}

}  // namespace spgg
