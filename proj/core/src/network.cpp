#include "spgg/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace spgg {

namespace {

constexpr int kA = NetworkShape::kActions;
constexpr const char* kCheckpointMagic = "spgg-checkpoint";
constexpr int kCheckpointVersion = 1;

}  // namespace

std::size_t NetworkShape::parameter_count() const {
  const auto in = static_cast<std::size_t>(input_dim);
  const auto a = static_cast<std::size_t>(hidden1);
  const auto b = static_cast<std::size_t>(hidden2);
  return a * in + a + b * a + b + kA * b + kA + b + 1;
}

void NetworkShape::validate() const {
  if (input_dim < 1 || hidden1 < 1 || hidden2 < 1) {
    throw std::invalid_argument("network dimensions must be positive");
  }
}

ActorCriticParams::ActorCriticParams(const NetworkShape& shape) : shape_(shape) {
  shape.validate();
  const std::size_t in = shape.input_dim, h1 = shape.hidden1, h2 = shape.hidden2;
  const std::array<std::size_t, 8> sizes = {h1 * in, h1, h2 * h1, h2, kA * h2, kA, h2, 1};
  offsets_[0] = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) offsets_[k + 1] = offsets_[k] + sizes[k];
  values_.assign(offsets_.back(), 0.0);
}

ActorCriticParams ActorCriticParams::glorot(const NetworkShape& shape, std::uint64_t seed) {
  ActorCriticParams p(shape);
  Rng rng(seed);
  auto fill = [&rng](std::span<double> w, int fan_in, int fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& x : w) x = (2.0 * uniform01(rng) - 1.0) * limit;
  };
  fill(p.w1(), shape.input_dim, shape.hidden1);
  fill(p.w2(), shape.hidden1, shape.hidden2);
  fill(p.wa(), shape.hidden2, kA);
  fill(p.wv(), shape.hidden2, 1);
  return p;
}

std::span<double> ActorCriticParams::block(int k) {
  return std::span<double>(values_).subspan(offsets_[k], offsets_[k + 1] - offsets_[k]);
}

std::span<const double> ActorCriticParams::block(int k) const {
  return std::span<const double>(values_).subspan(offsets_[k], offsets_[k + 1] - offsets_[k]);
}

bool ActorCriticParams::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

std::array<double, 2> softmax2(const std::array<double, 2>& logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double z = e0 + e1;
  return {e0 / z, e1 / z};
}

double PolicyOutput::log_prob(int action) const {
  const double m = std::max(logits[0], logits[1]);
  const double lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
  return logits[action] - lse;
}

PolicyOutput ForwardPass::output(int row) const {
  PolicyOutput out;
  out.logits = {logits[2 * row], logits[2 * row + 1]};
  out.probs = softmax2(out.logits);
  out.value = values[row];
  return out;
}

ForwardPass forward(const ActorCriticParams& params, std::span<const double> inputs) {
  const auto& s = params.shape();
  const std::size_t in = s.input_dim, h1 = s.hidden1, h2 = s.hidden2;
  if (inputs.size() % in != 0) {
    throw std::invalid_argument("input batch is not a multiple of the input dimension");
  }
  ForwardPass pass;
  pass.rows = static_cast<int>(inputs.size() / in);
  const std::size_t rows = pass.rows;
  pass.hidden1.resize(rows * h1);
  pass.hidden2.resize(rows * h2);
  pass.logits.resize(rows * kA);
  pass.values.resize(rows);

  const auto w1 = params.w1(), b1 = params.b1(), w2 = params.w2(), b2 = params.b2();
  const auto wa = params.wa(), ba = params.ba(), wv = params.wv();

  for (std::size_t i = 0; i < rows; ++i) {
    const double* x = inputs.data() + i * in;
    double* a1 = pass.hidden1.data() + i * h1;
    for (std::size_t j = 0; j < h1; ++j) {
      double acc = b1[j];
      const double* w = w1.data() + j * in;
      for (std::size_t k = 0; k < in; ++k) acc += w[k] * x[k];
      a1[j] = acc > 0.0 ? acc : 0.0;
    }
    double* a2 = pass.hidden2.data() + i * h2;
    for (std::size_t j = 0; j < h2; ++j) {
      double acc = b2[j];
      const double* w = w2.data() + j * h1;
      for (std::size_t k = 0; k < h1; ++k) acc += w[k] * a1[k];
      a2[j] = acc > 0.0 ? acc : 0.0;
    }
    for (int a = 0; a < kA; ++a) {
      double acc = ba[a];
      const double* w = wa.data() + a * h2;
      for (std::size_t k = 0; k < h2; ++k) acc += w[k] * a2[k];
      pass.logits[i * kA + a] = acc;
    }
    double v = params.bv();
    for (std::size_t k = 0; k < h2; ++k) v += wv[k] * a2[k];
    pass.values[i] = v;
  }
  return pass;
}

std::vector<PolicyOutput> evaluate(const ActorCriticParams& params, std::span<const double> inputs) {
  const auto pass = forward(params, inputs);
  std::vector<PolicyOutput> out(pass.rows);
  for (int i = 0; i < pass.rows; ++i) out[i] = pass.output(i);
  return out;
}

SampledAction sample_action(const PolicyOutput& policy, Rng& rng) {
  const int action = uniform01(rng) < policy.probs[0] ? 0 : 1;
  return {action, policy.log_prob(action)};
}

ActorCriticParams backward(const ActorCriticParams& params, std::span<const double> inputs,
                           const ForwardPass& pass, std::span<const double> grad_logits,
                           std::span<const double> grad_values) {
  const auto& s = params.shape();
  const std::size_t in = s.input_dim, h1 = s.hidden1, h2 = s.hidden2;
  const std::size_t rows = pass.rows;
  if (inputs.size() != rows * in || grad_logits.size() != rows * kA ||
      grad_values.size() != rows) {
    throw std::invalid_argument("backward: batch shapes do not match the forward pass");
  }

  ActorCriticParams g(s);
  auto gw1 = g.w1(), gb1 = g.b1(), gw2 = g.w2(), gb2 = g.b2();
  auto gwa = g.wa(), gba = g.ba(), gwv = g.wv();
  const auto w2 = params.w2(), wa = params.wa(), wv = params.wv();

  std::vector<double> d2(h2), d1(h1);
  double gbv = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double* x = inputs.data() + i * in;
    const double* a1 = pass.hidden1.data() + i * h1;
    const double* a2 = pass.hidden2.data() + i * h2;
    const double* gl = grad_logits.data() + i * kA;
    const double gv = grad_values[i];

    for (int a = 0; a < kA; ++a) {
      gba[a] += gl[a];
      double* row = gwa.data() + a * h2;
      for (std::size_t k = 0; k < h2; ++k) row[k] += gl[a] * a2[k];
    }
    gbv += gv;
    for (std::size_t k = 0; k < h2; ++k) gwv[k] += gv * a2[k];

    for (std::size_t k = 0; k < h2; ++k) {
      double acc = gv * wv[k];
      for (int a = 0; a < kA; ++a) acc += gl[a] * wa[a * h2 + k];
      d2[k] = a2[k] > 0.0 ? acc : 0.0;
    }
    std::fill(d1.begin(), d1.end(), 0.0);
    for (std::size_t j = 0; j < h2; ++j) {
      if (d2[j] == 0.0) continue;
      gb2[j] += d2[j];
      double* grow = gw2.data() + j * h1;
      const double* wrow = w2.data() + j * h1;
      for (std::size_t k = 0; k < h1; ++k) {
        grow[k] += d2[j] * a1[k];
        d1[k] += d2[j] * wrow[k];
      }
    }
    for (std::size_t j = 0; j < h1; ++j) {
      if (!(a1[j] > 0.0) || d1[j] == 0.0) continue;
      gb1[j] += d1[j];
      double* grow = gw1.data() + j * in;
      for (std::size_t k = 0; k < in; ++k) grow[k] += d1[j] * x[k];
    }
  }
  g.bv() = gbv;
  return g;
}

OptimizerState OptimizerState::for_params(const ActorCriticParams& params, const AdamConfig& config) {
  if (!(config.learning_rate > 0.0) || config.decay_interval < 1 || !(config.decay_factor > 0.0)) {
    throw std::invalid_argument("invalid Adam / step-decay configuration");
  }
  OptimizerState st;
  st.config = config;
  st.first_moment.assign(params.values().size(), 0.0);
  st.second_moment.assign(params.values().size(), 0.0);
  return st;
}

double OptimizerState::learning_rate_at(std::int64_t schedule_step) const {
  const auto decays = schedule_step / config.decay_interval;
  return config.learning_rate * std::pow(config.decay_factor, static_cast<double>(decays));
}

void adam_step(OptimizerState& state, ActorCriticParams& params, const ActorCriticParams& grads) {
  auto theta = params.values();
  const auto g = grads.values();
  if (g.size() != theta.size() || state.first_moment.size() != theta.size()) {
    throw std::invalid_argument("adam_step: parameter/gradient shapes differ");
  }
  const auto& c = state.config;
  ++state.adam_steps;
  const double t = static_cast<double>(state.adam_steps);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  const double lr = state.current_learning_rate();
  for (std::size_t k = 0; k < theta.size(); ++k) {
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    m = c.beta1 * m + (1.0 - c.beta1) * g[k];
    v = c.beta2 * v + (1.0 - c.beta2) * g[k] * g[k];
    const double m_hat = m / bc1;
    const double v_hat = v / bc2;
    theta[k] -= lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const auto& s = ckpt.params.shape();
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  out << "shape " << s.input_dim << ' ' << s.hidden1 << ' ' << s.hidden2 << '\n';
  out << "seed " << ckpt.seed << '\n';
  out << "step " << ckpt.step << '\n';
  const auto vals = ckpt.params.values();
  out << "count " << vals.size() << '\n';
  char buf[40];
  for (double v : vals) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  auto expect = [&in](const char* key) {
    std::string word;
    if (!(in >> word) || word != key) {
      throw std::runtime_error(std::string("checkpoint: expected '") + key + "'");
    }
  };
  expect(kCheckpointMagic);
  int version = 0;
  if (!(in >> version) || version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version");
  }
  NetworkShape shape;
  expect("shape");
  in >> shape.input_dim >> shape.hidden1 >> shape.hidden2;
  Checkpoint ckpt;
  expect("seed");
  in >> ckpt.seed;
  expect("step");
  in >> ckpt.step;
  expect("count");
  std::size_t count = 0;
  in >> count;
  if (!in) throw std::runtime_error("checkpoint: malformed header");
  ckpt.params = ActorCriticParams(shape);
  if (count != ckpt.params.values().size()) {
    throw std::runtime_error("checkpoint: parameter count does not match shape");
  }
  std::string token;
  for (auto& v : ckpt.params.values()) {
    if (!(in >> token)) throw std::runtime_error("checkpoint: truncated parameter list");
    v = std::strtod(token.c_str(), nullptr);
  }
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path);
  return read_checkpoint(in);
}

}  // namespace spgg
