#include "spgg/lattice.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace spgg {

StrategyGrid::StrategyGrid(int side) : side_(side) {
  if (side < kMinSide) {
    throw std::invalid_argument("lattice side must be >= 3, got " + std::to_string(side));
  }
  cells_.assign(static_cast<std::size_t>(side) * side, 0);
}

StrategyGrid::StrategyGrid(int side, std::vector<std::uint8_t> cells) : StrategyGrid(side) {
  if (cells.size() != cells_.size()) {
    throw std::invalid_argument("cell count does not match side*side");
  }
  for (auto c : cells) {
    if (c > 1) throw std::invalid_argument("strategy cells must be 0 or 1");
  }
  cells_ = std::move(cells);
}

std::size_t StrategyGrid::cooperators() const {
  std::size_t n = 0;
  for (auto c : cells_) n += c;
  return n;
}

void GameParams::validate() const {
  if (!(r > 1.0) || !std::isfinite(r)) {
    throw std::invalid_argument("enhancement factor r must be finite and > 1");
  }
  if (!(p >= 0.0) || !std::isfinite(p)) {
    throw std::invalid_argument("punishment strength p must be finite and >= 0");
  }
}

InitMode InitMode::parse(const std::string& text) {
  if (text == "all-d") return all_defect();
  if (text == "all-c") return all_cooperate();
  if (text == "half") return half_and_half();
  const std::string prefix = "bernoulli";
  if (text.rfind(prefix, 0) == 0) {
    double prob = 0.5;
    if (text.size() > prefix.size()) {
      if (text[prefix.size()] != ':') throw std::invalid_argument("bad init mode: " + text);
      std::size_t used = 0;
      const std::string num = text.substr(prefix.size() + 1);
      try {
        prob = std::stod(num, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad bernoulli probability: " + text);
      }
      if (used != num.size()) throw std::invalid_argument("bad bernoulli probability: " + text);
    }
    if (!(prob >= 0.0 && prob <= 1.0)) {
      throw std::invalid_argument("bernoulli probability must lie in [0,1]");
    }
    return bernoulli(prob);
  }
  throw std::invalid_argument("unknown init mode: " + text);
}

std::string InitMode::to_string() const {
  switch (kind) {
    case Kind::kAllDefect: return "all-d";
    case Kind::kAllCooperate: return "all-c";
    case Kind::kHalfAndHalf: return "half";
    case Kind::kBernoulli: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "bernoulli:%.6g", prob);
      return buf;
    }
  }
  return "?";
}

std::array<Cell, 4> neighbors(const StrategyGrid& grid, int row, int col) {
  const int up = grid.wrap(row - 1);
  const int down = grid.wrap(row + 1);
  const int left = grid.wrap(col - 1);
  const int right = grid.wrap(col + 1);
  return {Cell{up, col}, Cell{down, col}, Cell{row, left}, Cell{row, right}};
}

int coop_neighbors(const StrategyGrid& grid, int row, int col) {
  int n = 0;
  for (const auto& nb : neighbors(grid, row, col)) n += grid.at(nb.row, nb.col);
  return n;
}

double group_payoff(Strategy s, int n_coop, const GameParams& params) {
  if (n_coop < 0 || n_coop > GameParams::kGroups) {
    throw std::invalid_argument("group cooperator count out of range 0..5");
  }
  if (s == Strategy::kCooperate && n_coop < 1) {
    throw std::invalid_argument("a cooperator's group has at least one cooperator");
  }
  const double share = params.r * n_coop / GameParams::kGroups;
  return s == Strategy::kCooperate ? share - 1.0 : share;
}

namespace {

int group_size_coop(const StrategyGrid& grid, int row, int col) {
  return grid.at(row, col) + coop_neighbors(grid, row, col);
}

}  // namespace

double total_payoff(const StrategyGrid& grid, int row, int col, const GameParams& params) {
  const auto s = static_cast<Strategy>(grid.at(row, col));
  double total = group_payoff(s, group_size_coop(grid, row, col), params);
  for (const auto& nb : neighbors(grid, row, col)) {
    total += group_payoff(s, group_size_coop(grid, nb.row, nb.col), params);
  }
  return total;
}

double punishment_reward(const StrategyGrid& grid, int row, int col, const GameParams& params) {
  if (grid.at(row, col) == 1) return 0.0;
  return -params.p * coop_neighbors(grid, row, col);
}

double total_reward(const StrategyGrid& grid, int row, int col, const GameParams& params) {
  return total_payoff(grid, row, col, params) + punishment_reward(grid, row, col, params);
}

Observation observe(const StrategyGrid& grid, int row, int col) {
  const int n = coop_neighbors(grid, row, col);
  Observation obs;
  obs.own_strategy = grid.at(row, col);
  obs.n_coop_neighbors = n;
  obs.global_coop_freq = cooperation_fraction(grid);
  obs.local_mean_field = n / static_cast<double>(GameParams::kDegree);
  return obs;
}

std::vector<double> payoff_field(const StrategyGrid& grid, const GameParams& params) {
  const int L = grid.side();
  std::vector<int> group_coop(grid.size());
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) group_coop[grid.index(i, j)] = group_size_coop(grid, i, j);
  }
  std::vector<double> out(grid.size());
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      const auto s = static_cast<Strategy>(grid.at(i, j));
      double total = group_payoff(s, group_coop[grid.index(i, j)], params);
      for (const auto& nb : neighbors(grid, i, j)) {
        total += group_payoff(s, group_coop[grid.index(nb.row, nb.col)], params);
      }
      out[grid.index(i, j)] = total;
    }
  }
  return out;
}

std::vector<double> reward_field(const StrategyGrid& grid, const GameParams& params) {
  auto out = payoff_field(grid, params);
  const int L = grid.side();
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) out[grid.index(i, j)] += punishment_reward(grid, i, j, params);
  }
  return out;
}

std::vector<Observation> observe_all(const StrategyGrid& grid) {
  const int L = grid.side();
  const double g = cooperation_fraction(grid);
  std::vector<Observation> out(grid.size());
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      const int n = coop_neighbors(grid, i, j);
      auto& o = out[grid.index(i, j)];
      o.own_strategy = grid.at(i, j);
      o.n_coop_neighbors = n;
      o.global_coop_freq = g;
      o.local_mean_field = n / static_cast<double>(GameParams::kDegree);
    }
  }
  return out;
}

StrategyGrid apply_actions(const StrategyGrid& grid, std::span<const std::uint8_t> actions) {
  if (actions.size() != grid.size()) {
    throw std::invalid_argument("action profile size does not match the lattice");
  }
  return StrategyGrid(grid.side(), std::vector<std::uint8_t>(actions.begin(), actions.end()));
}

double cooperation_fraction(const StrategyGrid& grid) {
  return static_cast<double>(grid.cooperators()) / static_cast<double>(grid.size());
}

StrategyGrid init_grid(int side, const InitMode& mode, std::uint64_t seed) {
  StrategyGrid grid(side);
  switch (mode.kind) {
    case InitMode::Kind::kAllDefect:
      break;
    case InitMode::Kind::kAllCooperate:
      for (std::size_t k = 0; k < grid.size(); ++k) grid.set(k, 1);
      break;
    case InitMode::Kind::kHalfAndHalf:
      if (side % 2 != 0) {
        throw std::invalid_argument("half-and-half initialisation needs an even side");
      }
      for (int i = side / 2; i < side; ++i) {
        for (int j = 0; j < side; ++j) grid.set(i, j, Strategy::kCooperate);
      }
      break;
    case InitMode::Kind::kBernoulli: {
      if (!(mode.prob >= 0.0 && mode.prob <= 1.0)) {
        throw std::invalid_argument("bernoulli probability must lie in [0,1]");
      }
      Rng rng(seed);
      for (std::size_t k = 0; k < grid.size(); ++k) grid.set(k, uniform01(rng) < mode.prob);
      break;
    }
  }
  return grid;
}

}  // namespace spgg
