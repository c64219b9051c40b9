#pragma once

// Spatial public goods game on a periodic L x L von Neumann lattice.
//
// Every agent plays in G = 5 overlapping groups: the one centred on itself and
// the four centred on its neighbours. Strategy encoding is 0 = defect,
// 1 = cooperate throughout.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spgg/random.hpp"

namespace spgg {

enum class Strategy : std::uint8_t { kDefect = 0, kCooperate = 1 };

struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

class StrategyGrid {
 public:
  static constexpr int kMinSide = 3;

  // All-defect grid. Throws std::invalid_argument for side < 3.
  explicit StrategyGrid(int side);
  // Throws if cells.size() != side*side or any cell is not 0/1.
  StrategyGrid(int side, std::vector<std::uint8_t> cells);

  int side() const { return side_; }
  std::size_t size() const { return cells_.size(); }

  std::uint8_t at(int row, int col) const { return cells_[index(row, col)]; }
  std::uint8_t at(std::size_t idx) const { return cells_[idx]; }
  void set(int row, int col, Strategy s) {
    cells_[index(row, col)] = static_cast<std::uint8_t>(s);
  }
  void set(std::size_t idx, std::uint8_t s) { cells_[idx] = s ? 1 : 0; }

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(wrap(row)) * side_ + wrap(col);
  }
  int wrap(int x) const { return ((x % side_) + side_) % side_; }

  std::span<const std::uint8_t> cells() const { return cells_; }
  std::size_t cooperators() const;

  friend bool operator==(const StrategyGrid&, const StrategyGrid&) = default;

 private:
  int side_;
  std::vector<std::uint8_t> cells_;
};

struct GameParams {
  static constexpr int kGroups = 5;
  static constexpr int kDegree = 4;

  double r = 4.5;  // enhancement factor, > 1
  double p = 0.0;  // punishment strength, >= 0

  void validate() const;
};

struct Observation {
  double own_strategy = 0.0;
  double n_coop_neighbors = 0.0;
  double global_coop_freq = 0.0;
  double local_mean_field = 0.0;

  std::array<double, 4> features() const {
    return {own_strategy, n_coop_neighbors, global_coop_freq, local_mean_field};
  }
};

struct InitMode {
  enum class Kind { kAllDefect, kAllCooperate, kBernoulli, kHalfAndHalf };
  Kind kind = Kind::kAllDefect;
  double prob = 0.5;  // Bernoulli only

  static InitMode all_defect() { return {Kind::kAllDefect, 0.0}; }
  static InitMode all_cooperate() { return {Kind::kAllCooperate, 0.0}; }
  static InitMode bernoulli(double prob) { return {Kind::kBernoulli, prob}; }
  static InitMode half_and_half() { return {Kind::kHalfAndHalf, 0.0}; }

  // Accepts "all-d", "all-c", "half", "bernoulli:P".
  static InitMode parse(const std::string& text);
  std::string to_string() const;
};

// Order is fixed: up, down, left, right.
std::array<Cell, 4> neighbors(const StrategyGrid& grid, int row, int col);

int coop_neighbors(const StrategyGrid& grid, int row, int col);

// Payoff of one member from one group with n_coop cooperators (the focal
// cooperator counts itself). Throws std::invalid_argument on an impossible
// group composition.
double group_payoff(Strategy s, int n_coop, const GameParams& params);

double total_payoff(const StrategyGrid& grid, int row, int col, const GameParams& params);
double punishment_reward(const StrategyGrid& grid, int row, int col, const GameParams& params);
double total_reward(const StrategyGrid& grid, int row, int col, const GameParams& params);

Observation observe(const StrategyGrid& grid, int row, int col);

// Whole-lattice versions, row-major. Agree exactly with the per-cell calls.
std::vector<double> payoff_field(const StrategyGrid& grid, const GameParams& params);
std::vector<double> reward_field(const StrategyGrid& grid, const GameParams& params);
std::vector<Observation> observe_all(const StrategyGrid& grid);

// Synchronous update: the new grid is the action profile. Throws on a
// size mismatch or a non-binary action.
StrategyGrid apply_actions(const StrategyGrid& grid, std::span<const std::uint8_t> actions);

double cooperation_fraction(const StrategyGrid& grid);

// Deterministic in (side, mode, seed). HalfAndHalf needs an even side.
StrategyGrid init_grid(int side, const InitMode& mode, std::uint64_t seed);

}  // namespace spgg
