#pragma once

#include <vector>

#include "spgg/lattice.hpp"

namespace spgg {

struct Snapshot {
  int iteration = 0;
  StrategyGrid grid{StrategyGrid::kMinSide};
  std::vector<double> payoffs;  // base game payoff per cell, row-major
};

// Time series indexed by iteration (or Monte Carlo step): entry 0 is the
// initial lattice, entry t the lattice after t updates.
struct RunRecord {
  std::vector<double> coop_fraction;
  std::vector<double> mean_payoff;
  std::vector<Snapshot> snapshots;

  int iterations() const { return static_cast<int>(coop_fraction.size()) - 1; }

  // Mean f_C over the trailing window_fraction of updates (at least one).
  double final_coop_fraction(double window_fraction = 0.1) const;
  double final_mean_payoff(double window_fraction = 0.1) const;
  // Mean over the last `count` entries (clamped to the recorded updates).
  double trailing_coop_fraction(int count) const;
};

}  // namespace spgg
