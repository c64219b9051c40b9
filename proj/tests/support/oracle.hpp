#pragma once

// Independent reference implementations used only by tests. Written the slow,
// obvious way on purpose: no shared code with the library beyond the grid type.

#include <cmath>
#include <vector>

#include "spgg/lattice.hpp"

namespace oracle {

inline int wrap(int x, int L) { return ((x % L) + L) % L; }

// Members of the group centred on (r, c): the centre first, then 4 neighbours.
inline std::vector<std::pair<int, int>> group_members(int r, int c, int L) {
  return {{r, c},
          {wrap(r - 1, L), c},
          {wrap(r + 1, L), c},
          {r, wrap(c - 1, L)},
          {r, wrap(c + 1, L)}};
}

// Enumerates the five groups containing (r, c) and sums the member payoff
// r*N_C/5 - s from each.
inline double total_payoff(const spgg::StrategyGrid& g, int row, int col, double r) {
  const int L = g.side();
  double total = 0.0;
  for (const auto& [cr, cc] : group_members(row, col, L)) {
    int nc = 0;
    for (const auto& [mr, mc] : group_members(cr, cc, L)) nc += g.at(mr, mc);
    total += r * nc / 5.0 - g.at(row, col);
  }
  return total;
}

// Direct double sum: A_t = sum_{l=0}^{H-t-1} (gamma lambda)^l delta_{t+l}.
inline std::vector<double> gae(const std::vector<double>& rewards, const std::vector<double>& values,
                               double gamma, double lambda) {
  const std::size_t H = rewards.size();
  std::vector<double> out(H, 0.0);
  for (std::size_t t = 0; t < H; ++t) {
    for (std::size_t l = 0; t + l < H; ++l) {
      const std::size_t u = t + l;
      const double delta = rewards[u] + gamma * values[u + 1] - values[u];
      out[t] += std::pow(gamma * lambda, static_cast<double>(l)) * delta;
    }
  }
  return out;
}

}  // namespace oracle
