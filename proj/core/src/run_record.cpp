#include "spgg/run_record.hpp"

#include <algorithm>
#include <cmath>

namespace spgg {

namespace {

double trailing_mean(const std::vector<double>& series, int count) {
  if (series.empty()) return 0.0;
  const int updates = static_cast<int>(series.size()) - 1;
  if (updates == 0) return series.front();
  count = std::clamp(count, 1, updates);
  double sum = 0.0;
  for (std::size_t k = series.size() - count; k < series.size(); ++k) sum += series[k];
  return sum / count;
}

int window_length(int updates, double window_fraction) {
  return std::max(1, static_cast<int>(std::lround(window_fraction * updates)));
}

}  // namespace

double RunRecord::final_coop_fraction(double window_fraction) const {
  return trailing_mean(coop_fraction, window_length(iterations(), window_fraction));
}

double RunRecord::final_mean_payoff(double window_fraction) const {
  return trailing_mean(mean_payoff, window_length(iterations(), window_fraction));
}

double RunRecord::trailing_coop_fraction(int count) const {
  return trailing_mean(coop_fraction, count);
}

}  // namespace spgg
