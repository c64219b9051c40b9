#pragma once

// Trial statistics: mean, sample standard deviation and a two-sided 95%
// Student-t confidence interval, with the zero-variance ("consensus") case
// reported as degenerate rather than as an interval.

#include <optional>
#include <span>
#include <vector>

namespace spgg {

// t_{0.975, dof}; dof >= 1.
double student_t_975(int dof);

struct TrialStats {
  double axis_value = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // n-1 denominator; 0 when n == 1
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double ci_lo_raw = 0.0;
  double ci_hi_raw = 0.0;
  bool degenerate = false;  // zero sample variance: CI collapses to [mean, mean]
  bool clamped = false;     // raw bounds left [0,1] and were clamped
};

// Permutation-invariant (samples are summed in sorted order). Throws
// std::invalid_argument on empty input or non-finite samples.
TrialStats summarize(std::span<const double> samples, double axis_value = 0.0,
                     bool clamp_to_unit_interval = true);

struct ThresholdEstimate {
  std::optional<double> value;  // smallest axis value whose mean reaches the level
  bool non_monotone = false;    // some later value falls back below the level
};

// rows must be sorted by axis_value ascending.
ThresholdEstimate threshold_estimate(std::span<const TrialStats> rows, double level = 0.99);

}  // namespace spgg
