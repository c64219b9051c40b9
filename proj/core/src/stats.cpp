#include "spgg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace spgg {

double student_t_975(int dof) {
  if (dof < 1) throw std::invalid_argument("Student-t quantile needs dof >= 1");
  return boost::math::quantile(boost::math::students_t(static_cast<double>(dof)), 0.975);
}

TrialStats summarize(std::span<const double> samples, double axis_value,
                     bool clamp_to_unit_interval) {
  if (samples.empty()) throw std::invalid_argument("summarize: no samples");
  std::vector<double> xs(samples.begin(), samples.end());
  for (double x : xs) {
    if (!std::isfinite(x)) throw std::invalid_argument("summarize: non-finite sample");
  }
  std::sort(xs.begin(), xs.end());

  TrialStats st;
  st.axis_value = axis_value;
  st.n = xs.size();
  if (xs.front() == xs.back()) {
    st.mean = xs.front();
    st.degenerate = true;
    st.ci_lo = st.ci_hi = st.ci_lo_raw = st.ci_hi_raw = st.mean;
    return st;
  }

  double sum = 0.0;
  for (double x : xs) sum += x;
  st.mean = sum / static_cast<double>(st.n);
  double ss = 0.0;
  for (double x : xs) ss += (x - st.mean) * (x - st.mean);
  st.std = std::sqrt(ss / static_cast<double>(st.n - 1));

  const double half = student_t_975(static_cast<int>(st.n) - 1) * st.std /
                      std::sqrt(static_cast<double>(st.n));
  st.ci_lo_raw = st.mean - half;
  st.ci_hi_raw = st.mean + half;
  st.ci_lo = st.ci_lo_raw;
  st.ci_hi = st.ci_hi_raw;
  if (clamp_to_unit_interval && (st.ci_lo < 0.0 || st.ci_hi > 1.0)) {
    st.ci_lo = std::max(0.0, st.ci_lo);
    st.ci_hi = std::min(1.0, st.ci_hi);
    st.clamped = true;
  }
  return st;
}

ThresholdEstimate threshold_estimate(std::span<const TrialStats> rows, double level) {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (!(rows[k - 1].axis_value < rows[k].axis_value)) {
      throw std::invalid_argument("threshold_estimate: axis values must be strictly ascending");
    }
  }
  ThresholdEstimate est;
  for (const auto& row : rows) {
    if (!est.value) {
      if (row.mean >= level) est.value = row.axis_value;
    } else if (row.mean < level) {
      est.non_monotone = true;
    }
  }
  return est;
}

}  // namespace spgg
