#pragma once

// Text formats. Reals use 6 significant digits, lines end in LF, and files
// are written to a temporary name and renamed into place.

#include <string>
#include <vector>

#include "spgg/experiment.hpp"
#include "spgg/lattice.hpp"
#include "spgg/run_record.hpp"
#include "spgg/stats.hpp"

namespace spgg {

std::string format_real(double x);  // %.6g

std::string format_snapshot(const StrategyGrid& grid);
std::string format_payoff_heatmap(const std::vector<double>& payoffs, int side);
std::string format_timeseries(const RunRecord& record);
std::string format_sweep_csv(const std::vector<SweepRow>& rows);
std::string format_stats_csv(const std::vector<TrialStats>& stats);

std::vector<SweepRow> parse_sweep_csv(const std::string& text);
std::vector<TrialStats> parse_stats_csv(const std::string& text);
StrategyGrid parse_snapshot(const std::string& text);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace spgg
