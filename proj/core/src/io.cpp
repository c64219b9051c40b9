#include "spgg/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace spgg {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", x == 0.0 ? 0.0 : x);  // no "-0"
  return buf;
}

std::string format_snapshot(const StrategyGrid& grid) {
  std::string out;
  const int L = grid.side();
  out.reserve(grid.size() * 2);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      if (j) out += ' ';
      out += grid.at(i, j) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

std::string format_payoff_heatmap(const std::vector<double>& payoffs, int side) {
  if (payoffs.size() != static_cast<std::size_t>(side) * side) {
    throw std::invalid_argument("payoff field size does not match side*side");
  }
  std::string out;
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      if (j) out += ',';
      out += format_real(payoffs[static_cast<std::size_t>(i) * side + j]);
    }
    out += '\n';
  }
  return out;
}

std::string format_timeseries(const RunRecord& record) {
  std::string out = "iter,f_C,mean_payoff\n";
  for (std::size_t t = 0; t < record.coop_fraction.size(); ++t) {
    out += std::to_string(t) + ',' + format_real(record.coop_fraction[t]) + ',' +
           format_real(record.mean_payoff[t]) + '\n';
  }
  return out;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "axis_value,trial,seed,final_f_C,mean_final_payoff\n";
  for (const auto& row : rows) {
    out += format_real(row.axis_value) + ',' + std::to_string(row.trial) + ',' +
           std::to_string(row.seed) + ',' +
           (row.failed ? std::string("nan") : format_real(row.final_coop_fraction)) + ',' +
           (row.failed ? std::string("nan") : format_real(row.final_mean_payoff)) + '\n';
  }
  return out;
}

std::string format_stats_csv(const std::vector<TrialStats>& stats) {
  std::string out = "axis_value,mean,std,ci_lo,ci_hi,degenerate\n";
  for (const auto& s : stats) {
    out += format_real(s.axis_value) + ',' + format_real(s.mean) + ',' + format_real(s.std) + ',' +
           format_real(s.ci_lo) + ',' + format_real(s.ci_hi) + ',' + (s.degenerate ? "1" : "0") +
           '\n';
  }
  return out;
}

namespace {

std::vector<std::vector<std::string>> split_csv(const std::string& text,
                                                const std::string& expected_header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) {
    throw std::invalid_argument("unexpected CSV header '" + line + "', want '" + expected_header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    rows.push_back(std::move(fields));
  }
  return rows;
}

double parse_real(const std::string& s) {
  if (s == "nan") return std::nan("");
  std::size_t used = 0;
  const double x = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number in CSV: " + s);
  return x;
}

}  // namespace

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::vector<SweepRow> out;
  for (const auto& f : split_csv(text, "axis_value,trial,seed,final_f_C,mean_final_payoff")) {
    if (f.size() != 5) throw std::invalid_argument("sweep.csv row needs 5 fields");
    SweepRow row;
    row.axis_value = parse_real(f[0]);
    row.trial = std::stoi(f[1]);
    row.seed = std::stoull(f[2]);
    row.final_coop_fraction = parse_real(f[3]);
    row.final_mean_payoff = parse_real(f[4]);
    row.failed = std::isnan(row.final_coop_fraction);
    out.push_back(row);
  }
  return out;
}

std::vector<TrialStats> parse_stats_csv(const std::string& text) {
  std::vector<TrialStats> out;
  for (const auto& f : split_csv(text, "axis_value,mean,std,ci_lo,ci_hi,degenerate")) {
    if (f.size() != 6) throw std::invalid_argument("stats.csv row needs 6 fields");
    TrialStats s;
    s.axis_value = parse_real(f[0]);
    s.mean = parse_real(f[1]);
    s.std = parse_real(f[2]);
    s.ci_lo = s.ci_lo_raw = parse_real(f[3]);
    s.ci_hi = s.ci_hi_raw = parse_real(f[4]);
    s.degenerate = f[5] == "1";
    out.push_back(s);
  }
  return out;
}

StrategyGrid parse_snapshot(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::uint8_t> cells;
  int rows = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int v = 0;
    std::size_t count = 0;
    while (ls >> v) {
      if (v != 0 && v != 1) throw std::invalid_argument("snapshot cells must be 0 or 1");
      cells.push_back(static_cast<std::uint8_t>(v));
      ++count;
    }
    if (rows == 0) width = count;
    if (count != width) throw std::invalid_argument("ragged snapshot rows");
    ++rows;
  }
  if (static_cast<std::size_t>(rows) != width) throw std::invalid_argument("snapshot is not square");
  return StrategyGrid(rows, std::move(cells));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace spgg
