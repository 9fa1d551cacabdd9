#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace amtd {

struct CurvePoint {
  std::size_t trial = 0;
  std::size_t episode = 0;
  std::size_t step = 0;  // environment steps so far
  double raw_return = 0.0;
  double smoothed_return = 0.0;
  std::optional<double> eval_return;
  std::optional<double> smoothed_eval_return;
};

// Trailing moving average; the first points average over what is available.
std::vector<double> smooth(std::span<const double> values, std::size_t window);

void write_curve_csv(const std::string& path, std::span<const CurvePoint> points);
std::vector<CurvePoint> read_curve_csv(const std::string& path);

struct TrialSummary {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double max_smoothed_return = 0.0;
  std::optional<double> max_smoothed_eval_return;
  double final_smoothed_return = 0.0;
  std::optional<double> final_smoothed_eval_return;
  std::size_t episodes = 0;
  std::size_t steps = 0;
};

TrialSummary summarize_trial(std::size_t trial, std::uint64_t seed, std::span<const CurvePoint> curve);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // n - 1 denominator, 0 for a single value
  std::size_t count = 0;
};

MeanStd mean_std(std::span<const double> values);

struct SummaryRow {
  std::string agent;
  std::string env;
  std::size_t trials_ok = 0;
  std::size_t trials_failed = 0;
  MeanStd max_smoothed_return;
  std::optional<MeanStd> max_smoothed_eval_return;
};

// Mean and deviation over successful trials; throws UsageError when none succeeded.
SummaryRow summarize(const std::string& agent, const std::string& env, std::span<const TrialSummary> trials);

void write_trials_csv(const std::string& path, const std::string& agent, const std::string& env,
                      std::span<const TrialSummary> trials);
void write_summary_csv(const std::string& path, std::span<const SummaryRow> rows);

std::string format_number(double v);

}  // namespace amtd
