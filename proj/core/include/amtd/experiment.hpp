#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "amtd/config.hpp"
#include "amtd/csv.hpp"

namespace amtd {

// Smoothed curve rows for one trial; eval smoothing runs over the evaluated episodes only.
std::vector<CurvePoint> curve_points(std::size_t trial, const LearningCurve& curve, std::size_t window);

struct TrialResult {
  TrialSummary summary;
  std::vector<CurvePoint> curve;
};

// One seeded run (seed = base seed + trial); failures are captured, not thrown.
TrialResult run_trial(const ExperimentConfig& config, std::size_t trial);

struct ExperimentResult {
  std::vector<TrialResult> trials;
  std::optional<SummaryRow> summary;  // absent when every trial failed
  std::filesystem::path output_dir;
};

// AMTD_OUT_DIR, when set, replaces the configured output directory.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

// Validates, runs every trial on a pool of config.workers threads and writes
// curve_trial<i>.csv, trials.csv, summary.csv and config.txt when `write_files` is set.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files = true);

// Re-reads the curves of a finished experiment directory and rewrites its summaries.
SummaryRow summarize_directory(const std::filesystem::path& dir, std::size_t window_override = 0);

}  // namespace amtd
