#include "amtd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "amtd/envs.hpp"
#include "amtd/errors.hpp"

namespace amtd {

namespace fs = std::filesystem;

std::vector<CurvePoint> curve_points(std::size_t trial, const LearningCurve& curve, std::size_t window) {
  std::vector<double> raw;
  std::vector<double> evals;
  for (const auto& r : curve) {
    raw.push_back(r.train_return);
    if (r.eval_return) evals.push_back(*r.eval_return);
  }
  const auto smoothed = smooth(raw, window);
  const auto smoothed_eval = smooth(evals, window);
  std::vector<CurvePoint> out(curve.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CurvePoint& p = out[i];
    p.trial = trial;
    p.episode = curve[i].episode;
    p.step = curve[i].total_steps;
    p.raw_return = curve[i].train_return;
    p.smoothed_return = smoothed[i];
    if (curve[i].eval_return) {
      p.eval_return = curve[i].eval_return;
      p.smoothed_eval_return = smoothed_eval[k++];
    }
  }
  return out;
}

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial) {
  TrialResult r;
  const std::uint64_t seed = config.seed + trial;
  r.summary.trial = trial;
  r.summary.seed = seed;
  try {
    EnvironmentPtr env = make_environment(config.env);
    AgentPtr agent = make_agent(config.agent, *env, config.agent_config, seed);
    TrainOptions options;
    options.num_episodes = config.num_episodes > 0 ? config.num_episodes : std::numeric_limits<std::size_t>::max();
    options.max_env_steps = config.num_steps;
    options.eval_interval = config.eval_interval;
    options.eval_episodes = config.eval_episodes;
    const LearningCurve curve = train(*agent, *env, options, seed);
    r.curve = curve_points(trial, curve, config.smoothing_window);
    r.summary = summarize_trial(trial, seed, r.curve);
  } catch (const std::exception& e) {
    r.summary.ok = false;
    r.summary.error = e.what();
  }
  return r;
}

fs::path resolve_output_dir(const ExperimentConfig& config) {
  if (const char* env = std::getenv("AMTD_OUT_DIR"); env != nullptr && *env != '\0') return fs::path(env);
  return fs::path(config.output_dir);
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files) {
  const auto problems = validate(config);
  if (!problems.empty()) throw ConfigError(problems);

  ExperimentResult result;
  result.trials.resize(config.num_trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < config.num_trials; t = next++) result.trials[t] = run_trial(config, t);
  };
  const std::size_t threads = std::min(config.workers, config.num_trials);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<TrialSummary> summaries;
  for (const auto& t : result.trials) summaries.push_back(t.summary);
  const bool any_ok = std::any_of(summaries.begin(), summaries.end(), [](const TrialSummary& s) { return s.ok; });
  if (any_ok) result.summary = summarize(config.agent, config.env, summaries);

  if (write_files) {
    result.output_dir = resolve_output_dir(config);
    fs::create_directories(result.output_dir);
    for (const auto& t : result.trials) {
      if (!t.summary.ok) continue;
      write_curve_csv((result.output_dir / ("curve_trial" + std::to_string(t.summary.trial) + ".csv")).string(),
                      t.curve);
    }
    write_trials_csv((result.output_dir / "trials.csv").string(), config.agent, config.env, summaries);
    if (result.summary) {
      const std::vector<SummaryRow> rows{*result.summary};
      write_summary_csv((result.output_dir / "summary.csv").string(), rows);
    }
    std::ofstream(result.output_dir / "config.txt") << serialize(config);
  }
  return result;
}

SummaryRow summarize_directory(const fs::path& dir, std::size_t window_override) {
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir.string());
  ExperimentConfig config;
  const fs::path config_path = dir / "config.txt";
  if (fs::exists(config_path)) config = load_config(config_path.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("curve_trial", 0) == 0 && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("no curve_trial*.csv files in " + dir.string());
  std::vector<TrialSummary> summaries;
  for (const auto& f : files) {
    auto curve = read_curve_csv(f.string());
    if (curve.empty()) continue;
    if (window_override > 0) {
      std::vector<double> raw;
      std::vector<double> evals;
      for (const auto& p : curve) {
        raw.push_back(p.raw_return);
        if (p.eval_return) evals.push_back(*p.eval_return);
      }
      const auto s = smooth(raw, window_override);
      const auto se = smooth(evals, window_override);
      std::size_t k = 0;
      for (std::size_t i = 0; i < curve.size(); ++i) {
        curve[i].smoothed_return = s[i];
        if (curve[i].eval_return) curve[i].smoothed_eval_return = se[k++];
      }
    }
    const std::size_t trial = curve.front().trial;
    summaries.push_back(summarize_trial(trial, config.seed + trial, curve));
  }
  std::sort(summaries.begin(), summaries.end(),
            [](const TrialSummary& a, const TrialSummary& b) { return a.trial < b.trial; });
  SummaryRow row = summarize(config.agent, config.env, summaries);
  const std::vector<SummaryRow> rows{row};
  write_summary_csv((dir / "summary.csv").string(), rows);
  return row;
}

}  // namespace amtd
