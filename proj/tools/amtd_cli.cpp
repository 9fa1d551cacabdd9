#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "amtd/checks.hpp"
#include "amtd/config.hpp"
#include "amtd/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> env;
  std::optional<std::string> agent;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "key = value experiment file");
  app->add_option("--env", f.env, "environment name");
  app->add_option("--agent", f.agent, "agent name");
  app->add_option("--seed", f.seed, "base seed; trial i uses seed + i");
  app->add_option("--trials", f.trials, "number of trials");
  app->add_option("--out", f.out, "output directory");
  app->allow_extras();
  app->footer("Any config key can be overridden with --key=value.");
}

amtd::ExperimentConfig build_config(const CommonFlags& f, const std::vector<std::string>& extras) {
  amtd::ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = amtd::load_config(f.config_path);
  std::vector<std::string> problems;
  for (const auto& arg : extras) {
    const auto eq = arg.find('=');
    if (arg.rfind("--", 0) != 0 || eq == std::string::npos) {
      problems.push_back("unrecognized argument '" + arg + "' (overrides take the form --key=value)");
      continue;
    }
    const std::string err = amtd::set_config_value(cfg, arg.substr(2, eq - 2), arg.substr(eq + 1));
    if (!err.empty()) problems.push_back(err);
  }
  if (f.env) cfg.env = *f.env;
  if (f.agent) cfg.agent = *f.agent;
  if (f.seed) cfg.seed = *f.seed;
  if (f.trials) cfg.num_trials = *f.trials;
  if (f.out) cfg.output_dir = *f.out;
  if (!problems.empty()) throw amtd::ConfigError(problems);
  return cfg;
}

void print_summary(const amtd::ExperimentResult& r) {
  for (const auto& t : r.trials) {
    if (t.summary.ok) {
      std::printf("trial %zu seed %llu: max smoothed return %.4f", t.summary.trial,
                  static_cast<unsigned long long>(t.summary.seed), t.summary.max_smoothed_return);
      if (t.summary.max_smoothed_eval_return) std::printf(", max smoothed eval %.4f", *t.summary.max_smoothed_eval_return);
      std::printf("\n");
    } else {
      std::printf("trial %zu seed %llu: FAILED: %s\n", t.summary.trial,
                  static_cast<unsigned long long>(t.summary.seed), t.summary.error.c_str());
    }
  }
  if (r.summary) {
    std::printf("%s on %s: %.4f +- %.4f over %zu trials", r.summary->agent.c_str(), r.summary->env.c_str(),
                r.summary->max_smoothed_return.mean, r.summary->max_smoothed_return.stddev, r.summary->trials_ok);
    if (r.summary->max_smoothed_eval_return) {
      std::printf(" (eval %.4f +- %.4f)", r.summary->max_smoothed_eval_return->mean,
                  r.summary->max_smoothed_eval_return->stddev);
    }
    std::printf("\n");
  }
  if (!r.output_dir.empty()) std::printf("wrote %s\n", r.output_dir.string().c_str());
}

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active multi-step TD experiments"};
  app.require_subcommand(1);

  CommonFlags train_flags;
  auto* train = app.add_subcommand("train", "run seeded trials of one agent on one environment");
  add_common(train, train_flags);

  CommonFlags sweep_flags;
  std::string sweep_param;
  std::string sweep_values;
  auto* sweep = app.add_subcommand("sweep", "repeat train over values of one config key");
  add_common(sweep, sweep_flags);
  sweep->add_option("--param", sweep_param, "config key to vary")->required();
  sweep->add_option("--values", sweep_values, "values separated by ';'")->required();

  std::string summarize_dir;
  std::size_t summarize_window = 0;
  auto* summarize = app.add_subcommand("summarize", "recompute summaries from curve CSVs");
  summarize->add_option("--in", summarize_dir, "experiment output directory")->required();
  summarize->add_option("--window", summarize_window, "re-smooth with this window");

  std::string suite = "all";
  std::uint64_t check_seed = 0;
  auto* check = app.add_subcommand("check", "run the built-in oracle and property checks");
  check->add_option("--suite", suite, "gradients, returns, variance, selection, environments or all");
  check->add_option("--seed", check_seed, "seed for the randomized checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      const auto cfg = build_config(train_flags, train->remaining());
      const auto result = amtd::run_experiment(cfg);
      print_summary(result);
      return result.summary ? 0 : 1;
    }
    if (sweep->parsed()) {
      const auto base = build_config(sweep_flags, sweep->remaining());
      const auto root = amtd::resolve_output_dir(base);
      std::vector<amtd::SummaryRow> rows;
      int status = 0;
      for (const auto& value : split_values(sweep_values)) {
        auto cfg = base;
        const std::string err = amtd::set_config_value(cfg, sweep_param, value);
        if (!err.empty()) throw amtd::ConfigError({err});
        cfg.output_dir = (root / (sweep_param + "=" + value)).string();
        std::printf("== %s = %s\n", sweep_param.c_str(), value.c_str());
        const auto result = amtd::run_experiment(cfg);
        print_summary(result);
        if (result.summary) {
          auto row = *result.summary;
          row.agent += " " + sweep_param + "=" + value;
          rows.push_back(row);
        } else {
          status = 1;
        }
      }
      std::filesystem::create_directories(root);
      amtd::write_summary_csv((root / "sweep_summary.csv").string(), rows);
      return status;
    }
    if (summarize->parsed()) {
      const auto row = amtd::summarize_directory(summarize_dir, summarize_window);
      std::printf("%s on %s: %.4f +- %.4f over %zu trials\n", row.agent.c_str(), row.env.c_str(),
                  row.max_smoothed_return.mean, row.max_smoothed_return.stddev, row.trials_ok);
      return 0;
    }
    if (check->parsed()) {
      bool ok = true;
      for (const auto& r : amtd::run_checks(suite, check_seed)) {
        std::printf("[%s] %s/%s: %s\n", r.passed ? "PASS" : "FAIL", r.suite.c_str(), r.name.c_str(), r.detail.c_str());
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const amtd::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
