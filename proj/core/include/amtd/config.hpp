#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "amtd/agent.hpp"

namespace amtd {

struct ExperimentConfig {
  std::string env = "cliff_walking";
  std::string agent = "active";
  AgentConfig agent_config;
  std::size_t num_episodes = 600;
  std::size_t num_steps = 0;  // 0: episode budget only
  std::size_t num_trials = 5;
  std::uint64_t seed = 0;
  std::size_t eval_interval = 1;
  std::size_t eval_episodes = 5;
  std::size_t smoothing_window = 10;
  std::string output_dir = "results";
  std::size_t workers = 1;
};

/// Carries every problem found while parsing or validating a configuration.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

std::vector<std::string> config_keys();

// Sets one key; returns an error message, empty on success.
std::string set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);
std::string get_config_value(const ExperimentConfig& config, const std::string& key);

// "key = value" lines, '#' starts a comment. Throws ConfigError listing every bad line.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path);
std::string serialize(const ExperimentConfig& config);

// Empty when the configuration is runnable.
std::vector<std::string> validate(const ExperimentConfig& config);

}  // namespace amtd
