#include "amtd/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "amtd/envs.hpp"

namespace amtd {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_size(const std::string& s, std::uint64_t& out) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return false;
  errno = 0;
  out = std::strtoull(s.c_str(), nullptr, 10);
  return errno == 0;
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0" || s == "no" || s == "off") {
    out = false;
    return true;
  }
  return false;
}

bool parse_size_list(const std::string& s, std::vector<std::size_t>& out) {
  out.clear();
  if (trim(s).empty()) return true;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::uint64_t v = 0;
    if (!parse_size(trim(item), v)) return false;
    out.push_back(static_cast<std::size_t>(v));
  }
  return true;
}

std::string format_size_list(const std::vector<std::size_t>& v) {
  std::vector<std::string> parts;
  for (auto x : v) parts.push_back(std::to_string(x));
  return join(parts, ",");
}

struct Field {
  std::function<std::string(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field size_field(T ExperimentConfig::*member) {
  return {[member](ExperimentConfig& c, const std::string& v) -> std::string {
            std::uint64_t x = 0;
            if (!parse_size(v, x)) return "expected a non-negative integer, got '" + v + "'";
            c.*member = static_cast<T>(x);
            return "";
          },
          [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

template <typename T>
Field agent_size_field(T AgentConfig::*member) {
  return {[member](ExperimentConfig& c, const std::string& v) -> std::string {
            std::uint64_t x = 0;
            if (!parse_size(v, x)) return "expected a non-negative integer, got '" + v + "'";
            c.agent_config.*member = static_cast<T>(x);
            return "";
          },
          [member](const ExperimentConfig& c) { return std::to_string(c.agent_config.*member); }};
}

Field agent_double_field(double AgentConfig::*member) {
  return {[member](ExperimentConfig& c, const std::string& v) -> std::string {
            double x = 0.0;
            if (!parse_double(v, x)) return "expected a finite number, got '" + v + "'";
            c.agent_config.*member = x;
            return "";
          },
          [member](const ExperimentConfig& c) { return format_double(c.agent_config.*member); }};
}

Field agent_bool_field(bool AgentConfig::*member) {
  return {[member](ExperimentConfig& c, const std::string& v) -> std::string {
            bool x = false;
            if (!parse_bool(v, x)) return "expected true or false, got '" + v + "'";
            c.agent_config.*member = x;
            return "";
          },
          [member](const ExperimentConfig& c) { return std::string(c.agent_config.*member ? "true" : "false"); }};
}

template <typename F>
std::string catching(F&& f) {
  try {
    f();
    return "";
  } catch (const std::exception& e) {
    return e.what();
  }
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    t["env"] = {[](ExperimentConfig& c, const std::string& v) {
                  c.env = v;
                  return std::string();
                },
                [](const ExperimentConfig& c) { return c.env; }};
    t["agent"] = {[](ExperimentConfig& c, const std::string& v) {
                    c.agent = v;
                    return std::string();
                  },
                  [](const ExperimentConfig& c) { return c.agent; }};
    t["output_dir"] = {[](ExperimentConfig& c, const std::string& v) {
                         c.output_dir = v;
                         return std::string();
                       },
                       [](const ExperimentConfig& c) { return c.output_dir; }};
    t["num_episodes"] = size_field(&ExperimentConfig::num_episodes);
    t["num_steps"] = size_field(&ExperimentConfig::num_steps);
    t["num_trials"] = size_field(&ExperimentConfig::num_trials);
    t["seed"] = size_field(&ExperimentConfig::seed);
    t["eval_interval"] = size_field(&ExperimentConfig::eval_interval);
    t["eval_episodes"] = size_field(&ExperimentConfig::eval_episodes);
    t["smoothing_window"] = size_field(&ExperimentConfig::smoothing_window);
    t["workers"] = size_field(&ExperimentConfig::workers);

    t["gamma"] = agent_double_field(&AgentConfig::gamma);
    t["lookahead"] = agent_size_field(&AgentConfig::lookahead);
    t["beta"] = agent_double_field(&AgentConfig::beta);
    t["lambda_base"] = agent_double_field(&AgentConfig::lambda_base);
    t["actor_lr"] = agent_double_field(&AgentConfig::actor_lr);
    t["critic_lr"] = agent_double_field(&AgentConfig::critic_lr);
    t["classifier_lr"] = agent_double_field(&AgentConfig::classifier_lr);
    t["entropy_coef"] = agent_double_field(&AgentConfig::entropy_coef);
    t["tau"] = agent_double_field(&AgentConfig::tau);
    t["batch_size"] = agent_size_field(&AgentConfig::batch_size);
    t["replay_capacity"] = agent_size_field(&AgentConfig::replay_capacity);
    t["warmup_steps"] = agent_size_field(&AgentConfig::warmup_steps);
    t["exploration_noise"] = agent_double_field(&AgentConfig::exploration_noise);
    t["target_noise"] = agent_double_field(&AgentConfig::target_noise);
    t["target_noise_clip"] = agent_double_field(&AgentConfig::target_noise_clip);
    t["policy_delay"] = agent_size_field(&AgentConfig::policy_delay);
    t["force_gates_on"] = agent_bool_field(&AgentConfig::force_gates_on);
    t["context_features"] = agent_bool_field(&AgentConfig::context_features);
    t["classifier_buffer"] = agent_size_field(&AgentConfig::classifier_buffer);
    t["on_policy"] = agent_bool_field(&AgentConfig::on_policy);
    t["epsilon_start"] = agent_double_field(&AgentConfig::epsilon_start);
    t["epsilon_end"] = agent_double_field(&AgentConfig::epsilon_end);
    t["epsilon_decay_steps"] = agent_size_field(&AgentConfig::epsilon_decay_steps);

    t["hidden"] = {[](ExperimentConfig& c, const std::string& v) -> std::string {
                     if (!parse_size_list(v, c.agent_config.hidden)) return "expected a comma list of sizes";
                     return "";
                   },
                   [](const ExperimentConfig& c) { return format_size_list(c.agent_config.hidden); }};
    t["hidden_activation"] = {[](ExperimentConfig& c, const std::string& v) {
                                return catching([&] { c.agent_config.hidden_activation = activation_from_string(v); });
                              },
                              [](const ExperimentConfig& c) { return to_string(c.agent_config.hidden_activation); }};
    t["optimizer"] = {[](ExperimentConfig& c, const std::string& v) {
                        return catching([&] { c.agent_config.optimizer = optimizer_from_string(v); });
                      },
                      [](const ExperimentConfig& c) { return to_string(c.agent_config.optimizer); }};
    t["policy_gradient"] = {[](ExperimentConfig& c, const std::string& v) {
                              return catching([&] { c.agent_config.policy_gradient = policy_gradient_from_string(v); });
                            },
                            [](const ExperimentConfig& c) { return to_string(c.agent_config.policy_gradient); }};
    t["intervals"] = {[](ExperimentConfig& c, const std::string& v) -> std::string {
                        if (!parse_size_list(v, c.agent_config.schedule.intervals)) {
                          return "expected a comma list of sizes";
                        }
                        return "";
                      },
                      [](const ExperimentConfig& c) { return format_size_list(c.agent_config.schedule.intervals); }};
    t["schedule_mode"] = {[](ExperimentConfig& c, const std::string& v) {
                            return catching([&] { c.agent_config.schedule.mode = schedule_mode_from_string(v); });
                          },
                          [](const ExperimentConfig& c) { return to_string(c.agent_config.schedule.mode); }};
    t["episodes_per_interval"] = {[](ExperimentConfig& c, const std::string& v) -> std::string {
                                    std::uint64_t x = 0;
                                    if (!parse_size(v, x)) return "expected a non-negative integer, got '" + v + "'";
                                    c.agent_config.schedule.episodes_per_interval = static_cast<std::size_t>(x);
                                    return "";
                                  },
                                  [](const ExperimentConfig& c) {
                                    return std::to_string(c.agent_config.schedule.episodes_per_interval);
                                  }};
    return t;
  }();
  return table;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument("invalid configuration:\n  " + join(problems, "\n  ")), problems_(std::move(problems)) {}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : fields()) out.push_back(k);
  return out;
}

std::string set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) return "unknown key '" + key + "'";
  const std::string err = it->second.set(config, value);
  return err.empty() ? err : key + ": " + err;
}

std::string get_config_value(const ExperimentConfig& config, const std::string& key) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError({"unknown key '" + key + "'"});
  return it->second.get(config);
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::vector<std::string> problems;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(number) + ": expected key = value");
      continue;
    }
    const std::string err = set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    if (!err.empty()) problems.push_back("line " + std::to_string(number) + ": " + err);
  }
  if (!problems.empty()) throw ConfigError(problems);
  return base;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file " + path});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(config) + "\n";
  return out;
}

std::vector<std::string> validate(const ExperimentConfig& config) {
  std::vector<std::string> out;
  const auto envs = environment_names();
  const auto agents = agent_names();
  const bool env_ok = std::find(envs.begin(), envs.end(), config.env) != envs.end();
  const bool agent_ok = std::find(agents.begin(), agents.end(), config.agent) != agents.end();
  if (!env_ok) out.push_back("env: unknown environment '" + config.env + "' (choose from " + join(envs, ", ") + ")");
  if (!agent_ok) out.push_back("agent: unknown agent '" + config.agent + "' (choose from " + join(agents, ", ") + ")");
  std::size_t horizon = std::numeric_limits<std::size_t>::max();
  if (env_ok) {
    const auto env = make_environment(config.env);
    horizon = env->horizon();
    if (agent_ok && !agent_supports(config.agent, env->action_space())) {
      out.push_back("agent: " + config.agent + " cannot act in " + config.env);
    }
  }
  for (auto& v : config.agent_config.violations(horizon)) out.push_back(std::move(v));
  if (config.num_episodes == 0 && config.num_steps == 0) out.push_back("num_episodes or num_steps must be positive");
  if (config.num_trials == 0) out.push_back("num_trials must be at least 1");
  if (config.eval_interval > 0 && config.eval_episodes == 0) out.push_back("eval_episodes must be at least 1");
  if (config.smoothing_window == 0) out.push_back("smoothing_window must be at least 1");
  if (config.workers == 0) out.push_back("workers must be at least 1");
  if (config.output_dir.empty()) out.push_back("output_dir must not be empty");
  return out;
}

}  // namespace amtd
