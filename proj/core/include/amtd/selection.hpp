#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "amtd/env.hpp"
#include "amtd/nn.hpp"

namespace amtd {

enum class ScheduleMode { coarse_to_fine, fine_to_coarse, fixed };

std::string to_string(ScheduleMode m);
ScheduleMode schedule_mode_from_string(const std::string& s);

/// Interval sizes K_1..K_M cycled over episodes.
struct ChunkSchedule {
  std::vector<std::size_t> intervals = {1};
  ScheduleMode mode = ScheduleMode::fixed;
  std::size_t episodes_per_interval = 1;

  // Empty when valid, otherwise one message per violated ordering/bound rule.
  std::vector<std::string> violations(std::size_t horizon) const;
};

// K_{episode mod M}
std::size_t current_interval(const ChunkSchedule& schedule, std::size_t episode);

struct SelectionScore {
  std::size_t step_index = 0;
  double value = 0.0;
};

/// Winner of one chunk. `accumulated_reward` is the reward of the segment starting at this
/// step and ending right before the next selected step (or at episode end), discounted to
/// `step_index`; `next_state` is the state that closes the segment.
struct SelectedSample {
  Observation state;
  Action action;
  double accumulated_reward = 0.0;
  std::size_t step_index = 0;
  std::size_t segment_steps = 1;
  Observation next_state;
  bool done = false;
  bool terminal = false;
};

double policy_entropy(std::span<const double> probabilities);

// delta^2 + beta * H(pi(.|s))
SelectionScore score_discrete(double td_error, std::span<const double> policy_probabilities, double beta,
                              std::size_t step_index);
// delta^2 + beta * ||grad_theta log pi(a|s)||^2
SelectionScore score_continuous(double td_error, double log_policy_grad_norm_sq, double beta,
                                std::size_t step_index);

/// Squared norm of d/dtheta log N(a; mu_theta(s), diag(sigma^2)) for a tanh actor whose
/// output y maps to mu = center + half_range * y.
double gaussian_log_policy_grad_norm_sq(const Network& actor, const Observation& state, const Vector& action,
                                        const Vector& center, const Vector& half_range, const Vector& sigma);
double gaussian_log_density(const Network& actor, const Observation& state, const Vector& action,
                            const Vector& center, const Vector& half_range, const Vector& sigma);

// Index (into `scores`) of the maximum, earliest on ties.
std::size_t select_in_chunk(std::span<const SelectionScore> scores);

/// Online chunked selection over one episode: feed every transition with its score, then
/// `finish` emits one sample per chunk, the last one absorbing the episode ending.
class ChunkSelector {
 public:
  ChunkSelector(std::size_t interval, double gamma);

  void observe(const Transition& transition, double score);
  std::vector<SelectedSample> finish();

  std::size_t interval() const { return interval_; }
  std::size_t steps_seen() const { return rewards_.size(); }

 private:
  void close_chunk();

  std::size_t interval_;
  double gamma_;
  std::vector<double> rewards_;
  std::vector<Transition> winners_;
  Transition best_;
  double best_score_ = 0.0;
  std::size_t in_chunk_ = 0;
  Observation final_state_;
  bool final_terminal_ = false;
};

}  // namespace amtd
