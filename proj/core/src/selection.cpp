#include "amtd/selection.hpp"

#include <cmath>

#include "amtd/errors.hpp"

namespace amtd {

std::string to_string(ScheduleMode m) {
  switch (m) {
    case ScheduleMode::coarse_to_fine: return "coarse_to_fine";
    case ScheduleMode::fine_to_coarse: return "fine_to_coarse";
    case ScheduleMode::fixed: return "fixed";
  }
  return "fixed";
}

ScheduleMode schedule_mode_from_string(const std::string& s) {
  if (s == "coarse_to_fine") return ScheduleMode::coarse_to_fine;
  if (s == "fine_to_coarse") return ScheduleMode::fine_to_coarse;
  if (s == "fixed") return ScheduleMode::fixed;
  throw UsageError("unknown schedule mode '" + s + "'");
}

std::vector<std::string> ChunkSchedule::violations(std::size_t horizon) const {
  std::vector<std::string> out;
  if (intervals.empty()) {
    out.push_back("schedule needs at least one interval");
    return out;
  }
  if (episodes_per_interval == 0) out.push_back("episodes_per_interval must be positive");
  for (std::size_t k : intervals) {
    if (k < 1 || k > horizon) out.push_back("interval " + std::to_string(k) + " outside [1, horizon]");
  }
  const std::size_t m = intervals.size();
  switch (mode) {
    case ScheduleMode::coarse_to_fine:
      for (std::size_t i = 1; i < m; ++i) {
        if (intervals[i] > intervals[i - 1]) out.push_back("coarse_to_fine intervals must be non-increasing");
      }
      if (intervals.back() != 1) out.push_back("coarse_to_fine must end at interval 1");
      if (intervals.front() >= horizon) out.push_back("coarse_to_fine first interval must be below the horizon");
      break;
    case ScheduleMode::fine_to_coarse:
      for (std::size_t i = 1; i < m; ++i) {
        if (intervals[i] < intervals[i - 1]) out.push_back("fine_to_coarse intervals must be non-decreasing");
      }
      if (intervals.back() >= horizon) out.push_back("fine_to_coarse last interval must be below the horizon");
      break;
    case ScheduleMode::fixed:
      for (std::size_t k : intervals) {
        if (k != intervals.front()) out.push_back("fixed schedule intervals must all be equal");
      }
      break;
  }
  return out;
}

std::size_t current_interval(const ChunkSchedule& schedule, std::size_t episode) {
  if (schedule.intervals.empty()) throw UsageError("empty chunk schedule");
  const std::size_t block = std::max<std::size_t>(schedule.episodes_per_interval, 1);
  return schedule.intervals[(episode / block) % schedule.intervals.size()];
}

double policy_entropy(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

SelectionScore score_discrete(double td_error, std::span<const double> policy_probabilities, double beta,
                              std::size_t step_index) {
  const double h = beta == 0.0 ? 0.0 : policy_entropy(policy_probabilities);
  return {step_index, td_error * td_error + beta * h};
}

SelectionScore score_continuous(double td_error, double log_policy_grad_norm_sq, double beta,
                                std::size_t step_index) {
  return {step_index, td_error * td_error + beta * log_policy_grad_norm_sq};
}

double gaussian_log_density(const Network& actor, const Observation& state, const Vector& action,
                            const Vector& center, const Vector& half_range, const Vector& sigma) {
  const Vector mu = center + half_range.cwiseProduct(actor.forward(Matrix(state)).col(0));
  const double k = static_cast<double>(action.size());
  const Vector z = (action - mu).cwiseQuotient(sigma);
  return -0.5 * z.squaredNorm() - sigma.array().log().sum() - 0.5 * k * std::log(2.0 * 3.14159265358979323846);
}

double gaussian_log_policy_grad_norm_sq(const Network& actor, const Observation& state, const Vector& action,
                                        const Vector& center, const Vector& half_range, const Vector& sigma) {
  GradTape tape;
  const Vector y = actor.forward(Matrix(state), tape).col(0);
  const Vector mu = center + half_range.cwiseProduct(y);
  // d log pi / d y = half_range * (a - mu) / sigma^2
  const Matrix dy = half_range.cwiseProduct(action - mu).cwiseQuotient(sigma.cwiseProduct(sigma));
  const std::vector<double> g = actor.backward(tape, dy);
  double s = 0.0;
  for (double v : g) s += v * v;
  return s;
}

std::size_t select_in_chunk(std::span<const SelectionScore> scores) {
  if (scores.empty()) throw UsageError("cannot select from an empty chunk");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].value > scores[best].value) best = i;
  }
  return best;
}

ChunkSelector::ChunkSelector(std::size_t interval, double gamma) : interval_(interval), gamma_(gamma) {
  if (interval_ == 0) throw UsageError("chunk interval must be at least 1");
}

void ChunkSelector::observe(const Transition& transition, double score) {
  if (!std::isfinite(score)) throw NumericError("non-finite selection score");
  if (!rewards_.empty() && transition.step_index != rewards_.size()) {
    throw UsageError("transitions must arrive in step order");
  }
  rewards_.push_back(transition.reward);
  if (in_chunk_ == 0 || score > best_score_) {
    best_ = transition;
    best_score_ = score;
  }
  ++in_chunk_;
  final_state_ = transition.next_state;
  final_terminal_ = transition.terminal;
  if (in_chunk_ == interval_) close_chunk();
}

void ChunkSelector::close_chunk() {
  winners_.push_back(std::move(best_));
  in_chunk_ = 0;
}

std::vector<SelectedSample> ChunkSelector::finish() {
  if (in_chunk_ > 0) close_chunk();
  std::vector<SelectedSample> out;
  out.reserve(winners_.size());
  const std::size_t total = rewards_.size();
  for (std::size_t i = 0; i < winners_.size(); ++i) {
    Transition& w = winners_[i];
    const bool last = i + 1 == winners_.size();
    const std::size_t begin = w.step_index;
    const std::size_t end = last ? total : winners_[i + 1].step_index;
    SelectedSample s;
    double acc = 0.0;
    double discount = 1.0;
    for (std::size_t t = begin; t < end; ++t) {
      acc += discount * rewards_[t];
      discount *= gamma_;
    }
    s.accumulated_reward = acc;
    s.step_index = begin;
    s.segment_steps = end - begin;
    s.next_state = last ? final_state_ : winners_[i + 1].state;
    s.done = last;
    s.terminal = last && final_terminal_;
    s.state = std::move(w.state);
    s.action = std::move(w.action);
    out.push_back(std::move(s));
  }
  winners_.clear();
  rewards_.clear();
  in_chunk_ = 0;
  return out;
}

}  // namespace amtd
