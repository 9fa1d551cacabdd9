#include "amtd/replay.hpp"

#include "amtd/errors.hpp"

namespace amtd {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw UsageError("replay capacity must be positive");
}

void ReplayBuffer::push_episode(std::span<const SelectedSample> selected) {
  for (std::size_t i = 1; i < selected.size(); ++i) {
    if (selected[i].step_index <= selected[i - 1].step_index) {
      throw UsageError("selected samples must be ordered by step index");
    }
  }
  if (selected.empty()) return;
  const std::uint64_t id = next_episode_++;
  for (const auto& s : selected) {
    entries_.push_back({s, id});
    if (entries_.size() > capacity_) entries_.pop_front();
  }
}

LookaheadWindow ReplayBuffer::window_at(std::size_t anchor, std::size_t l) const {
  if (anchor >= entries_.size()) throw UsageError("window anchor outside the buffer");
  LookaheadWindow w;
  w.episode = entries_[anchor].episode;
  w.requested_lookaheads = l;
  w.samples.reserve(l + 1);
  w.samples.push_back(&entries_[anchor].sample);
  for (std::size_t k = 1; k <= l; ++k) {
    const std::size_t p = anchor + k;
    if (p >= entries_.size() || entries_[p].episode != w.episode) break;
    w.samples.push_back(&entries_[p].sample);
  }
  return w;
}

std::optional<std::vector<LookaheadWindow>> ReplayBuffer::sample_windows(std::size_t batch_size, std::size_t l,
                                                                       Rng& rng) const {
  if (entries_.empty()) return std::nullopt;
  if (batch_size == 0) throw UsageError("batch size must be positive");
  std::vector<LookaheadWindow> out;
  out.reserve(batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) out.push_back(window_at(uniform_index(rng, entries_.size()), l));
  return out;
}

}  // namespace amtd
