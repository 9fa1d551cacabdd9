#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "amtd/random.hpp"
#include "amtd/selection.hpp"

namespace amtd {

/// Anchor plus up to l following samples of the same episode, in step order.
/// Pointers stay valid until the next push into the owning buffer.
struct LookaheadWindow {
  std::vector<const SelectedSample*> samples;
  std::uint64_t episode = 0;
  std::size_t requested_lookaheads = 0;

  const SelectedSample& anchor() const { return *samples.front(); }
  std::size_t lookaheads() const { return samples.size() - 1; }
  bool truncated() const { return lookaheads() < requested_lookaheads; }
};

/// FIFO ring of selected samples tagged with episode ids; windows are assembled at sampling time.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  // Samples must be strictly increasing in step_index.
  void push_episode(std::span<const SelectedSample> selected);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  std::uint64_t episodes_pushed() const { return next_episode_; }

  const SelectedSample& at(std::size_t position) const { return entries_.at(position).sample; }
  std::uint64_t episode_at(std::size_t position) const { return entries_.at(position).episode; }

  LookaheadWindow window_at(std::size_t anchor, std::size_t l) const;
  // Uniform over anchors; nullopt while the buffer is empty.
  std::optional<std::vector<LookaheadWindow>> sample_windows(std::size_t batch_size, std::size_t l, Rng& rng) const;

 private:
  struct Entry {
    SelectedSample sample;
    std::uint64_t episode = 0;
  };
  std::size_t capacity_;
  std::deque<Entry> entries_;
  std::uint64_t next_episode_ = 0;
};

}  // namespace amtd
