#pragma once

#include <deque>

#include "explab/errors.hpp"
#include "explab/maze.hpp"
#include "explab/rng.hpp"

namespace explab {

// Episode-granular replay: training samples whole episodes, so the buffer
// stores them whole and evicts oldest-first at capacity.
class EpisodicReplay {
 public:
  explicit EpisodicReplay(int capacity) : capacity_(capacity) {
    if (capacity < 1) throw InvalidInputError("EpisodicReplay: capacity must be positive");
  }

  void push(EpisodeRecord episode) {
    if (episode.transitions.empty()) throw InvalidInputError("EpisodicReplay: empty episode");
    if (static_cast<int>(episodes_.size()) == capacity_) episodes_.pop_front();
    episodes_.push_back(std::move(episode));
  }

  const EpisodeRecord& sample(Rng& rng) const {
    if (episodes_.empty()) throw ContractViolation("EpisodicReplay: sample from empty buffer");
    return episodes_[static_cast<std::size_t>(rng.uniform_index(static_cast<int>(episodes_.size())))];
  }

  int size() const { return static_cast<int>(episodes_.size()); }
  int capacity() const { return capacity_; }
  const EpisodeRecord& at(int i) const { return episodes_.at(static_cast<std::size_t>(i)); }

 private:
  int capacity_;
  std::deque<EpisodeRecord> episodes_;
};

}  // namespace explab
