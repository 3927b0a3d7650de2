#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "mfrl/design.hpp"
#include "mfrl/fidelity.hpp"

namespace mfrl {

/// Maximal run of consecutive same-model transitions within one episode.
/// Non-empty by construction; every transition shares the same FidelityId.
/// `terminal` marks a sequence whose last transition ends its episode, so
/// advantage estimation knows there is nothing to bootstrap beyond it.
struct Sequence {
  std::vector<Transition> transitions;
  int episode_id = 0;
  bool terminal = false;

  FidelityId model() const { return transitions.front().model; }
  std::size_t size() const { return transitions.size(); }
};

/// Per-model experience storage. Low-fidelity buffers carry an augmentation
/// cursor: the index of the first sequence not yet scanned for aligned runs,
/// so a sequence is never copied into the HF buffer twice.
struct BufferSet {
  std::array<std::vector<Sequence>, kFidelityCount> buffers;
  std::array<std::size_t, 2> augment_cursor{0, 0};  // LF1, LF2

  std::vector<Sequence>& of(FidelityId id) { return buffers[index_of(id)]; }
  const std::vector<Sequence>& of(FidelityId id) const {
    return buffers[index_of(id)];
  }

  std::size_t transition_count(FidelityId id) const {
    std::size_t n = 0;
    for (const auto& seq : of(id)) n += seq.size();
    return n;
  }

  /// Empties one model's buffer. Clearing an LF buffer rewinds its
  /// augmentation cursor; clearing the HF buffer leaves LF cursors alone.
  void clear(FidelityId id) {
    of(id).clear();
    if (id == FidelityId::LF1) augment_cursor[0] = 0;
    if (id == FidelityId::LF2) augment_cursor[1] = 0;
  }
};

}  // namespace mfrl
