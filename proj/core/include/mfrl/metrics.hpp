#pragma once

#include <array>
#include <string>
#include <vector>

#include "mfrl/env.hpp"
#include "mfrl/fidelity.hpp"

namespace mfrl {

/// Per-episode training bookkeeping: which models acted, the alignment
/// threshold in force, the collected return, and the cost ledger snapshot.
struct EpisodeStats {
  int episode = 0;
  std::array<int, kFidelityCount> steps{0, 0, 0};
  double theta = 0.0;
  double episode_return = 0.0;
  std::array<long long, kFidelityCount> eval_counts{0, 0, 0};
  double cumulative_cost = 0.0;

  bool operator==(const EpisodeStats&) const = default;
};

struct RunMetrics {
  std::vector<EpisodeStats> episodes;
  /// Evaluation-phase quality: quality[seed_index][iteration], measured with
  /// the high-fidelity model along a deterministic rollout.
  std::vector<std::vector<double>> quality;
  CostLedger ledger;
  std::vector<std::string> warnings;
};

}  // namespace mfrl
