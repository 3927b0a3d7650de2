#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mfrl/adaptive.hpp"

namespace mfrl {

/// Fixed per-episode fidelity schedule: ordered (model, step count) segments
/// whose counts sum to the episode length.
class HierarchicalSchedule {
 public:
  HierarchicalSchedule(std::vector<std::pair<FidelityId, int>> segments,
                       int episode_length);

  FidelityId model_at(int step) const { return step_to_model_[step]; }
  const std::vector<std::pair<FidelityId, int>>& segments() const {
    return segments_;
  }
  int episode_length() const { return static_cast<int>(step_to_model_.size()); }

 private:
  std::vector<std::pair<FidelityId, int>> segments_;
  std::vector<FidelityId> step_to_model_;
};

/// Training loop where each step's fidelity is dictated by the schedule.
/// Every model's agent trains only on its own segments (no alignment, no
/// buffer augmentation); the high-fidelity agent is the evaluated artifact.
TrainResult run_hierarchical_training(const MultiFidelityEnv& env,
                                      const HierarchicalSchedule& schedule,
                                      const AdaptiveConfig& cfg,
                                      const PpoConfig& ppo_cfg,
                                      const AgentArch& arch,
                                      std::uint64_t seed);

/// Standard single-model PPO loop; the trained model is the artifact.
TrainResult run_single_fidelity_training(const MultiFidelityEnv& env,
                                         FidelityId model,
                                         const AdaptiveConfig& cfg,
                                         const PpoConfig& ppo_cfg,
                                         const AgentArch& arch,
                                         std::uint64_t seed);

}  // namespace mfrl
