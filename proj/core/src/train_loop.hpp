#pragma once

// Internal training-loop engine shared by the adaptive method and the
// fixed-schedule baselines. Not installed.

#include <array>
#include <cstdint>
#include <functional>
#include <random>

#include "mfrl/adaptive.hpp"
#include "mfrl/design.hpp"
#include "mfrl/env.hpp"
#include "mfrl/policy.hpp"

namespace mfrl::detail {

struct StepDecision {
  FidelityId model = FidelityId::HF;
  bool aligned = false;
};

struct LoopPlan {
  std::function<StepDecision(int episode, int step, const DesignVector& s,
                             const std::array<Agent, kFidelityCount>& agents,
                             std::mt19937_64& choice_rng)>
      select;
  std::function<double(int episode)> theta_of;  // recorded in metrics
  bool augment = false;
  FidelityId artifact = FidelityId::HF;
};

/// One deterministic training run. All randomness comes from sub-streams of
/// `seed`; the fidelity decision is delegated to plan.select and everything
/// else (rollout, sequence recording, optional augmentation, batch-triggered
/// updates, metrics) is common across methods.
TrainResult run_training_loop(const MultiFidelityEnv& env,
                              const AdaptiveConfig& cfg,
                              const PpoConfig& ppo_cfg, const AgentArch& arch,
                              std::uint64_t seed, const LoopPlan& plan);

}  // namespace mfrl::detail
