#include "mfrl/baselines.hpp"

#include <stdexcept>

#include "train_loop.hpp"

namespace mfrl {

HierarchicalSchedule::HierarchicalSchedule(
    std::vector<std::pair<FidelityId, int>> segments, int episode_length)
    : segments_(std::move(segments)) {
  if (episode_length < 1) {
    throw std::invalid_argument("schedule: episode_length must be >= 1");
  }
  int total = 0;
  for (const auto& [model, count] : segments_) {
    if (count < 1) {
      throw std::invalid_argument("schedule: segment step count must be >= 1");
    }
    total += count;
  }
  if (total != episode_length) {
    throw std::invalid_argument(
        "schedule: segment step counts must sum to episode_length");
  }
  step_to_model_.reserve(static_cast<std::size_t>(episode_length));
  for (const auto& [model, count] : segments_) {
    for (int i = 0; i < count; ++i) step_to_model_.push_back(model);
  }
}

TrainResult run_hierarchical_training(const MultiFidelityEnv& env,
                                      const HierarchicalSchedule& schedule,
                                      const AdaptiveConfig& cfg,
                                      const PpoConfig& ppo_cfg,
                                      const AgentArch& arch,
                                      std::uint64_t seed) {
  if (schedule.episode_length() != cfg.episode_length) {
    throw std::invalid_argument(
        "schedule length does not match configured episode_length");
  }
  detail::LoopPlan plan;
  plan.augment = false;
  plan.artifact = FidelityId::HF;
  plan.theta_of = [](int) { return 0.0; };
  plan.select = [&schedule](int /*episode*/, int step, const DesignVector&,
                            const std::array<Agent, kFidelityCount>&,
                            std::mt19937_64&) {
    return detail::StepDecision{schedule.model_at(step), false};
  };
  return detail::run_training_loop(env, cfg, ppo_cfg, arch, seed, plan);
}

TrainResult run_single_fidelity_training(const MultiFidelityEnv& env,
                                         FidelityId model,
                                         const AdaptiveConfig& cfg,
                                         const PpoConfig& ppo_cfg,
                                         const AgentArch& arch,
                                         std::uint64_t seed) {
  detail::LoopPlan plan;
  plan.augment = false;
  plan.artifact = model;
  plan.theta_of = [](int) { return 0.0; };
  plan.select = [model](int, int, const DesignVector&,
                        const std::array<Agent, kFidelityCount>&,
                        std::mt19937_64&) {
    return detail::StepDecision{model, false};
  };
  return detail::run_training_loop(env, cfg, ppo_cfg, arch, seed, plan);
}

}  // namespace mfrl
