#include "train_loop.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mfrl/rng.hpp"

namespace mfrl::detail {

TrainResult run_training_loop(const MultiFidelityEnv& env,
                              const AdaptiveConfig& cfg,
                              const PpoConfig& ppo_cfg, const AgentArch& arch,
                              std::uint64_t seed, const LoopPlan& plan) {
  validate(cfg);
  validate(ppo_cfg);

  TrainResult out;
  out.artifact = plan.artifact;
  // All agents start from the same policy and value parameters; they only
  // diverge through the data each one trains on.
  {
    std::mt19937_64 init_rng = make_rng(seed, RngStream::AgentInit);
    const Agent shared = make_agent(arch.hidden_sizes, arch.a_max,
                                    arch.learning_rate, init_rng,
                                    arch.init_log_std);
    for (std::size_t m = 0; m < kFidelityCount; ++m) out.agents[m] = shared;
  }

  std::mt19937_64 seed_rng = make_rng(seed, RngStream::SeedDesigns);
  std::mt19937_64 choice_rng = make_rng(seed, RngStream::ModelChoice);
  std::mt19937_64 action_rng = make_rng(seed, RngStream::ActionNoise);
  std::mt19937_64 shuffle_rng = make_rng(seed, RngStream::PpoShuffle);

  BufferSet buffers;
  CostLedger ledger = make_ledger(env.config);
  std::array<long long, kFidelityCount> prev_counts{0, 0, 0};
  out.metrics.episodes.reserve(static_cast<std::size_t>(cfg.episode_count));

  for (int episode = 0; episode < cfg.episode_count; ++episode) {
    DesignVector s = sample_seed_design(seed_rng);
    // Last objective value seen by each model this episode. A model's first
    // evaluation only establishes its baseline (improvement reward 0, though
    // the invalidity penalty still applies); afterwards rewards are
    // improvements between consecutive evaluations by the same model.
    std::array<std::optional<double>, kFidelityCount> last_q;
    std::optional<FidelityId> prev_model;

    EpisodeStats stats;
    stats.episode = episode;
    stats.theta = plan.theta_of(episode);

    for (int step = 0; step < cfg.episode_length; ++step) {
      const StepDecision decision =
          plan.select(episode, step, s, out.agents, choice_rng);
      const std::size_t m = index_of(decision.model);

      const ActionSample sampled =
          sample_action(out.agents[m].policy, s, action_rng);
      const DesignVector s_next = apply_action(s, sampled.action);

      EvaluationResult result;
      try {
        result = env.model(decision.model).evaluate(s_next);
      } catch (const std::exception& e) {
        throw std::runtime_error("evaluation failed at episode " +
                                 std::to_string(episode) + ", step " +
                                 std::to_string(step) + ": " + e.what());
      }
      if (!std::isfinite(result.q)) {
        throw std::runtime_error("non-finite objective at episode " +
                                 std::to_string(episode) + ", step " +
                                 std::to_string(step));
      }
      charge(ledger, decision.model);

      const double reward =
          step_reward(last_q[m].value_or(result.q), result,
                      env.config.invalid_penalty);
      last_q[m] = result.q;

      record_transition(buffers, episode, step, prev_model,
                        Transition{s, sampled.action, reward, s_next,
                                   decision.aligned, decision.model,
                                   sampled.log_prob});
      prev_model = decision.model;
      s = s_next;

      stats.steps[m] += 1;
      stats.episode_return += reward;
    }

    // The tail sequence of the last-acting model holds the episode's final
    // transition.
    if (prev_model.has_value()) {
      buffers.of(*prev_model).back().terminal = true;
    }

    if (plan.augment) augment_hf_buffer(buffers);

    for (FidelityId model : kAllFidelities) {
      if (buffers.transition_count(model) <
          static_cast<std::size_t>(cfg.batch_size)) {
        continue;
      }
      Agent& agent = out.agents[index_of(model)];
      auto batch = assemble_training_batch(buffers, model, agent.policy,
                                           agent.value, ppo_cfg,
                                           cfg.batch_size,
                                           cfg.reevaluate_old_log_probs);
      normalize_advantages(*batch);
      const PpoUpdateReport report =
          ppo_update(agent, *batch, ppo_cfg, shuffle_rng);
      if (report.aborted) {
        out.metrics.warnings.push_back(
            "episode " + std::to_string(episode) + ", model " +
            std::string(name_of(model)) + ": " + report.diagnostic);
      }
      buffers.clear(model);
    }

    for (std::size_t m = 0; m < kFidelityCount; ++m) {
      stats.eval_counts[m] = ledger.counts[m] - prev_counts[m];
    }
    prev_counts = ledger.counts;
    stats.cumulative_cost = ledger.total_cost();
    out.metrics.episodes.push_back(stats);
  }

  out.metrics.ledger = ledger;
  return out;
}

}  // namespace mfrl::detail
