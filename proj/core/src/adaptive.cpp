#include "mfrl/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "train_loop.hpp"

namespace mfrl {

void validate(const AdaptiveConfig& cfg) {
  // epsilon = 1 is allowed: it degenerates to uniform exploration of the
  // non-preferred models and is exercised by tests.
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must be in (0,1]");
  }
  if (cfg.episode_length < 1) {
    throw std::invalid_argument("episode_length must be >= 1");
  }
  if (cfg.episode_count < 0) {
    throw std::invalid_argument("episode_count must be >= 0");
  }
  if (cfg.batch_size < 1) {
    throw std::invalid_argument("batch_size must be >= 1");
  }
  if (cfg.align_norm_tol < 0.0) {
    throw std::invalid_argument("align_norm_tol must be >= 0");
  }
}

double cosine_similarity(std::span<const double> u, std::span<const double> v,
                         double tol) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("cosine_similarity: length mismatch");
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  nu = std::sqrt(nu);
  nv = std::sqrt(nv);
  if (nu < tol || nv < tol) return 0.0;
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

double alignment_threshold(int episode, int episode_count, ThetaTailMode mode) {
  if (episode < 0 || episode >= episode_count) {
    throw std::invalid_argument("alignment_threshold: episode out of range");
  }
  const double cutoff = 0.9 * episode_count;
  if (static_cast<double>(episode) < cutoff) {
    const double inner = std::cos(std::numbers::pi * episode / cutoff);
    return std::cos(std::numbers::pi / 4.0 * (1.0 + inner));
  }
  return mode == ThetaTailMode::Strict ? 1.0 : 0.0;
}

ModelChoiceOutcome choose_model(double s_cos1, double s_cos2, double epsilon,
                                double theta, std::mt19937_64& rng) {
  if (std::abs(s_cos1) > 1.0 + 1e-9 || std::abs(s_cos2) > 1.0 + 1e-9) {
    throw std::invalid_argument("choose_model: cosine outside [-1,1]");
  }
  const bool aligned1 = s_cos1 > theta;
  const bool aligned2 = s_cos2 > theta;

  ModelChoiceOutcome out;
  if (aligned1 && aligned2) {
    out.probabilities = {(1.0 - epsilon) / 2.0, (1.0 - epsilon) / 2.0, epsilon};
  } else if (aligned1) {
    out.probabilities = {1.0 - epsilon, epsilon / 2.0, epsilon / 2.0};
  } else if (aligned2) {
    out.probabilities = {epsilon / 2.0, 1.0 - epsilon, epsilon / 2.0};
  } else {
    out.probabilities = {epsilon / 2.0, epsilon / 2.0, 1.0 - epsilon};
  }

  // Single-uniform categorical draw keeps the stream consumption fixed at
  // one value per call.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double cumulative = 0.0;
  std::size_t chosen = kFidelityCount - 1;
  for (std::size_t i = 0; i < kFidelityCount; ++i) {
    cumulative += out.probabilities[i];
    if (u < cumulative) {
      chosen = i;
      break;
    }
  }
  out.model = static_cast<FidelityId>(chosen);
  const double max_p =
      *std::max_element(out.probabilities.begin(), out.probabilities.end());
  out.aligned = out.probabilities[chosen] == max_p;
  return out;
}

void record_transition(BufferSet& buffers, int episode, int step,
                       std::optional<FidelityId> prev_model,
                       const Transition& transition) {
  auto& sequences = buffers.of(transition.model);
  if (step > 0 && prev_model.has_value() && *prev_model == transition.model &&
      !sequences.empty()) {
    sequences.back().transitions.push_back(transition);
    return;
  }
  Sequence seq;
  seq.episode_id = episode;
  seq.transitions.push_back(transition);
  sequences.push_back(std::move(seq));
}

std::size_t augment_hf_buffer(BufferSet& buffers) {
  std::size_t added = 0;
  for (std::size_t lane = 0; lane < 2; ++lane) {
    const FidelityId id = lane == 0 ? FidelityId::LF1 : FidelityId::LF2;
    const auto& sequences = buffers.of(id);
    for (std::size_t si = buffers.augment_cursor[lane]; si < sequences.size();
         ++si) {
      const auto& src = sequences[si].transitions;
      std::size_t i = 0;
      while (i < src.size()) {
        if (!src[i].aligned) {
          ++i;
          continue;
        }
        std::size_t j = i;
        while (j < src.size() && src[j].aligned) ++j;
        Sequence sub;
        sub.episode_id = sequences[si].episode_id;
        // a copied run is terminal only if it reaches the end of a
        // terminal donor sequence
        sub.terminal = sequences[si].terminal && j == src.size();
        sub.transitions.assign(src.begin() + static_cast<std::ptrdiff_t>(i),
                               src.begin() + static_cast<std::ptrdiff_t>(j));
        buffers.of(FidelityId::HF).push_back(std::move(sub));
        ++added;
        i = j;
      }
    }
    buffers.augment_cursor[lane] = sequences.size();
  }
  return added;
}

std::optional<PpoBatch> assemble_training_batch(const BufferSet& buffers,
                                                FidelityId model,
                                                const GaussianPolicy& policy,
                                                const ValueFunction& value,
                                                const PpoConfig& cfg,
                                                int batch_size,
                                                bool reevaluate_old_log_probs) {
  if (buffers.transition_count(model) <
      static_cast<std::size_t>(batch_size)) {
    return std::nullopt;
  }

  PpoBatch batch;
  batch.reserve(buffers.transition_count(model));
  std::vector<double> rewards;
  std::vector<double> values;
  for (const Sequence& seq : buffers.of(model)) {
    const std::size_t n = seq.size();
    rewards.resize(n);
    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      rewards[i] = seq.transitions[i].r;
      values[i] = value_estimate(value, seq.transitions[i].s);
    }
    // Episode-ending sequences have nothing beyond them; bootstrapping the
    // critic there would hand out the terminal state's improvement
    // potential for free and erase the end-of-episode learning signal.
    const double bootstrap =
        seq.terminal ? 0.0
                     : value_estimate(value, seq.transitions.back().s_next);
    const GaeResult gae =
        compute_gae(rewards, values, bootstrap, cfg.gamma, cfg.gae_lambda);
    for (std::size_t i = 0; i < n; ++i) {
      const Transition& tr = seq.transitions[i];
      const double old_lp = reevaluate_old_log_probs
                                ? action_log_prob(policy, tr.s, tr.a)
                                : tr.log_prob;
      batch.push_back(PpoSample{tr.s, tr.a, old_lp, gae.advantages[i],
                                gae.returns[i]});
    }
  }
  return batch;
}

TrainResult run_adaptive_training(const MultiFidelityEnv& env,
                                  const AdaptiveConfig& cfg,
                                  const PpoConfig& ppo_cfg,
                                  const AgentArch& arch, std::uint64_t seed) {
  validate(cfg);
  const auto theta_of = [&cfg](int episode) {
    if (cfg.theta_override) return *cfg.theta_override;
    return alignment_threshold(episode, cfg.episode_count,
                               cfg.theta_tail_mode);
  };

  detail::LoopPlan plan;
  plan.theta_of = theta_of;
  plan.augment = true;
  plan.artifact = FidelityId::HF;
  plan.select = [&cfg, theta_of](int episode, int /*step*/,
                                 const DesignVector& s,
                                 const std::array<Agent, kFidelityCount>& agents,
                                 std::mt19937_64& choice_rng) {
    const auto mean_hf =
        policy_mean(agents[index_of(FidelityId::HF)].policy, s);
    const auto mean_lf1 =
        policy_mean(agents[index_of(FidelityId::LF1)].policy, s);
    const auto mean_lf2 =
        policy_mean(agents[index_of(FidelityId::LF2)].policy, s);
    const double s1 =
        cosine_similarity(mean_lf1, mean_hf, cfg.align_norm_tol);
    const double s2 =
        cosine_similarity(mean_lf2, mean_hf, cfg.align_norm_tol);
    const ModelChoiceOutcome outcome =
        choose_model(s1, s2, cfg.epsilon, theta_of(episode), choice_rng);
    return detail::StepDecision{outcome.model, outcome.aligned};
  };

  return detail::run_training_loop(env, cfg, ppo_cfg, arch, seed, plan);
}

}  // namespace mfrl
