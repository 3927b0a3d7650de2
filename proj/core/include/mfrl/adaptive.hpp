#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>

#include "mfrl/design.hpp"
#include "mfrl/env.hpp"
#include "mfrl/experience.hpp"
#include "mfrl/metrics.hpp"
#include "mfrl/policy.hpp"

namespace mfrl {

/// Tail of the alignment-threshold schedule for the last 10% of training.
/// Strict pins theta to 1 (alignment effectively impossible, pure
/// high-fidelity refinement); Printed drops it to 0 instead.
enum class ThetaTailMode { Strict, Printed };

struct AdaptiveConfig {
  int episode_count = 1200;
  int episode_length = 20;
  double epsilon = 0.1;     // fidelity-choice exploration mass
  int batch_size = 400;     // transitions accumulated before a policy update
  double align_norm_tol = 1e-8;
  ThetaTailMode theta_tail_mode = ThetaTailMode::Strict;
  /// Fixed threshold replacing the schedule; used by tests and ablations.
  std::optional<double> theta_override;
  /// When true, batch assembly re-evaluates old log-probs under the owning
  /// model's current policy (every ratio starts at 1, so foreign experience
  /// is absorbed as if on-policy). When false, the collection-time behavior
  /// log-prob is kept, making the PPO ratio an importance weight that the
  /// clip suppresses wherever the owner disagrees with the behavior policy.
  bool reevaluate_old_log_probs = true;
};

void validate(const AdaptiveConfig& cfg);

struct ModelChoiceOutcome {
  FidelityId model = FidelityId::HF;
  bool aligned = false;
  std::array<double, kFidelityCount> probabilities{0.0, 0.0, 0.0};
};

/// u.v / (|u||v|); returns 0 when either norm is below tol, which counts as
/// non-aligned under any non-negative threshold.
double cosine_similarity(std::span<const double> u, std::span<const double> v,
                         double tol);

/// Cosine-annealed alignment threshold. For e < 0.9*episode_count:
/// theta = cos[(pi/4)(1 + cos(pi*e / (0.9*episode_count)))], climbing from 0
/// (a 90-degree cone) toward 1 (exact agreement). The tail follows `mode`.
double alignment_threshold(int episode, int episode_count,
                           ThetaTailMode mode = ThetaTailMode::Strict);

/// Epsilon-greedy fidelity selection over the four alignment branches
/// (probabilities ordered LF1, LF2, HF):
///   both aligned  -> ((1-eps)/2, (1-eps)/2, eps)
///   only LF1      -> (1-eps, eps/2, eps/2)
///   only LF2      -> (eps/2, 1-eps, eps/2)
///   neither       -> (eps/2, eps/2, 1-eps)
/// Alignment uses the strict comparison s_cos > theta. The returned aligned
/// flag is true iff the drawn model's probability attains the maximum.
ModelChoiceOutcome choose_model(double s_cos1, double s_cos2, double epsilon,
                                double theta, std::mt19937_64& rng);

/// Appends the transition to the tail sequence of its model's buffer when
/// the same model also acted at the previous step of this episode; any model
/// switch (or step 0) opens a new sequence.
void record_transition(BufferSet& buffers, int episode, int step,
                       std::optional<FidelityId> prev_model,
                       const Transition& transition);

/// Copies every maximal contiguous aligned run from not-yet-scanned LF
/// sequences into the HF buffer (rewards kept as recorded by the LF model),
/// then advances the cursors. Returns the number of subsequences added.
std::size_t augment_hf_buffer(BufferSet& buffers);

/// Builds a PPO batch from one model's buffer, or nullopt when fewer than
/// batch_size transitions are stored. Advantages come from GAE under the
/// owning model's value function (also for LF-origin sequences inside the HF
/// buffer, whose rewards stay low-fidelity); old log-probs are re-evaluated
/// under the owning model's current policy.
std::optional<PpoBatch> assemble_training_batch(const BufferSet& buffers,
                                                FidelityId model,
                                                const GaussianPolicy& policy,
                                                const ValueFunction& value,
                                                const PpoConfig& cfg,
                                                int batch_size,
                                                bool reevaluate_old_log_probs = true);

struct TrainResult {
  std::array<Agent, kFidelityCount> agents;
  FidelityId artifact = FidelityId::HF;  // the agent a run is judged by
  RunMetrics metrics;
};

/// Full adaptive training loop: per step, the LF policies' mean actions are
/// compared against the HF policy's, the scheduled threshold decides the
/// alignment branch, and the epsilon-greedy choice picks the acting model.
/// Aligned LF experience is folded into the HF buffer after every episode;
/// each model trains whenever its buffer reaches batch_size.
TrainResult run_adaptive_training(const MultiFidelityEnv& env,
                                  const AdaptiveConfig& cfg,
                                  const PpoConfig& ppo_cfg,
                                  const AgentArch& arch, std::uint64_t seed);

}  // namespace mfrl
