#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mfrl/design.hpp"
#include "mfrl/mlp.hpp"

namespace mfrl {

/// Diagonal-Gaussian policy over a tanh-squashed action space. The mean comes
/// from a small MLP; log standard deviations are state-independent and kept
/// in [-5, 2] by every update.
struct GaussianPolicy {
  MlpParams mean_net;  // design dim -> hidden -> design dim
  std::array<double, kDesignDim> log_std{};
  double a_max = 0.1;
};

struct ValueFunction {
  MlpParams net;  // design dim -> hidden -> 1
};

struct PpoConfig {
  double clip_ratio = 0.2;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  int epochs = 4;
  int minibatch = 64;
  double value_coeff = 0.5;
  double entropy_coeff = 0.0;
};

void validate(const PpoConfig& cfg);

/// Raw mean-net output at a state (pre-squash). This is the vector used for
/// alignment comparisons between policies.
std::array<double, kDesignDim> policy_mean(const GaussianPolicy& p,
                                           const DesignVector& s);

struct ActionSample {
  Action action;
  double log_prob = 0.0;
};

/// Draws z ~ Normal(mean, exp(log_std)) and squashes: action = a_max*tanh(z).
/// The squashed value is nudged strictly inside (-1, 1) so the inverse map
/// stays finite; log_prob includes the tanh change-of-variables correction
/// and is computed through the same inverse used by action_log_prob, so the
/// round trip is exact.
ActionSample sample_action(const GaussianPolicy& p, const DesignVector& s,
                           std::mt19937_64& rng);

/// Log density of an action under the policy. Components at +/- a_max are
/// rejected (atanh singularity).
double action_log_prob(const GaussianPolicy& p, const DesignVector& s,
                       const Action& a);

double value_estimate(const ValueFunction& v, const DesignVector& s);

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

/// Generalized advantage estimation over one trajectory segment.
/// delta_t = r_t + gamma*v_{t+1} - v_t with v_T = bootstrap;
/// adv_t = sum_{k>=t} (gamma*lambda)^(k-t) delta_k; returns_t = adv_t + v_t.
GaeResult compute_gae(std::span<const double> rewards,
                      std::span<const double> values, double bootstrap,
                      double gamma, double lambda);

struct PpoSample {
  DesignVector s;
  Action a;
  double old_log_prob = 0.0;
  double advantage = 0.0;
  double ret = 0.0;
};

using PpoBatch = std::vector<PpoSample>;

/// Shifts advantages to zero mean and scales to unit sample variance
/// (degenerate batches are only centered). ppo_update expects batches to be
/// normalized by the caller.
void normalize_advantages(PpoBatch& batch);

/// Scalar PPO objective (negated, i.e. a loss) over a batch:
/// mean of -min(ratio*A, clip(ratio)*A) + value_coeff*(v-ret)^2
/// - entropy_coeff*H. Pure in the parameters; used by tests to compare the
/// analytic gradients against finite differences.
double ppo_loss(const GaussianPolicy& p, const ValueFunction& v,
                std::span<const PpoSample> batch, const PpoConfig& cfg);

struct PpoGradients {
  Gradient mean_net;
  std::array<double, kDesignDim> log_std{};
  Gradient value_net;
  double loss = 0.0;
};

/// Analytic gradients of ppo_loss over a (mini)batch.
PpoGradients ppo_gradients(const GaussianPolicy& p, const ValueFunction& v,
                           std::span<const PpoSample> batch,
                           const PpoConfig& cfg);

/// Network architecture and optimizer settings shared by every agent in a
/// run.
struct AgentArch {
  std::vector<int> hidden_sizes{64, 64};
  double learning_rate = 3e-4;
  double a_max = 0.1;
  double init_log_std = -0.5;
};

/// One fidelity's actor/critic pair with persistent optimizer state.
struct Agent {
  GaussianPolicy policy;
  ValueFunction value;
  OptimizerState policy_opt;
  OptimizerState log_std_opt;
  OptimizerState value_opt;
};

Agent make_agent(const std::vector<int>& hidden_sizes, double a_max,
                 double learning_rate, std::mt19937_64& init_rng,
                 double init_log_std = -0.5);

struct PpoUpdateReport {
  bool aborted = false;
  int minibatches = 0;
  double mean_loss = 0.0;
  std::string diagnostic;
};

/// Clipped-surrogate PPO update: cfg.epochs passes over shuffled minibatches,
/// one adaptive-moment step per minibatch, log_std re-clamped after every
/// step. A non-finite loss aborts the update and restores the incoming
/// parameters.
PpoUpdateReport ppo_update(Agent& agent, const PpoBatch& batch,
                           const PpoConfig& cfg, std::mt19937_64& shuffle_rng);

}  // namespace mfrl
