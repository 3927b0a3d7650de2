#include "mfrl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mfrl {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5*log(2*pi)
constexpr double kLogStdMin = -5.0;
constexpr double kLogStdMax = 2.0;
constexpr double kSquashLimit = 1.0 - 1e-12;

// Joint log density of the squashed action whose pre-squash ratios are t
// (t_i = a_i / a_max, strictly inside (-1, 1)).
double log_prob_from_ratios(const std::array<double, kDesignDim>& mean,
                            const std::array<double, kDesignDim>& log_std,
                            const std::array<double, kDesignDim>& t,
                            double a_max) {
  double lp = 0.0;
  for (std::size_t i = 0; i < kDesignDim; ++i) {
    const double z = std::atanh(t[i]);
    const double sigma = std::exp(log_std[i]);
    const double u = (z - mean[i]) / sigma;
    lp += -0.5 * u * u - log_std[i] - kHalfLog2Pi;
    lp -= std::log(a_max) + std::log1p(-t[i] * t[i]);
  }
  return lp;
}

void clamp_log_std(GaussianPolicy& p) {
  for (double& v : p.log_std) v = std::clamp(v, kLogStdMin, kLogStdMax);
}

}  // namespace

void validate(const PpoConfig& cfg) {
  if (!(cfg.clip_ratio > 0.0 && cfg.clip_ratio < 1.0)) {
    throw std::invalid_argument("clip_ratio must be in (0,1)");
  }
  if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0)) {
    throw std::invalid_argument("gamma must be in (0,1]");
  }
  if (!(cfg.gae_lambda > 0.0 && cfg.gae_lambda <= 1.0)) {
    throw std::invalid_argument("gae_lambda must be in (0,1]");
  }
  if (cfg.epochs < 1 || cfg.minibatch < 1) {
    throw std::invalid_argument("epochs and minibatch must be >= 1");
  }
}

std::array<double, kDesignDim> policy_mean(const GaussianPolicy& p,
                                           const DesignVector& s) {
  const std::vector<double> out = mlp_forward(p.mean_net, s.x);
  std::array<double, kDesignDim> mean{};
  std::copy_n(out.begin(), kDesignDim, mean.begin());
  return mean;
}

ActionSample sample_action(const GaussianPolicy& p, const DesignVector& s,
                           std::mt19937_64& rng) {
  const auto mean = policy_mean(p, s);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<double, kDesignDim> t{};
  ActionSample out;
  for (std::size_t i = 0; i < kDesignDim; ++i) {
    const double z = mean[i] + std::exp(p.log_std[i]) * normal(rng);
    t[i] = std::clamp(std::tanh(z), -kSquashLimit, kSquashLimit);
    out.action.delta[i] = p.a_max * t[i];
  }
  out.log_prob = log_prob_from_ratios(mean, p.log_std, t, p.a_max);
  return out;
}

double action_log_prob(const GaussianPolicy& p, const DesignVector& s,
                       const Action& a) {
  std::array<double, kDesignDim> t{};
  for (std::size_t i = 0; i < kDesignDim; ++i) {
    t[i] = a[i] / p.a_max;
    if (!(std::abs(t[i]) < 1.0)) {
      throw std::invalid_argument("action_log_prob: component at action bound");
    }
  }
  return log_prob_from_ratios(policy_mean(p, s), p.log_std, t, p.a_max);
}

double value_estimate(const ValueFunction& v, const DesignVector& s) {
  return mlp_forward(v.net, s.x)[0];
}

GaeResult compute_gae(std::span<const double> rewards,
                      std::span<const double> values, double bootstrap,
                      double gamma, double lambda) {
  if (rewards.empty()) throw std::invalid_argument("compute_gae: empty input");
  if (rewards.size() != values.size()) {
    throw std::invalid_argument("compute_gae: rewards/values size mismatch");
  }
  const std::size_t n = rewards.size();
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double v_next = (i + 1 < n) ? values[i + 1] : bootstrap;
    const double delta = rewards[i] + gamma * v_next - values[i];
    running = delta + gamma * lambda * running;
    out.advantages[i] = running;
    out.returns[i] = running + values[i];
  }
  return out;
}

void normalize_advantages(PpoBatch& batch) {
  if (batch.empty()) return;
  double mean = 0.0;
  for (const auto& s : batch) mean += s.advantage;
  mean /= static_cast<double>(batch.size());
  double sq = 0.0;
  for (const auto& s : batch) {
    const double d = s.advantage - mean;
    sq += d * d;
  }
  const double std_dev =
      batch.size() > 1 ? std::sqrt(sq / static_cast<double>(batch.size() - 1))
                       : 0.0;
  const double scale = 1.0 / std::max(std_dev, 1e-8);
  for (auto& s : batch) s.advantage = (s.advantage - mean) * scale;
}

namespace {

struct SampleTerms {
  double loss = 0.0;
  std::array<double, kDesignDim> d_mean{};      // dloss/dmean
  std::array<double, kDesignDim> d_log_std{};   // dloss/dlog_std
  double d_value = 0.0;                         // dloss/dv
  double value = 0.0;
};

// Loss terms and their derivatives with respect to the network outputs for
// one sample. Entropy of the pre-squash Gaussian: H = sum(log_std) + const.
SampleTerms sample_terms(const GaussianPolicy& p, const ValueFunction& vf,
                         const PpoSample& smp, const PpoConfig& cfg) {
  SampleTerms t;
  const auto mean = policy_mean(p, smp.s);

  double lp = 0.0;
  std::array<double, kDesignDim> dlp_dmean{};
  std::array<double, kDesignDim> dlp_dlog_std{};
  for (std::size_t i = 0; i < kDesignDim; ++i) {
    const double ratio_i = smp.a[i] / p.a_max;
    if (!(std::abs(ratio_i) < 1.0)) {
      throw std::invalid_argument("ppo: action component at bound");
    }
    const double z = std::atanh(ratio_i);
    const double sigma = std::exp(p.log_std[i]);
    const double u = (z - mean[i]) / sigma;
    lp += -0.5 * u * u - p.log_std[i] - kHalfLog2Pi;
    lp -= std::log(p.a_max) + std::log1p(-ratio_i * ratio_i);
    dlp_dmean[i] = u / sigma;
    dlp_dlog_std[i] = u * u - 1.0;
  }

  const double ratio = std::exp(lp - smp.old_log_prob);
  const double clipped =
      std::clamp(ratio, 1.0 - cfg.clip_ratio, 1.0 + cfg.clip_ratio);
  const double u1 = ratio * smp.advantage;
  const double u2 = clipped * smp.advantage;
  const double surrogate = std::min(u1, u2);
  // d surrogate / d lp: the unclipped branch is active when it attains the
  // min (ties resolve to the unclipped side, whose local derivative is the
  // same inside the clip interval).
  const double dsurr_dlp = (u1 <= u2) ? ratio * smp.advantage : 0.0;

  t.value = value_estimate(vf, smp.s);
  const double verr = t.value - smp.ret;

  double entropy = 0.0;
  for (std::size_t i = 0; i < kDesignDim; ++i) {
    entropy += p.log_std[i] + 0.5 + kHalfLog2Pi;
  }

  t.loss = -surrogate + cfg.value_coeff * verr * verr -
           cfg.entropy_coeff * entropy;
  for (std::size_t i = 0; i < kDesignDim; ++i) {
    t.d_mean[i] = -dsurr_dlp * dlp_dmean[i];
    t.d_log_std[i] = -dsurr_dlp * dlp_dlog_std[i] - cfg.entropy_coeff;
  }
  t.d_value = 2.0 * cfg.value_coeff * verr;
  return t;
}

}  // namespace

double ppo_loss(const GaussianPolicy& p, const ValueFunction& v,
                std::span<const PpoSample> batch, const PpoConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("ppo_loss: empty batch");
  double total = 0.0;
  for (const auto& smp : batch) total += sample_terms(p, v, smp, cfg).loss;
  return total / static_cast<double>(batch.size());
}

PpoGradients ppo_gradients(const GaussianPolicy& p, const ValueFunction& v,
                           std::span<const PpoSample> batch,
                           const PpoConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("ppo_gradients: empty batch");
  PpoGradients g;
  g.mean_net.data.assign(p.mean_net.param_count(), 0.0);
  g.value_net.data.assign(v.net.param_count(), 0.0);

  for (const auto& smp : batch) {
    const SampleTerms t = sample_terms(p, v, smp, cfg);
    g.loss += t.loss;
    const Gradient gm = mlp_backward(p.mean_net, smp.s.x, t.d_mean);
    for (std::size_t i = 0; i < gm.data.size(); ++i) {
      g.mean_net.data[i] += gm.data[i];
    }
    const std::array<double, 1> up{t.d_value};
    const Gradient gv = mlp_backward(v.net, smp.s.x, up);
    for (std::size_t i = 0; i < gv.data.size(); ++i) {
      g.value_net.data[i] += gv.data[i];
    }
    for (std::size_t i = 0; i < kDesignDim; ++i) {
      g.log_std[i] += t.d_log_std[i];
    }
  }

  const double inv = 1.0 / static_cast<double>(batch.size());
  g.loss *= inv;
  for (double& x : g.mean_net.data) x *= inv;
  for (double& x : g.value_net.data) x *= inv;
  for (double& x : g.log_std) x *= inv;
  return g;
}

Agent make_agent(const std::vector<int>& hidden_sizes, double a_max,
                 double learning_rate, std::mt19937_64& init_rng,
                 double init_log_std) {
  if (!(a_max > 0.0)) throw std::invalid_argument("a_max must be positive");
  std::vector<int> actor_sizes{static_cast<int>(kDesignDim)};
  std::vector<int> critic_sizes{static_cast<int>(kDesignDim)};
  std::vector<Activation> acts;
  for (int h : hidden_sizes) {
    actor_sizes.push_back(h);
    critic_sizes.push_back(h);
    acts.push_back(Activation::Tanh);
  }
  actor_sizes.push_back(static_cast<int>(kDesignDim));
  critic_sizes.push_back(1);
  acts.push_back(Activation::Linear);

  Agent agent;
  // Bounded actor output: a Tanh output layer keeps the pre-squash mean in
  // [-1, 1], so exploration noise always changes the squashed action and the
  // policy cannot saturate into a constant-action corner.
  std::vector<Activation> actor_acts = acts;
  actor_acts.back() = Activation::Tanh;
  agent.policy.mean_net = make_mlp_random(actor_sizes, actor_acts, init_rng);
  agent.policy.a_max = a_max;
  agent.policy.log_std.fill(std::clamp(init_log_std, kLogStdMin, kLogStdMax));
  agent.value.net = make_mlp_random(critic_sizes, acts, init_rng);
  agent.policy_opt =
      make_optimizer(agent.policy.mean_net.param_count(), learning_rate);
  agent.log_std_opt = make_optimizer(kDesignDim, learning_rate);
  agent.value_opt =
      make_optimizer(agent.value.net.param_count(), learning_rate);
  return agent;
}

PpoUpdateReport ppo_update(Agent& agent, const PpoBatch& batch,
                           const PpoConfig& cfg, std::mt19937_64& shuffle_rng) {
  validate(cfg);
  if (batch.empty()) throw std::invalid_argument("ppo_update: empty batch");

  // Snapshot so a non-finite loss can abort without half-applied steps.
  const std::vector<double> saved_mean = agent.policy.mean_net.data;
  const std::array<double, kDesignDim> saved_log_std = agent.policy.log_std;
  const std::vector<double> saved_value = agent.value.net.data;
  const OptimizerState saved_po = agent.policy_opt;
  const OptimizerState saved_lo = agent.log_std_opt;
  const OptimizerState saved_vo = agent.value_opt;

  PpoUpdateReport report;
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), 0);

  double loss_total = 0.0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.minibatch)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.minibatch));
      PpoBatch mini;
      mini.reserve(stop - start);
      for (std::size_t k = start; k < stop; ++k) mini.push_back(batch[order[k]]);

      const PpoGradients g = ppo_gradients(agent.policy, agent.value, mini, cfg);
      if (!std::isfinite(g.loss)) {
        agent.policy.mean_net.data = saved_mean;
        agent.policy.log_std = saved_log_std;
        agent.value.net.data = saved_value;
        agent.policy_opt = saved_po;
        agent.log_std_opt = saved_lo;
        agent.value_opt = saved_vo;
        report.aborted = true;
        report.diagnostic = "non-finite PPO loss at epoch " +
                            std::to_string(epoch) + ", minibatch offset " +
                            std::to_string(start);
        return report;
      }

      adam_step(agent.policy.mean_net, g.mean_net, agent.policy_opt);
      adam_step(std::span<double>(agent.policy.log_std),
                std::span<const double>(g.log_std), agent.log_std_opt);
      adam_step(agent.value.net, g.value_net, agent.value_opt);
      clamp_log_std(agent.policy);
      loss_total += g.loss;
      report.minibatches += 1;
    }
  }
  if (report.minibatches > 0) {
    report.mean_loss = loss_total / report.minibatches;
  }
  return report;
}

}  // namespace mfrl
