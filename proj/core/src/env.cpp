#include "mfrl/env.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mfrl/mlp.hpp"

namespace mfrl {

namespace {

// Objective without the validity gate; this is what the low-fidelity models
// approximate, since they regress the objective and cannot see buildability.
double objective_ungated(const DesignVector& x) {
  const double d_frac = 1.0 - (x[0] - x[1]) * (x[0] - x[1]);
  const double speed = 0.5 + 0.5 * x[2];
  const double error = 0.5 * x[3];
  return d_frac * speed * (1.0 - error);
}

}  // namespace

CostLedger make_ledger(const EnvConfig& cfg) {
  CostLedger ledger;
  ledger.unit_costs[index_of(FidelityId::LF1)] = cfg.lf_cost;
  ledger.unit_costs[index_of(FidelityId::LF2)] = cfg.lf_cost;
  ledger.unit_costs[index_of(FidelityId::HF)] = cfg.hf_cost;
  return ledger;
}

EvaluationResult hf_evaluate(const DesignVector& x, const EnvConfig& cfg) {
  EvaluationResult out;
  out.valid = (x[1] + x[2] <= cfg.validity_threshold);
  out.q = out.valid ? objective_ungated(x) : 0.0;
  return out;
}

EvaluationResult lf_evaluate(int which, const DesignVector& x,
                             const EnvConfig& cfg) {
  if (which != 1 && which != 2) {
    throw std::invalid_argument("lf_evaluate: model index must be 1 or 2");
  }
  const double bias = (which == 1)
                          ? cfg.bias_magnitude * std::max(0.0, x[0] - 0.5)
                          : cfg.bias_magnitude * std::max(0.0, 0.5 - x[0]);
  EvaluationResult out;
  out.valid = true;
  out.q = std::clamp(objective_ungated(x) + bias, 0.0, 1.0);
  return out;
}

double step_reward(double q_prev, const EvaluationResult& result,
                   double invalid_penalty) {
  return result.q - q_prev - (result.valid ? 0.0 : invalid_penalty);
}

DesignVector sample_seed_design(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DesignVector x;
  for (std::size_t i = 0; i < kDesignDim; ++i) x.x[i] = unit(rng);
  return x;
}

MultiFidelityEnv make_analytic_env(const EnvConfig& cfg) {
  MultiFidelityEnv env;
  env.config = cfg;
  env.models[index_of(FidelityId::LF1)] = FidelityModel{
      FidelityId::LF1,
      [cfg](const DesignVector& x) { return lf_evaluate(1, x, cfg); },
      cfg.lf_cost};
  env.models[index_of(FidelityId::LF2)] = FidelityModel{
      FidelityId::LF2,
      [cfg](const DesignVector& x) { return lf_evaluate(2, x, cfg); },
      cfg.lf_cost};
  env.models[index_of(FidelityId::HF)] = FidelityModel{
      FidelityId::HF,
      [cfg](const DesignVector& x) { return hf_evaluate(x, cfg); },
      cfg.hf_cost};
  return env;
}

FidelityModel fit_regional_surrogate(const RegionPredicate& region,
                                     int n_samples, std::mt19937_64& rng,
                                     FidelityId id, const EnvConfig& cfg) {
  if (n_samples < 1) {
    throw std::invalid_argument("fit_regional_surrogate: n_samples must be >= 1");
  }

  std::vector<DesignVector> xs;
  std::vector<double> ys;
  xs.reserve(n_samples);
  ys.reserve(n_samples);
  const long long max_attempts = 100LL * n_samples;
  long long attempts = 0;
  while (static_cast<int>(xs.size()) < n_samples) {
    if (attempts++ >= max_attempts) {
      throw std::runtime_error(
          "fit_regional_surrogate: region rejection sampling exceeded attempt budget");
    }
    DesignVector x = sample_seed_design(rng);
    if (!region(x)) continue;
    ys.push_back(hf_evaluate(x, cfg).q);
    xs.push_back(x);
  }

  MlpParams net = make_mlp_random(
      {static_cast<int>(kDesignDim), 64, 32, 1},
      {Activation::ReLU, Activation::ReLU, Activation::Linear}, rng);
  OptimizerState opt = make_optimizer(net.param_count(), 1e-3);

  const int epochs = 200;
  const std::size_t minibatch = 32;
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  Gradient grad;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += minibatch) {
      const std::size_t stop = std::min(order.size(), start + minibatch);
      grad.data.assign(net.param_count(), 0.0);
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (std::size_t k = start; k < stop; ++k) {
        const auto& x = xs[order[k]];
        const double pred = mlp_forward(net, x.x)[0];
        const std::array<double, 1> upstream{2.0 * (pred - ys[order[k]]) * inv};
        const Gradient g = mlp_backward(net, x.x, upstream);
        for (std::size_t i = 0; i < grad.data.size(); ++i) {
          grad.data[i] += g.data[i];
        }
      }
      adam_step(net, grad, opt);
    }
  }

  auto shared_net = std::make_shared<MlpParams>(std::move(net));
  FidelityModel model;
  model.id = id;
  model.unit_cost = cfg.lf_cost;
  model.evaluate = [shared_net](const DesignVector& x) {
    EvaluationResult out;
    out.valid = true;
    out.q = std::clamp(mlp_forward(*shared_net, x.x)[0], 0.0, 1.0);
    return out;
  };
  return model;
}

}  // namespace mfrl
