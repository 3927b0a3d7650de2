#include "mfrl/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace mfrl {

namespace {

std::size_t total_params(const std::vector<int>& sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    n += static_cast<std::size_t>(sizes[l + 1]) * sizes[l] + sizes[l + 1];
  }
  return n;
}

void validate_arch(const std::vector<int>& sizes,
                   const std::vector<Activation>& acts) {
  if (sizes.size() < 2) throw std::invalid_argument("mlp needs >= 2 layers");
  if (acts.size() != sizes.size() - 1) {
    throw std::invalid_argument("one activation per non-input layer required");
  }
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("layer size must be >= 1");
  }
}

double activate(double x, Activation a) {
  switch (a) {
    case Activation::ReLU: return x > 0.0 ? x : 0.0;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Linear: return x;
  }
  return x;
}

// Derivative expressed through the post-activation value.
double activate_deriv(double post, Activation a) {
  switch (a) {
    case Activation::ReLU: return post > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: return 1.0 - post * post;
    case Activation::Linear: return 1.0;
  }
  return 1.0;
}

}  // namespace

std::size_t MlpParams::weight_offset(std::size_t l) const {
  std::size_t off = 0;
  for (std::size_t k = 0; k < l; ++k) {
    off += static_cast<std::size_t>(layer_sizes[k + 1]) * layer_sizes[k] +
           layer_sizes[k + 1];
  }
  return off;
}

std::size_t MlpParams::bias_offset(std::size_t l) const {
  return weight_offset(l) +
         static_cast<std::size_t>(layer_sizes[l + 1]) * layer_sizes[l];
}

MlpParams make_mlp(std::vector<int> layer_sizes,
                   std::vector<Activation> activations) {
  validate_arch(layer_sizes, activations);
  MlpParams p;
  p.layer_sizes = std::move(layer_sizes);
  p.activations = std::move(activations);
  p.data.assign(total_params(p.layer_sizes), 0.0);
  return p;
}

MlpParams make_mlp_random(std::vector<int> layer_sizes,
                          std::vector<Activation> activations,
                          std::mt19937_64& rng) {
  MlpParams p = make_mlp(std::move(layer_sizes), std::move(activations));
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    const int fan_in = p.layer_sizes[l];
    const int fan_out = p.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    const std::size_t w0 = p.weight_offset(l);
    const std::size_t nw = static_cast<std::size_t>(fan_out) * fan_in;
    for (std::size_t i = 0; i < nw; ++i) p.data[w0 + i] = dist(rng);
    // biases stay zero
  }
  return p;
}

std::vector<double> mlp_forward(const MlpParams& params,
                                std::span<const double> input) {
  if (static_cast<int>(input.size()) != params.input_size()) {
    throw std::invalid_argument("mlp_forward: input size mismatch");
  }
  std::vector<double> cur(input.begin(), input.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    const int in_dim = params.layer_sizes[l];
    const int out_dim = params.layer_sizes[l + 1];
    const double* w = params.data.data() + params.weight_offset(l);
    const double* b = params.data.data() + params.bias_offset(l);
    next.assign(out_dim, 0.0);
    for (int r = 0; r < out_dim; ++r) {
      double acc = b[r];
      const double* row = w + static_cast<std::size_t>(r) * in_dim;
      for (int c = 0; c < in_dim; ++c) acc += row[c] * cur[c];
      next[r] = activate(acc, params.activations[l]);
    }
    cur.swap(next);
  }
  return cur;
}

Gradient mlp_backward(const MlpParams& params, std::span<const double> input,
                      std::span<const double> upstream) {
  if (static_cast<int>(input.size()) != params.input_size()) {
    throw std::invalid_argument("mlp_backward: input size mismatch");
  }
  if (static_cast<int>(upstream.size()) != params.output_size()) {
    throw std::invalid_argument("mlp_backward: upstream size mismatch");
  }

  // Forward, keeping every post-activation.
  const std::size_t layers = params.layer_count();
  std::vector<std::vector<double>> acts(layers + 1);
  acts[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const int in_dim = params.layer_sizes[l];
    const int out_dim = params.layer_sizes[l + 1];
    const double* w = params.data.data() + params.weight_offset(l);
    const double* b = params.data.data() + params.bias_offset(l);
    acts[l + 1].assign(out_dim, 0.0);
    for (int r = 0; r < out_dim; ++r) {
      double acc = b[r];
      const double* row = w + static_cast<std::size_t>(r) * in_dim;
      for (int c = 0; c < in_dim; ++c) acc += row[c] * acts[l][c];
      acts[l + 1][r] = activate(acc, params.activations[l]);
    }
  }

  Gradient grad;
  grad.data.assign(params.data.size(), 0.0);

  std::vector<double> delta(upstream.begin(), upstream.end());
  for (std::size_t li = layers; li-- > 0;) {
    const int in_dim = params.layer_sizes[li];
    const int out_dim = params.layer_sizes[li + 1];
    for (int r = 0; r < out_dim; ++r) {
      delta[r] *= activate_deriv(acts[li + 1][r], params.activations[li]);
    }
    const double* w = params.data.data() + params.weight_offset(li);
    double* gw = grad.data.data() + params.weight_offset(li);
    double* gb = grad.data.data() + params.bias_offset(li);
    for (int r = 0; r < out_dim; ++r) {
      const double d = delta[r];
      double* grow = gw + static_cast<std::size_t>(r) * in_dim;
      for (int c = 0; c < in_dim; ++c) grow[c] = d * acts[li][c];
      gb[r] = d;
    }
    if (li > 0) {
      std::vector<double> prev(in_dim, 0.0);
      for (int r = 0; r < out_dim; ++r) {
        const double d = delta[r];
        const double* row = w + static_cast<std::size_t>(r) * in_dim;
        for (int c = 0; c < in_dim; ++c) prev[c] += row[c] * d;
      }
      delta.swap(prev);
    }
  }
  return grad;
}

OptimizerState make_optimizer(std::size_t param_count, double learning_rate) {
  OptimizerState s;
  s.m.assign(param_count, 0.0);
  s.v.assign(param_count, 0.0);
  s.learning_rate = learning_rate;
  return s;
}

void adam_step(std::span<double> params, std::span<const double> grad,
               OptimizerState& state) {
  if (params.size() != grad.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  state.step += 1;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon_num);
  }
}

void save_mlp(const MlpParams& params, std::ostream& out) {
  const std::uint32_t n = static_cast<std::uint32_t>(params.layer_sizes.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (int s : params.layer_sizes) {
    const std::uint32_t u = static_cast<std::uint32_t>(s);
    out.write(reinterpret_cast<const char*>(&u), sizeof(u));
  }
  out.write(reinterpret_cast<const char*>(params.data.data()),
            static_cast<std::streamsize>(params.data.size() * sizeof(double)));
  if (!out) throw std::runtime_error("save_mlp: write failed");
}

void load_mlp(MlpParams& params, std::istream& in) {
  std::uint32_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || n != params.layer_sizes.size()) {
    throw std::runtime_error("load_mlp: layer count mismatch");
  }
  for (std::size_t i = 0; i < params.layer_sizes.size(); ++i) {
    std::uint32_t u = 0;
    in.read(reinterpret_cast<char*>(&u), sizeof(u));
    if (!in || static_cast<int>(u) != params.layer_sizes[i]) {
      throw std::runtime_error("load_mlp: layer size mismatch");
    }
  }
  in.read(reinterpret_cast<char*>(params.data.data()),
          static_cast<std::streamsize>(params.data.size() * sizeof(double)));
  if (!in) throw std::runtime_error("load_mlp: truncated parameter block");
  for (double v : params.data) {
    if (!std::isfinite(v)) throw std::runtime_error("load_mlp: non-finite parameter");
  }
}

}  // namespace mfrl
