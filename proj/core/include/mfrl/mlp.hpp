#pragma once

#include <cstddef>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace mfrl {

enum class Activation { ReLU, Tanh, Linear };

/// Dense feed-forward network parameters. All weights and biases live in one
/// flat buffer, laid out layer by layer: W1 (row-major, out x in), b1, W2,
/// b2, ... The flat layout is also the on-disk snapshot order.
struct MlpParams {
  std::vector<int> layer_sizes;          // {input, hidden..., output}
  std::vector<Activation> activations;   // one per non-input layer
  std::vector<double> data;

  std::size_t layer_count() const { return activations.size(); }
  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  std::size_t param_count() const { return data.size(); }

  /// Offset of layer `l`'s weight block within `data`.
  std::size_t weight_offset(std::size_t l) const;
  std::size_t bias_offset(std::size_t l) const;
};

/// Zero-initialized network with the given architecture.
MlpParams make_mlp(std::vector<int> layer_sizes,
                   std::vector<Activation> activations);

/// Weights uniform in +/- sqrt(6 / (fan_in + fan_out)), biases zero.
MlpParams make_mlp_random(std::vector<int> layer_sizes,
                          std::vector<Activation> activations,
                          std::mt19937_64& rng);

std::vector<double> mlp_forward(const MlpParams& params,
                                std::span<const double> input);

/// Parameter gradient, shape-congruent with the MlpParams it was produced
/// from (same flat layout).
struct Gradient {
  std::vector<double> data;
};

/// Exact gradient of dot(mlp_forward(params, input), upstream) with respect
/// to every parameter.
Gradient mlp_backward(const MlpParams& params, std::span<const double> input,
                      std::span<const double> upstream);

/// Bias-corrected adaptive-moment accumulator over one flat parameter block.
struct OptimizerState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon_num = 1e-8;
};

OptimizerState make_optimizer(std::size_t param_count, double learning_rate);

void adam_step(std::span<double> params, std::span<const double> grad,
               OptimizerState& state);

inline void adam_step(MlpParams& params, const Gradient& grad,
                      OptimizerState& state) {
  adam_step(std::span<double>(params.data),
            std::span<const double>(grad.data), state);
}

/// Snapshot format: u32 layer count, u32 layer sizes, then the flat f64
/// parameter block in layer order. Little-endian, no padding.
void save_mlp(const MlpParams& params, std::ostream& out);

/// Reads a snapshot into an existing network; the stored layer sizes must
/// match `params.layer_sizes` exactly.
void load_mlp(MlpParams& params, std::istream& in);

}  // namespace mfrl
