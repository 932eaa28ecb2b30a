#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace psurr {

using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Rng = std::mt19937_64;

enum class Activation { tanh, swish };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

/// Fully connected network stored as one flat parameter vector, laid out as
/// W0 (row-major, out x in), b0, W1, b1, ... The last layer is linear.
struct MlpParams {
  std::vector<int> layer_sizes;  // input, hidden..., output
  Activation activation = Activation::tanh;
  Vector values;

  static MlpParams zeros(std::vector<int> sizes, Activation act);
  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases; the
  /// output layer is further scaled by `output_scale`.
  static MlpParams random(std::vector<int> sizes, Activation act, Rng& rng,
                          double output_scale = 1.0);

  std::size_t num_layers() const { return layer_sizes.size() - 1; }
  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  std::size_t param_count() const { return static_cast<std::size_t>(values.size()); }

  Eigen::Map<const RowMatrix> weight(std::size_t layer) const;
  Eigen::Map<RowMatrix> weight(std::size_t layer);
  Eigen::Map<const Vector> bias(std::size_t layer) const;
  Eigen::Map<Vector> bias(std::size_t layer);

 private:
  std::size_t offset(std::size_t layer) const;
};

/// Throws std::invalid_argument on bad layer sizes.
std::size_t mlp_param_count(const std::vector<int>& sizes);

/// Per-layer activations kept for the backward pass.
struct MlpCache {
  std::vector<Vector> inputs;  // input to each layer
  std::vector<Vector> pre;     // pre-activation of each layer
};

Vector mlp_forward(const MlpParams& params, const Vector& x, MlpCache* cache = nullptr);

/// Accumulates d(objective)/d(params) into `grad` given d(objective)/d(output).
/// Returns d(objective)/d(input).
Vector mlp_backward(const MlpParams& params, const MlpCache& cache, const Vector& grad_output,
                    Eigen::Ref<Vector> grad);

}  // namespace psurr
