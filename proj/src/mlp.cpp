#include "psurr/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace psurr {

namespace {

double activate(Activation a, double x) {
  if (a == Activation::tanh) return std::tanh(x);
  return x / (1.0 + std::exp(-x));
}

double activate_grad(Activation a, double x) {
  if (a == Activation::tanh) {
    const double t = std::tanh(x);
    return 1.0 - t * t;
  }
  const double s = 1.0 / (1.0 + std::exp(-x));
  return s * (1.0 + x * (1.0 - s));
}

}  // namespace

std::string_view to_string(Activation a) { return a == Activation::tanh ? "tanh" : "swish"; }

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "swish") return Activation::swish;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

std::size_t mlp_param_count(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("an MLP needs at least input and output sizes");
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    if (sizes[i] <= 0 || sizes[i + 1] <= 0) throw std::invalid_argument("layer sizes must be positive");
    n += static_cast<std::size_t>(sizes[i + 1]) * static_cast<std::size_t>(sizes[i] + 1);
  }
  return n;
}

MlpParams MlpParams::zeros(std::vector<int> sizes, Activation act) {
  MlpParams p;
  const std::size_t n = mlp_param_count(sizes);
  p.layer_sizes = std::move(sizes);
  p.activation = act;
  p.values = Vector::Zero(static_cast<Eigen::Index>(n));
  return p;
}

MlpParams MlpParams::random(std::vector<int> sizes, Activation act, Rng& rng, double output_scale) {
  MlpParams p = zeros(std::move(sizes), act);
  for (std::size_t l = 0; l < p.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(p.layer_sizes[l]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    auto w = p.weight(l);
    const double scale = l + 1 == p.num_layers() ? output_scale : 1.0;
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = scale * dist(rng);
    }
  }
  return p;
}

std::size_t MlpParams::offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < layer; ++i) {
    off += static_cast<std::size_t>(layer_sizes[i + 1]) * static_cast<std::size_t>(layer_sizes[i] + 1);
  }
  return off;
}

Eigen::Map<const RowMatrix> MlpParams::weight(std::size_t layer) const {
  return {values.data() + offset(layer), layer_sizes[layer + 1], layer_sizes[layer]};
}

Eigen::Map<RowMatrix> MlpParams::weight(std::size_t layer) {
  return {values.data() + offset(layer), layer_sizes[layer + 1], layer_sizes[layer]};
}

Eigen::Map<const Vector> MlpParams::bias(std::size_t layer) const {
  const std::size_t w = static_cast<std::size_t>(layer_sizes[layer + 1]) * layer_sizes[layer];
  return {values.data() + offset(layer) + w, layer_sizes[layer + 1]};
}

Eigen::Map<Vector> MlpParams::bias(std::size_t layer) {
  const std::size_t w = static_cast<std::size_t>(layer_sizes[layer + 1]) * layer_sizes[layer];
  return {values.data() + offset(layer) + w, layer_sizes[layer + 1]};
}

Vector mlp_forward(const MlpParams& params, const Vector& x, MlpCache* cache) {
  if (x.size() != params.input_dim()) {
    throw std::invalid_argument("mlp_forward: input has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(params.input_dim()));
  }
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  Vector h = x;
  const std::size_t n = params.num_layers();
  for (std::size_t l = 0; l < n; ++l) {
    Vector z = params.weight(l) * h + params.bias(l);
    if (cache) {
      cache->inputs.push_back(h);
      cache->pre.push_back(z);
    }
    if (l + 1 < n) {
      h = z.unaryExpr([a = params.activation](double v) { return activate(a, v); });
    } else {
      h = std::move(z);
    }
  }
  return h;
}

Vector mlp_backward(const MlpParams& params, const MlpCache& cache, const Vector& grad_output,
                    Eigen::Ref<Vector> grad) {
  const std::size_t n = params.num_layers();
  if (cache.inputs.size() != n) throw std::invalid_argument("mlp_backward: cache does not match network");
  if (grad.size() != params.values.size()) throw std::invalid_argument("mlp_backward: gradient size mismatch");

  Vector delta = grad_output;
  for (std::size_t l = n; l-- > 0;) {
    if (l + 1 < n) {
      delta = delta.cwiseProduct(
          cache.pre[l].unaryExpr([a = params.activation](double v) { return activate_grad(a, v); }));
    }
    const auto rows = params.layer_sizes[l + 1];
    const auto cols = params.layer_sizes[l];
    std::size_t off = 0;
    for (std::size_t i = 0; i < l; ++i) {
      off += static_cast<std::size_t>(params.layer_sizes[i + 1]) * (params.layer_sizes[i] + 1);
    }
    Eigen::Map<RowMatrix> gw(grad.data() + off, rows, cols);
    Eigen::Map<Vector> gb(grad.data() + off + static_cast<std::size_t>(rows) * cols, rows);
    gw.noalias() += delta * cache.inputs[l].transpose();
    gb += delta;
    delta = params.weight(l).transpose() * delta;
  }
  return delta;
}

}  // namespace psurr
