#pragma once

#include <cstddef>
#include <vector>

#include "explab/errors.hpp"
#include "explab/linalg.hpp"
#include "explab/rng.hpp"

namespace explab {

// Multilayer perceptron with rectifier activations on hidden layers and an
// identity output. Setting rectified_output makes the final layer rectified
// too, which is how a feature trunk feeds linear heads.
struct MlpLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

struct MlpParams {
  std::vector<MlpLayer> layers;
  bool rectified_output = false;

  bool empty() const { return layers.empty(); }
  int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols); }
  int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows); }
};

// Fan-in scaled uniform init, U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights
// and biases alike.
inline MlpParams init_mlp(const std::vector<int>& dims, Rng& rng, bool rectified_output = false) {
  if (dims.size() < 2) throw InvalidInputError("init_mlp: need at least input and output dims");
  MlpParams params;
  params.rectified_output = rectified_output;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l] < 1 || dims[l + 1] < 1) throw InvalidInputError("init_mlp: non-positive layer width");
    MlpLayer layer;
    layer.weight = Matrix(static_cast<std::size_t>(dims[l + 1]), static_cast<std::size_t>(dims[l]));
    layer.bias = Vector(static_cast<std::size_t>(dims[l + 1]), 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    for (double& w : layer.weight.data) w = rng.uniform(-bound, bound);
    for (double& b : layer.bias) b = rng.uniform(-bound, bound);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

namespace detail {
inline bool layer_is_rectified(const MlpParams& params, std::size_t l) {
  return l + 1 < params.layers.size() || params.rectified_output;
}
}  // namespace detail

// Plain forward pass. An empty parameter set is the identity map, which lets
// heads run directly on raw inputs when there is no trunk.
inline Vector mlp_forward(const MlpParams& params, const Vector& input) {
  if (params.empty()) return input;
  if (static_cast<int>(input.size()) != params.input_dim())
    throw DimensionError("mlp_forward: input size mismatch");
  Vector x = input;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const MlpLayer& layer = params.layers[l];
    Vector y(layer.bias);
    const double* wrow = layer.weight.data.data();
    for (std::size_t i = 0; i < layer.weight.rows; ++i, wrow += layer.weight.cols) {
      double s = 0.0;
      for (std::size_t j = 0; j < layer.weight.cols; ++j) s += wrow[j] * x[j];
      y[i] += s;
    }
    if (detail::layer_is_rectified(params, l))
      for (double& v : y)
        if (v < 0.0) v = 0.0;
    x = std::move(y);
  }
  return x;
}

// Forward pass retaining per-layer inputs and pre-activations for backprop.
struct MlpForwardCache {
  std::vector<Vector> inputs;  // input to each layer
  std::vector<Vector> pre;     // pre-activation output of each layer
  Vector output;
};

inline MlpForwardCache mlp_forward_cached(const MlpParams& params, const Vector& input) {
  MlpForwardCache cache;
  if (params.empty()) {
    cache.output = input;
    return cache;
  }
  if (static_cast<int>(input.size()) != params.input_dim())
    throw DimensionError("mlp_forward_cached: input size mismatch");
  Vector x = input;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const MlpLayer& layer = params.layers[l];
    cache.inputs.push_back(x);
    Vector y(layer.bias);
    const double* wrow = layer.weight.data.data();
    for (std::size_t i = 0; i < layer.weight.rows; ++i, wrow += layer.weight.cols) {
      double s = 0.0;
      for (std::size_t j = 0; j < layer.weight.cols; ++j) s += wrow[j] * x[j];
      y[i] += s;
    }
    cache.pre.push_back(y);
    if (detail::layer_is_rectified(params, l))
      for (double& v : y)
        if (v < 0.0) v = 0.0;
    x = std::move(y);
  }
  cache.output = std::move(x);
  return cache;
}

// Accumulates dLoss/dParams into grads (same shape as params) given
// dLoss/dOutput, and returns dLoss/dInput. Rectifier subgradient at zero is
// zero.
inline Vector mlp_backward(const MlpParams& params, const MlpForwardCache& cache,
                           const Vector& grad_output, MlpParams& grads) {
  if (params.empty()) return grad_output;
  if (grads.layers.size() != params.layers.size())
    throw DimensionError("mlp_backward: gradient shape mismatch");
  Vector g = grad_output;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const MlpLayer& layer = params.layers[l];
    const Vector& pre = cache.pre[l];
    const Vector& x = cache.inputs[l];
    if (g.size() != layer.bias.size()) throw DimensionError("mlp_backward: grad size mismatch");
    Vector dpre = g;
    if (detail::layer_is_rectified(params, l))
      for (std::size_t i = 0; i < dpre.size(); ++i)
        if (pre[i] <= 0.0) dpre[i] = 0.0;
    MlpLayer& glayer = grads.layers[l];
    double* gw = glayer.weight.data.data();
    for (std::size_t i = 0; i < layer.weight.rows; ++i, gw += layer.weight.cols) {
      const double di = dpre[i];
      glayer.bias[i] += di;
      if (di == 0.0) continue;
      for (std::size_t j = 0; j < layer.weight.cols; ++j) gw[j] += di * x[j];
    }
    Vector gprev(layer.weight.cols, 0.0);
    const double* wrow = layer.weight.data.data();
    for (std::size_t i = 0; i < layer.weight.rows; ++i, wrow += layer.weight.cols) {
      const double di = dpre[i];
      if (di == 0.0) continue;
      for (std::size_t j = 0; j < layer.weight.cols; ++j) gprev[j] += di * wrow[j];
    }
    g = std::move(gprev);
  }
  return g;
}

inline MlpParams zeros_like(const MlpParams& params) {
  MlpParams z = params;
  for (auto& layer : z.layers) {
    std::fill(layer.weight.data.begin(), layer.weight.data.end(), 0.0);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
  return z;
}

inline void scale_params(MlpParams& params, double factor) {
  for (auto& layer : params.layers) {
    for (double& w : layer.weight.data) w *= factor;
    for (double& b : layer.bias) b *= factor;
  }
}

inline std::size_t param_count(const MlpParams& params) {
  std::size_t n = 0;
  for (const auto& layer : params.layers) n += layer.weight.data.size() + layer.bias.size();
  return n;
}

// Flat pointer view in a fixed order (per layer: weights then bias); the
// optimizer and checkpoint code index parameters through this.
inline void collect_params(MlpParams& params, std::vector<double*>& out) {
  for (auto& layer : params.layers) {
    for (double& w : layer.weight.data) out.push_back(&w);
    for (double& b : layer.bias) out.push_back(&b);
  }
}

inline void collect_params(const MlpParams& params, std::vector<const double*>& out) {
  for (const auto& layer : params.layers) {
    for (const double& w : layer.weight.data) out.push_back(&w);
    for (const double& b : layer.bias) out.push_back(&b);
  }
}

}  // namespace explab
