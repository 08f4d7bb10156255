#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "explab/errors.hpp"
#include "explab/linalg.hpp"
#include "explab/mlp.hpp"
#include "explab/rng.hpp"

namespace explab {

// Bootstrapped value ensemble: one shared rectified trunk feeding K
// independent linear-output heads. The trunk may be empty, in which case the
// heads run on the raw input.
struct BootstrappedNet {
  MlpParams trunk;
  std::vector<MlpParams> heads;

  int head_count() const { return static_cast<int>(heads.size()); }
  int num_actions() const { return heads.empty() ? 0 : heads.front().output_dim(); }
  int input_dim() const { return trunk.empty() ? (heads.empty() ? 0 : heads.front().input_dim()) : trunk.input_dim(); }
};

// Gradient storage mirroring a net's shape.
struct NetGrads {
  MlpParams trunk;
  std::vector<MlpParams> heads;
};

inline NetGrads zero_grads(const BootstrappedNet& net) {
  NetGrads g;
  g.trunk = zeros_like(net.trunk);
  g.heads.reserve(net.heads.size());
  for (const auto& h : net.heads) g.heads.push_back(zeros_like(h));
  return g;
}

// Heads draw from distinct derived seed streams, so they start diverse; the
// trunk has its own stream.
inline BootstrappedNet init_net(int input_dim, const std::vector<int>& hidden, int actions,
                                int head_count, std::uint64_t seed) {
  if (input_dim < 1 || actions < 1 || head_count < 1)
    throw InvalidInputError("init_net: non-positive dimension");
  BootstrappedNet net;
  int feature_dim = input_dim;
  if (!hidden.empty()) {
    std::vector<int> dims;
    dims.push_back(input_dim);
    for (int h : hidden) dims.push_back(h);
    Rng trunk_rng(derive_seed(seed, 0));
    net.trunk = init_mlp(dims, trunk_rng, /*rectified_output=*/true);
    feature_dim = hidden.back();
  }
  net.heads.reserve(static_cast<std::size_t>(head_count));
  for (int k = 0; k < head_count; ++k) {
    Rng head_rng(derive_seed(seed, static_cast<std::uint64_t>(k) + 1));
    net.heads.push_back(init_mlp({feature_dim, actions}, head_rng));
  }
  return net;
}

inline Vector forward_features(const BootstrappedNet& net, const Vector& state) {
  return mlp_forward(net.trunk, state);
}

// All head values at one state, as a head_count x actions matrix.
inline Matrix forward_all(const BootstrappedNet& net, const Vector& state) {
  const Vector features = forward_features(net, state);
  Matrix q(net.heads.size(), static_cast<std::size_t>(net.num_actions()));
  for (std::size_t k = 0; k < net.heads.size(); ++k) {
    const Vector out = mlp_forward(net.heads[k], features);
    for (std::size_t a = 0; a < out.size(); ++a) q(k, a) = out[a];
  }
  return q;
}

inline Vector forward_head(const BootstrappedNet& net, const Vector& state, int head) {
  if (head < 0 || head >= net.head_count()) throw InvalidInputError("forward_head: head out of range");
  return mlp_forward(net.heads[static_cast<std::size_t>(head)], forward_features(net, state));
}

// Population standard deviation (1/K weighting) of one column of a values
// matrix; this is the ensemble disagreement used as the exploration bonus.
inline double column_disagreement(const Matrix& values, std::size_t column) {
  const std::size_t k = values.rows;
  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) mean += values(i, column);
  mean /= static_cast<double>(k);
  double var = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = values(i, column) - mean;
    var += d * d;
  }
  return std::sqrt(var / static_cast<double>(k));
}

inline double ucb_bonus(const BootstrappedNet& net, const Vector& state, int action) {
  if (action < 0 || action >= net.num_actions()) throw InvalidInputError("ucb_bonus: action out of range");
  const Matrix q = forward_all(net, state);
  return column_disagreement(q, static_cast<std::size_t>(action));
}

// Mean head value plus alpha times disagreement, per action.
inline Vector optimistic_q(const BootstrappedNet& net, const Vector& state, double alpha) {
  const Matrix q = forward_all(net, state);
  Vector out(q.cols, 0.0);
  for (std::size_t a = 0; a < q.cols; ++a) {
    double mean = 0.0;
    for (std::size_t k = 0; k < q.rows; ++k) mean += q(k, a);
    mean /= static_cast<double>(q.rows);
    out[a] = mean + alpha * column_disagreement(q, a);
  }
  return out;
}

// Mean squared error over all heads and steps at the taken actions:
// (1/T) sum_k sum_t (targets[k,t] - Q_k(s_t, a_t))^2. Pure forward version,
// used by finite-difference checks.
inline double ensemble_mse_loss(const BootstrappedNet& net, const std::vector<Vector>& states,
                                const std::vector<int>& actions, const Matrix& targets) {
  const std::size_t length = states.size();
  if (actions.size() != length || targets.cols != length ||
      targets.rows != net.heads.size())
    throw DimensionError("ensemble_mse_loss: shape mismatch");
  if (length == 0) throw InvalidInputError("ensemble_mse_loss: empty batch");
  double loss = 0.0;
  for (std::size_t t = 0; t < length; ++t) {
    const Vector features = forward_features(net, states[t]);
    for (std::size_t k = 0; k < net.heads.size(); ++k) {
      const Vector out = mlp_forward(net.heads[k], features);
      const double diff = targets(k, t) - out[static_cast<std::size_t>(actions[t])];
      loss += diff * diff;
    }
  }
  return loss / static_cast<double>(length);
}

// Rescales all gradients so their joint L2 norm is at most limit. Returns the
// norm before clipping.
inline double clip_global_norm(NetGrads& grads, double limit) {
  double sq = 0.0;
  auto accumulate = [&sq](const MlpParams& p) {
    for (const auto& layer : p.layers) {
      for (double w : layer.weight.data) sq += w * w;
      for (double b : layer.bias) sq += b * b;
    }
  };
  accumulate(grads.trunk);
  for (const auto& h : grads.heads) accumulate(h);
  const double norm = std::sqrt(sq);
  if (norm > limit && norm > 0.0) {
    const double factor = limit / norm;
    scale_params(grads.trunk, factor);
    for (auto& h : grads.heads) scale_params(h, factor);
  }
  return norm;
}

struct BackpropResult {
  double loss = 0.0;
  NetGrads grads;
};

// Backprop of ensemble_mse_loss. Per-head gradients flow straight into the
// heads; the gradient reaching the shared trunk is scaled by 1/K before the
// trunk pass, then everything is clipped at clip_limit jointly.
inline BackpropResult backprop_mse(const BootstrappedNet& net, const std::vector<Vector>& states,
                                   const std::vector<int>& actions, const Matrix& targets,
                                   double clip_limit = 10.0) {
  const std::size_t length = states.size();
  const std::size_t k_heads = net.heads.size();
  if (actions.size() != length || targets.cols != length || targets.rows != k_heads)
    throw DimensionError("backprop_mse: shape mismatch");
  if (length == 0) throw InvalidInputError("backprop_mse: empty batch");
  BackpropResult result;
  result.grads = zero_grads(net);
  const double scale = 2.0 / static_cast<double>(length);
  const bool has_trunk = !net.trunk.empty();
  double loss = 0.0;
  for (std::size_t t = 0; t < length; ++t) {
    const int action = actions[t];
    if (action < 0 || action >= net.num_actions())
      throw InvalidInputError("backprop_mse: action out of range");
    MlpForwardCache trunk_cache;
    const Vector* features = &states[t];
    if (has_trunk) {
      trunk_cache = mlp_forward_cached(net.trunk, states[t]);
      features = &trunk_cache.output;
    }
    Vector feature_grad(features->size(), 0.0);
    for (std::size_t k = 0; k < k_heads; ++k) {
      const MlpForwardCache head_cache = mlp_forward_cached(net.heads[k], *features);
      const double q = head_cache.output[static_cast<std::size_t>(action)];
      const double diff = q - targets(k, t);
      loss += diff * diff;
      Vector grad_out(head_cache.output.size(), 0.0);
      grad_out[static_cast<std::size_t>(action)] = scale * diff;
      const Vector into_features =
          mlp_backward(net.heads[k], head_cache, grad_out, result.grads.heads[k]);
      if (has_trunk)
        for (std::size_t i = 0; i < feature_grad.size(); ++i) feature_grad[i] += into_features[i];
    }
    if (has_trunk) {
      for (double& g : feature_grad) g /= static_cast<double>(k_heads);
      mlp_backward(net.trunk, trunk_cache, feature_grad, result.grads.trunk);
    }
  }
  result.loss = loss / static_cast<double>(length);
  if (!std::isfinite(result.loss)) throw TrainingDivergence("backprop_mse: non-finite loss");
  clip_global_norm(result.grads, clip_limit);
  auto check = [](const MlpParams& p) {
    for (const auto& layer : p.layers)
      if (!all_finite(layer.weight) || !all_finite(layer.bias))
        throw TrainingDivergence("backprop_mse: non-finite gradient");
  };
  check(result.grads.trunk);
  for (const auto& h : result.grads.heads) check(h);
  return result;
}

inline BootstrappedNet sync_target(const BootstrappedNet& net) { return net; }

inline std::size_t net_param_count(const BootstrappedNet& net) {
  std::size_t n = param_count(net.trunk);
  for (const auto& h : net.heads) n += param_count(h);
  return n;
}

inline std::vector<double*> net_param_view(BootstrappedNet& net) {
  std::vector<double*> view;
  view.reserve(net_param_count(net));
  collect_params(net.trunk, view);
  for (auto& h : net.heads) collect_params(h, view);
  return view;
}

inline std::vector<const double*> grad_view(const NetGrads& grads) {
  std::vector<const double*> view;
  collect_params(grads.trunk, view);
  for (const auto& h : grads.heads) collect_params(h, view);
  return view;
}

// Checkpoints are a raw little-endian double dump in parameter-view order
// plus a JSON shape manifest; load rejects any shape or size mismatch.
inline void save_checkpoint(const BootstrappedNet& net, const std::string& base_path) {
  nlohmann::json manifest;
  manifest["format"] = "explab-net-v1";
  std::vector<int> trunk_dims;
  if (!net.trunk.empty()) {
    trunk_dims.push_back(net.trunk.input_dim());
    for (const auto& layer : net.trunk.layers) trunk_dims.push_back(static_cast<int>(layer.weight.rows));
  }
  manifest["trunk_dims"] = trunk_dims;
  std::vector<int> head_dims;
  head_dims.push_back(net.heads.front().input_dim());
  for (const auto& layer : net.heads.front().layers)
    head_dims.push_back(static_cast<int>(layer.weight.rows));
  manifest["head_dims"] = head_dims;
  manifest["heads"] = net.head_count();
  manifest["param_count"] = net_param_count(net);
  std::ofstream mout(base_path + ".json");
  if (!mout) throw InvalidInputError("save_checkpoint: cannot open " + base_path + ".json");
  mout << manifest.dump(2) << "\n";
  std::ofstream bout(base_path + ".bin", std::ios::binary);
  if (!bout) throw InvalidInputError("save_checkpoint: cannot open " + base_path + ".bin");
  std::vector<const double*> view;
  collect_params(net.trunk, view);
  for (const auto& h : net.heads) collect_params(h, view);
  for (const double* p : view)
    bout.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(sizeof(double)));
}

inline BootstrappedNet load_checkpoint(const std::string& base_path) {
  std::ifstream min(base_path + ".json");
  if (!min) throw InvalidInputError("load_checkpoint: cannot open " + base_path + ".json");
  nlohmann::json manifest;
  try {
    min >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("load_checkpoint: ") + e.what());
  }
  if (manifest.value("format", "") != "explab-net-v1")
    throw ConfigError("load_checkpoint: unknown format");
  const auto trunk_dims = manifest.at("trunk_dims").get<std::vector<int>>();
  const auto head_dims = manifest.at("head_dims").get<std::vector<int>>();
  const int heads = manifest.at("heads").get<int>();
  if (heads < 1 || head_dims.size() < 2) throw ConfigError("load_checkpoint: bad shape manifest");
  BootstrappedNet net;
  auto build = [](const std::vector<int>& dims, bool rectified) {
    MlpParams p;
    p.rectified_output = rectified;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      MlpLayer layer;
      layer.weight = Matrix(static_cast<std::size_t>(dims[l + 1]), static_cast<std::size_t>(dims[l]));
      layer.bias = Vector(static_cast<std::size_t>(dims[l + 1]), 0.0);
      p.layers.push_back(std::move(layer));
    }
    return p;
  };
  if (trunk_dims.size() >= 2) net.trunk = build(trunk_dims, true);
  for (int k = 0; k < heads; ++k) net.heads.push_back(build(head_dims, false));
  const auto expected = manifest.at("param_count").get<std::size_t>();
  if (net_param_count(net) != expected)
    throw ConfigError("load_checkpoint: parameter count inconsistent with shapes");
  std::ifstream bin(base_path + ".bin", std::ios::binary);
  if (!bin) throw InvalidInputError("load_checkpoint: cannot open " + base_path + ".bin");
  const std::vector<double*> view = net_param_view(net);
  for (double* p : view) {
    bin.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(sizeof(double)));
    if (!bin) throw ConfigError("load_checkpoint: binary shorter than manifest shape");
  }
  char extra;
  bin.read(&extra, 1);
  if (!bin.eof()) throw ConfigError("load_checkpoint: binary longer than manifest shape");
  return net;
}

}  // namespace explab
