#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "explab/errors.hpp"
#include "explab/linalg.hpp"

namespace explab {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

struct AdamState {
  long step = 0;
  Vector first_moment;
  Vector second_moment;

  explicit AdamState(std::size_t n = 0) : first_moment(n, 0.0), second_moment(n, 0.0) {}
};

// Standard bias-corrected update, applied through aligned pointer views so
// one state covers an arbitrarily shaped parameter pack.
inline void adam_step(const std::vector<double*>& params, const std::vector<const double*>& grads,
                      AdamState& state, const AdamConfig& cfg) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size())
    throw DimensionError("adam_step: parameter, gradient, and state sizes differ");
  state.step += 1;
  const double correction1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = *grads[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
    const double mhat = m / correction1;
    const double vhat = v / correction2;
    *params[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

}  // namespace explab
