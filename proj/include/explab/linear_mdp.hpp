#pragma once

#include <cstdint>
#include <vector>

#include "explab/errors.hpp"
#include "explab/linalg.hpp"
#include "explab/rng.hpp"

namespace explab {

// Finite MDP with a feature map phi(s, a). With one-hot tabular features any
// finite MDP is exactly linear, which is what the solver verification needs.
struct LinearMdpSpec {
  int num_states = 0;
  int num_actions = 0;
  int feature_dim = 0;
  int horizon = 0;
  int start_state = 0;
  std::vector<Vector> features;  // indexed s * num_actions + a, each length feature_dim
  Matrix transition;             // (num_states * num_actions) x num_states, rows sum to 1
  Vector reward;                 // num_states * num_actions, values in [0, 1]

  const Vector& phi(int s, int a) const {
    return features[static_cast<std::size_t>(s) * num_actions + a];
  }
  double r(int s, int a) const { return reward[static_cast<std::size_t>(s) * num_actions + a]; }
};

inline void validate(const LinearMdpSpec& spec) {
  if (spec.num_states < 1 || spec.num_actions < 1 || spec.horizon < 1)
    throw InvalidInputError("linear mdp: empty state, action, or horizon");
  const std::size_t pairs = static_cast<std::size_t>(spec.num_states) * spec.num_actions;
  if (spec.features.size() != pairs || spec.reward.size() != pairs)
    throw DimensionError("linear mdp: feature or reward table size mismatch");
  if (spec.transition.rows != pairs || spec.transition.cols != static_cast<std::size_t>(spec.num_states))
    throw DimensionError("linear mdp: transition table size mismatch");
  for (const auto& f : spec.features) {
    if (f.size() != static_cast<std::size_t>(spec.feature_dim))
      throw DimensionError("linear mdp: feature length mismatch");
    if (dot(f, f) > 1.0 + 1e-9) throw InvalidInputError("linear mdp: feature norm exceeds 1");
  }
  for (std::size_t row = 0; row < pairs; ++row) {
    double sum = 0.0;
    for (int s = 0; s < spec.num_states; ++s) {
      const double p = spec.transition(row, s);
      if (p < 0.0) throw InvalidInputError("linear mdp: negative transition probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidInputError("linear mdp: transition row does not sum to 1");
  }
  for (double r : spec.reward)
    if (r < 0.0 || r > 1.0) throw InvalidInputError("linear mdp: reward outside [0, 1]");
}

struct MdpStep {
  int next_state = 0;
  double reward = 0.0;
};

inline MdpStep linear_mdp_step(const LinearMdpSpec& spec, int state, int action, Rng& rng) {
  if (state < 0 || state >= spec.num_states || action < 0 || action >= spec.num_actions)
    throw InvalidInputError("linear_mdp_step: state or action out of range");
  const std::size_t row = static_cast<std::size_t>(state) * spec.num_actions + action;
  const double u = rng.uniform();
  double acc = 0.0;
  int next = spec.num_states - 1;
  for (int s = 0; s < spec.num_states; ++s) {
    acc += spec.transition(row, s);
    if (u < acc) {
      next = s;
      break;
    }
  }
  return {next, spec.reward[row]};
}

// Exhaustive finite-horizon dynamic programming. Returns optimal action
// values q[t][s][a] for t in [0, horizon); ties resolve to the lowest index
// everywhere downstream.
inline std::vector<Matrix> solve_mdp_exact(const LinearMdpSpec& spec) {
  validate(spec);
  std::vector<Matrix> q(static_cast<std::size_t>(spec.horizon),
                        Matrix(static_cast<std::size_t>(spec.num_states),
                               static_cast<std::size_t>(spec.num_actions)));
  for (int t = spec.horizon - 1; t >= 0; --t) {
    for (int s = 0; s < spec.num_states; ++s) {
      for (int a = 0; a < spec.num_actions; ++a) {
        const std::size_t row = static_cast<std::size_t>(s) * spec.num_actions + a;
        double value = spec.reward[row];
        if (t + 1 < spec.horizon) {
          for (int s2 = 0; s2 < spec.num_states; ++s2) {
            const double p = spec.transition(row, s2);
            if (p == 0.0) continue;
            double best = q[t + 1](s2, 0);
            for (int a2 = 1; a2 < spec.num_actions; ++a2) best = std::max(best, q[t + 1](s2, a2));
            value += p * best;
          }
        }
        q[t](s, a) = value;
      }
    }
  }
  return q;
}

inline int optimal_action(const std::vector<Matrix>& q, int t, int s) {
  int best = 0;
  for (std::size_t a = 1; a < q[t].cols; ++a)
    if (q[t](s, a) > q[t](s, best)) best = static_cast<int>(a);
  return best;
}

inline double optimal_return(const LinearMdpSpec& spec) {
  const auto q = solve_mdp_exact(spec);
  double best = q[0](spec.start_state, 0);
  for (int a = 1; a < spec.num_actions; ++a) best = std::max(best, q[0](spec.start_state, a));
  return best;
}

// One-hot tabular feature table: phi(s, a) = e_{s * A + a}, d = S * A.
inline std::vector<Vector> one_hot_features(int num_states, int num_actions) {
  const int d = num_states * num_actions;
  std::vector<Vector> f(static_cast<std::size_t>(d), Vector(static_cast<std::size_t>(d), 0.0));
  for (int i = 0; i < d; ++i) f[i][i] = 1.0;
  return f;
}

// Three-state, two-action, horizon-3 chain where myopic greed is strictly
// suboptimal: action 1 from the start forgoes reward now to reach the high
// paying terminal state. Deterministic transitions, unique optimum.
inline LinearMdpSpec explore_chain_mdp() {
  LinearMdpSpec spec;
  spec.num_states = 3;
  spec.num_actions = 2;
  spec.horizon = 3;
  spec.start_state = 0;
  spec.feature_dim = 6;
  spec.features = one_hot_features(3, 2);
  spec.transition = Matrix(6, 3);
  spec.reward = Vector(6, 0.0);
  auto set = [&](int s, int a, int next, double r) {
    const std::size_t row = static_cast<std::size_t>(s) * 2 + a;
    spec.transition(row, next) = 1.0;
    spec.reward[row] = r;
  };
  set(0, 0, 0, 0.2);
  set(0, 1, 1, 0.0);
  set(1, 0, 1, 0.2);
  set(1, 1, 2, 0.1);
  set(2, 0, 2, 0.3);
  set(2, 1, 2, 1.0);
  validate(spec);
  return spec;
}

}  // namespace explab
