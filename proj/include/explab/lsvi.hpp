#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "explab/errors.hpp"
#include "explab/linalg.hpp"
#include "explab/linear_mdp.hpp"
#include "explab/rng.hpp"

namespace explab {

// Fitted state of the value-iteration solver at one timestep: regularized
// Gram matrix, its inverse, and ridge weights. Kept together because every
// query needs the trio plus the clipping horizon.
struct GramState {
  Matrix gram;
  Matrix gram_inverse;
  Vector weights;
  double lambda = 1.0;
  double alpha = 1.0;
  int horizon = 1;

  static GramState fresh(int feature_dim, double lambda, double alpha, int horizon) {
    GramState g;
    g.gram = Matrix::scaled_identity(static_cast<std::size_t>(feature_dim), lambda);
    g.gram_inverse = Matrix::scaled_identity(static_cast<std::size_t>(feature_dim), 1.0 / lambda);
    g.weights = Vector(static_cast<std::size_t>(feature_dim), 0.0);
    g.lambda = lambda;
    g.alpha = alpha;
    g.horizon = horizon;
    return g;
  }
};

// Exploration bonus alpha * sqrt(phi^T Lambda^{-1} phi).
inline double ucb_bonus_linear(const GramState& state, const Vector& phi) {
  return state.alpha * std::sqrt(quad_form(state.gram_inverse, phi));
}

// Optimistic value min{ w^T phi + bonus, horizon }.
inline double q_value(const GramState& state, const Vector& phi) {
  const double raw = dot(state.weights, phi) + ucb_bonus_linear(state, phi);
  return std::min(raw, static_cast<double>(state.horizon));
}

// Highest optimistic value among candidate action features; ties resolve to
// the lowest action index.
inline int greedy_action_linear(const GramState& state, const std::vector<Vector>& action_features) {
  if (action_features.empty()) throw InvalidInputError("greedy_action_linear: no candidates");
  int best = 0;
  double best_q = q_value(state, action_features[0]);
  for (std::size_t a = 1; a < action_features.size(); ++a) {
    const double q = q_value(state, action_features[a]);
    if (q > best_q) {
      best = static_cast<int>(a);
      best_q = q;
    }
  }
  return best;
}

// Everything the backward pass needs from one executed step: the feature of
// the taken action, the reward, and the features of every action at the next
// state (empty at the last step of an episode).
struct LsviStepRecord {
  Vector phi;
  double reward = 0.0;
  std::vector<Vector> next_action_features;
};

struct LsviHistory {
  int horizon = 0;
  int feature_dim = 0;
  std::vector<std::vector<LsviStepRecord>> episodes;  // episodes[m][t]
};

// Full-history least-squares value iteration with optimism. Rebuilds every
// per-step Gram matrix from all recorded episodes, then regresses each step's
// targets r + max_a Q_{t+1} backward from the horizon.
inline std::vector<GramState> lsvi_backward_pass(const LsviHistory& history, double lambda,
                                                 double alpha, int horizon) {
  if (horizon < 1) throw InvalidInputError("lsvi_backward_pass: horizon must be positive");
  if (!(lambda > 0.0)) throw InvalidInputError("lsvi_backward_pass: lambda must be positive");
  const int d = history.feature_dim;
  std::vector<GramState> states(static_cast<std::size_t>(horizon),
                                GramState::fresh(d, lambda, alpha, horizon));
  for (int t = horizon - 1; t >= 0; --t) {
    GramState& gs = states[static_cast<std::size_t>(t)];
    Vector rhs(static_cast<std::size_t>(d), 0.0);
    for (const auto& episode : history.episodes) {
      if (t >= static_cast<int>(episode.size())) continue;
      const LsviStepRecord& step = episode[static_cast<std::size_t>(t)];
      if (static_cast<int>(step.phi.size()) != d)
        throw DimensionError("lsvi_backward_pass: feature length mismatch");
      double target = step.reward;
      if (t + 1 < horizon && !step.next_action_features.empty()) {
        const GramState& next = states[static_cast<std::size_t>(t) + 1];
        double best = q_value(next, step.next_action_features[0]);
        for (std::size_t a = 1; a < step.next_action_features.size(); ++a)
          best = std::max(best, q_value(next, step.next_action_features[a]));
        target += best;
      }
      for (int i = 0; i < d; ++i) {
        const double phi_i = step.phi[static_cast<std::size_t>(i)];
        rhs[static_cast<std::size_t>(i)] += phi_i * target;
        if (phi_i == 0.0) continue;
        for (int j = 0; j < d; ++j)
          gs.gram(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) +=
              phi_i * step.phi[static_cast<std::size_t>(j)];
      }
    }
    const Cholesky chol(gs.gram);
    gs.gram_inverse = chol.inverse();
    gs.weights = chol.solve(rhs);
  }
  return states;
}

struct LsviRunResult {
  std::vector<double> episode_returns;
  std::vector<GramState> states;  // fit after the final episode
};

// Runs the optimistic solver on a finite linear MDP for a fixed number of
// episodes. Acting is greedy in the optimistic values refit from all data
// collected so far; episode 0 acts on the unfit prior (w = 0, Gram = lambda I).
inline LsviRunResult run_lsvi_ucb(const LinearMdpSpec& spec, int episodes, double lambda,
                                  double alpha, std::uint64_t seed) {
  validate(spec);
  if (episodes < 0) throw InvalidInputError("run_lsvi_ucb: negative episode count");
  Rng rng(derive_seed(seed, 0));
  LsviHistory history;
  history.horizon = spec.horizon;
  history.feature_dim = spec.feature_dim;
  LsviRunResult result;
  result.states = lsvi_backward_pass(history, lambda, alpha, spec.horizon);
  auto action_features = [&](int s) {
    std::vector<Vector> feats(static_cast<std::size_t>(spec.num_actions));
    for (int a = 0; a < spec.num_actions; ++a) feats[static_cast<std::size_t>(a)] = spec.phi(s, a);
    return feats;
  };
  for (int m = 0; m < episodes; ++m) {
    std::vector<LsviStepRecord> episode;
    episode.reserve(static_cast<std::size_t>(spec.horizon));
    int s = spec.start_state;
    double ret = 0.0;
    for (int t = 0; t < spec.horizon; ++t) {
      const auto feats = action_features(s);
      const int a = greedy_action_linear(result.states[static_cast<std::size_t>(t)], feats);
      const MdpStep step = linear_mdp_step(spec, s, a, rng);
      LsviStepRecord rec;
      rec.phi = feats[static_cast<std::size_t>(a)];
      rec.reward = step.reward;
      if (t + 1 < spec.horizon) rec.next_action_features = action_features(step.next_state);
      episode.push_back(std::move(rec));
      ret += step.reward;
      s = step.next_state;
    }
    history.episodes.push_back(std::move(episode));
    result.episode_returns.push_back(ret);
    result.states = lsvi_backward_pass(history, lambda, alpha, spec.horizon);
  }
  return result;
}

struct VarianceComparison {
  double closed_form = 0.0;
  double estimate = 0.0;
};

// Monte-Carlo check of the posterior-variance identity: with a Gaussian
// weight posterior N(mu, Lambda^{-1}) from ridge data, the variance of
// phi^T w must equal phi^T Lambda^{-1} phi. Draws are mu + L^{-T} z with
// Lambda = L L^T and z standard normal.
inline VarianceComparison posterior_variance_oracle(const Matrix& phi_rows, const Vector& targets,
                                                    double lambda, const Vector& probe,
                                                    int n_samples, Rng& rng) {
  if (phi_rows.rows != targets.size()) throw DimensionError("posterior_variance_oracle: row mismatch");
  if (phi_rows.cols != probe.size()) throw DimensionError("posterior_variance_oracle: probe mismatch");
  if (n_samples < 2) throw InvalidInputError("posterior_variance_oracle: need at least 2 samples");
  const std::size_t d = phi_rows.cols;
  Matrix gram = Matrix::scaled_identity(d, lambda);
  Vector rhs(d, 0.0);
  for (std::size_t r = 0; r < phi_rows.rows; ++r)
    for (std::size_t i = 0; i < d; ++i) {
      rhs[i] += phi_rows(r, i) * targets[r];
      for (std::size_t j = 0; j < d; ++j) gram(i, j) += phi_rows(r, i) * phi_rows(r, j);
    }
  const Cholesky chol(gram);
  const Vector mu = chol.solve(rhs);
  VarianceComparison out;
  out.closed_form = quad_form(chol.inverse(), probe);
  const double center = dot(mu, probe);
  double mean = 0.0, m2 = 0.0;
  Vector z(d);
  for (int n = 1; n <= n_samples; ++n) {
    for (std::size_t i = 0; i < d; ++i) z[i] = rng.normal();
    const Vector w = chol.solve_transposed(z);
    const double v = center + dot(w, probe);
    const double delta = v - mean;
    mean += delta / n;
    m2 += delta * (v - mean);
  }
  out.estimate = m2 / (n_samples - 1);
  return out;
}

// Residual-bootstrap counterpart: refit the ridge on the fixed design with
// residuals resampled with replacement, and measure the spread of phi^T w
// across refits. Resampling whole rows instead converges to the
// residual-weighted sandwich variance, which swings around the posterior by
// up to ~30% per probe at m = 500, so the row-resampling variant cannot
// verify the equivalence at useful tolerances.
inline VarianceComparison bootstrap_variance_oracle(const Matrix& phi_rows, const Vector& targets,
                                                    double lambda, const Vector& probe, int n_refits,
                                                    Rng& rng) {
  if (phi_rows.rows != targets.size()) throw DimensionError("bootstrap_variance_oracle: row mismatch");
  if (phi_rows.cols != probe.size()) throw DimensionError("bootstrap_variance_oracle: probe mismatch");
  if (phi_rows.rows < 2) throw InvalidInputError("bootstrap_variance_oracle: need at least 2 rows");
  if (n_refits < 2) throw InvalidInputError("bootstrap_variance_oracle: need at least 2 refits");
  const std::size_t d = phi_rows.cols;
  const std::size_t m = phi_rows.rows;
  Matrix gram = Matrix::scaled_identity(d, lambda);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) gram(i, j) += phi_rows(r, i) * phi_rows(r, j);
  const Cholesky chol(gram);
  VarianceComparison out;
  out.closed_form = quad_form(chol.inverse(), probe);

  const Vector w_hat = ridge_solve(phi_rows, targets, lambda);
  Vector fitted(m), residual(m);
  double res_mean = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    double f = 0.0;
    for (std::size_t j = 0; j < d; ++j) f += phi_rows(r, j) * w_hat[j];
    fitted[r] = f;
    residual[r] = targets[r] - f;
    res_mean += residual[r];
  }
  res_mean /= static_cast<double>(m);
  // Centered and dof-inflated so the pool's second moment estimates the
  // noise variance without shrinkage from the fit.
  const double inflate = m > d ? std::sqrt(static_cast<double>(m) / static_cast<double>(m - d)) : 1.0;
  for (double& e : residual) e = (e - res_mean) * inflate;

  double mean = 0.0, m2 = 0.0;
  Vector rhs(d);
  for (int n = 1; n <= n_refits; ++n) {
    std::fill(rhs.begin(), rhs.end(), 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      const double y = fitted[r] + residual[static_cast<std::size_t>(rng.uniform_int(m))];
      for (std::size_t j = 0; j < d; ++j) rhs[j] += phi_rows(r, j) * y;
    }
    const double v = dot(chol.solve(rhs), probe);
    const double delta = v - mean;
    mean += delta / n;
    m2 += delta * (v - mean);
  }
  out.estimate = m2 / (n_refits - 1);
  return out;
}

}  // namespace explab
