#include <catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>

#include "explab/errors.hpp"
#include "explab/linear_mdp.hpp"
#include "explab/lsvi.hpp"
#include "explab/rng.hpp"

using namespace explab;

TEST_CASE("the exploration chain rewards patience over greed") {
  const LinearMdpSpec spec = explore_chain_mdp();
  REQUIRE_NOTHROW(validate(spec));
  const auto q = solve_mdp_exact(spec);
  REQUIRE_THAT(q[0](0, 1), Catch::Matchers::WithinAbs(1.1, 1e-12));
  REQUIRE_THAT(q[0](0, 0), Catch::Matchers::WithinAbs(0.6, 1e-12));
  REQUIRE_THAT(optimal_return(spec), Catch::Matchers::WithinAbs(1.1, 1e-12));
  // The optimal trajectory commits to action 1 at every step.
  REQUIRE(optimal_action(q, 0, 0) == 1);
  REQUIRE(optimal_action(q, 1, 1) == 1);
  REQUIRE(optimal_action(q, 2, 2) == 1);
  // Myopic greed (always action 0) collects 0.2 per step.
  REQUIRE_THAT(q[2](0, 0), Catch::Matchers::WithinAbs(0.2, 1e-12));
}

TEST_CASE("one-hot features are unit vectors and transitions are deterministic") {
  const LinearMdpSpec spec = explore_chain_mdp();
  for (int s = 0; s < spec.num_states; ++s)
    for (int a = 0; a < spec.num_actions; ++a)
      REQUIRE(dot(spec.phi(s, a), spec.phi(s, a)) == 1.0);
  Rng rng(1);
  REQUIRE(linear_mdp_step(spec, 0, 1, rng).next_state == 1);
  REQUIRE(linear_mdp_step(spec, 1, 1, rng).next_state == 2);
  REQUIRE(linear_mdp_step(spec, 2, 1, rng).reward == 1.0);
  REQUIRE(linear_mdp_step(spec, 0, 0, rng).next_state == 0);
}

TEST_CASE("an unfit solver prices every unit feature at the prior bonus") {
  LsviHistory history;
  history.horizon = 3;
  history.feature_dim = 4;
  const auto states = lsvi_backward_pass(history, 1.0, 1.0, 3);
  REQUIRE(states.size() == 3);
  for (const auto& gs : states) {
    Vector e(4, 0.0);
    e[1] = 1.0;
    // w = 0 and Lambda = I, so the optimistic value is exactly the bonus 1.
    REQUIRE(q_value(gs, e) == 1.0);
    REQUIRE(ucb_bonus_linear(gs, e) == 1.0);
  }
}

TEST_CASE("a single scalar observation fits the closed-form ridge weight") {
  LsviHistory history;
  history.horizon = 1;
  history.feature_dim = 1;
  LsviStepRecord step;
  step.phi = Vector{2.0};
  step.reward = 3.0;
  history.episodes.push_back({step});
  const auto states = lsvi_backward_pass(history, 0.5, 1.0, 1);
  REQUIRE_THAT(states[0].weights[0], Catch::Matchers::WithinAbs(6.0 / 4.5, 1e-14));
  REQUIRE_THAT(quad_form(states[0].gram_inverse, Vector{1.0}),
               Catch::Matchers::WithinAbs(1.0 / 4.5, 1e-14));
}

TEST_CASE("the backward pass equals an independent batch ridge fit") {
  Rng rng(17);
  const int d = 3, horizon = 2, episodes = 5;
  const double lambda = 0.8, alpha = 0.7;
  LsviHistory history;
  history.horizon = horizon;
  history.feature_dim = d;
  for (int m = 0; m < episodes; ++m) {
    std::vector<LsviStepRecord> episode;
    for (int t = 0; t < horizon; ++t) {
      LsviStepRecord step;
      step.phi = Vector(d);
      for (double& v : step.phi) v = rng.uniform(-1.0, 1.0);
      step.reward = rng.uniform(0.0, 1.0);
      if (t + 1 < horizon)
        for (int a = 0; a < 2; ++a) {
          Vector f(d);
          for (double& v : f) v = rng.uniform(-1.0, 1.0);
          step.next_action_features.push_back(std::move(f));
        }
      episode.push_back(std::move(step));
    }
    history.episodes.push_back(std::move(episode));
  }
  const auto states = lsvi_backward_pass(history, lambda, alpha, horizon);

  // Reference: fit t = 1 by plain ridge on the rewards, then build the t = 0
  // targets with the same clipped optimistic rule and ridge them too.
  Matrix phi1(episodes, d), phi0(episodes, d);
  Vector y1(episodes), y0(episodes);
  for (int m = 0; m < episodes; ++m) {
    const auto& episode = history.episodes[static_cast<std::size_t>(m)];
    for (int i = 0; i < d; ++i) {
      phi1(m, i) = episode[1].phi[static_cast<std::size_t>(i)];
      phi0(m, i) = episode[0].phi[static_cast<std::size_t>(i)];
    }
    y1[static_cast<std::size_t>(m)] = episode[1].reward;
  }
  const Vector w1 = ridge_solve(phi1, y1, lambda);
  for (int i = 0; i < d; ++i)
    REQUIRE_THAT(states[1].weights[static_cast<std::size_t>(i)],
                 Catch::Matchers::WithinAbs(w1[static_cast<std::size_t>(i)], 1e-8));
  Matrix gram1 = Matrix::scaled_identity(d, lambda);
  for (int m = 0; m < episodes; ++m)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) gram1(i, j) += phi1(m, i) * phi1(m, j);
  const Matrix gram1_inv = spd_inverse(gram1);
  for (int m = 0; m < episodes; ++m) {
    const auto& episode = history.episodes[static_cast<std::size_t>(m)];
    double best = -1e300;
    for (const Vector& f : episode[0].next_action_features) {
      const double value =
          std::min(dot(w1, f) + alpha * std::sqrt(quad_form(gram1_inv, f)),
                   static_cast<double>(horizon));
      best = std::max(best, value);
    }
    y0[static_cast<std::size_t>(m)] = episode[0].reward + best;
  }
  const Vector w0 = ridge_solve(phi0, y0, lambda);
  for (int i = 0; i < d; ++i)
    REQUIRE_THAT(states[0].weights[static_cast<std::size_t>(i)],
                 Catch::Matchers::WithinAbs(w0[static_cast<std::size_t>(i)], 1e-8));
}

TEST_CASE("optimistic values clip at the horizon") {
  GramState gs = GramState::fresh(2, 1.0, 1.0, 3);
  gs.weights = Vector{100.0, 0.0};
  REQUIRE(q_value(gs, Vector{1.0, 0.0}) == 3.0);
}

TEST_CASE("greedy action selection breaks ties low") {
  const GramState gs = GramState::fresh(2, 1.0, 1.0, 3);
  const std::vector<Vector> feats{{0.5, 0.5}, {0.5, 0.5}, {0.1, 0.1}};
  REQUIRE(greedy_action_linear(gs, feats) == 0);
  REQUIRE_THROWS_AS(greedy_action_linear(gs, {}), InvalidInputError);
}

TEST_CASE("more data never inflates the bonus") {
  Rng rng(23);
  const int d = 4;
  LsviHistory small;
  small.horizon = 1;
  small.feature_dim = d;
  std::vector<LsviStepRecord> episode;
  for (int i = 0; i < 5; ++i) {
    LsviStepRecord step;
    step.phi = Vector(d);
    for (double& v : step.phi) v = rng.uniform(-1.0, 1.0);
    step.reward = rng.uniform(0.0, 1.0);
    episode.push_back(std::move(step));
  }
  // The pass pools steps across episodes at each t; feed extra data as more
  // single-step episodes.
  for (const auto& step : episode) small.episodes.push_back({step});
  LsviHistory big = small;
  for (int extra = 0; extra < 5; ++extra) {
    LsviStepRecord step;
    step.phi = Vector(d);
    for (double& v : step.phi) v = rng.uniform(-1.0, 1.0);
    step.reward = rng.uniform(0.0, 1.0);
    big.episodes.push_back({step});
  }
  const auto s_small = lsvi_backward_pass(small, 1.0, 1.0, 1);
  const auto s_big = lsvi_backward_pass(big, 1.0, 1.0, 1);
  for (int probe = 0; probe < 20; ++probe) {
    Vector f(d);
    for (double& v : f) v = rng.uniform(-1.0, 1.0);
    REQUIRE(ucb_bonus_linear(s_big[0], f) <= ucb_bonus_linear(s_small[0], f) + 1e-12);
  }
}

TEST_CASE("lsvi-ucb learns the chain optimum within two hundred episodes") {
  const LinearMdpSpec spec = explore_chain_mdp();
  const LsviRunResult result = run_lsvi_ucb(spec, 200, 1.0, 1.0, 7);
  REQUIRE(result.episode_returns.size() == 200);
  const auto q = solve_mdp_exact(spec);
  int s = spec.start_state;
  Rng rng(1);
  for (int t = 0; t < spec.horizon; ++t) {
    std::vector<Vector> feats;
    for (int a = 0; a < spec.num_actions; ++a) feats.push_back(spec.phi(s, a));
    const int chosen = greedy_action_linear(result.states[static_cast<std::size_t>(t)], feats);
    REQUIRE(chosen == optimal_action(q, t, s));
    s = linear_mdp_step(spec, s, chosen, rng).next_state;
  }
  double first = 0.0, last = 0.0;
  for (int m = 0; m < 50; ++m) {
    first += result.episode_returns[static_cast<std::size_t>(m)];
    last += result.episode_returns[result.episode_returns.size() - 1 - static_cast<std::size_t>(m)];
  }
  REQUIRE(last > first);  // average regret shrinks
}

TEST_CASE("fitted gram matrices stay consistent with their inverses") {
  const LinearMdpSpec spec = explore_chain_mdp();
  const LsviRunResult result = run_lsvi_ucb(spec, 50, 1.0, 1.0, 3);
  for (const GramState& gs : result.states) {
    const Matrix prod = matmul(gs.gram, gs.gram_inverse);
    for (std::size_t i = 0; i < prod.rows; ++i)
      for (std::size_t j = 0; j < prod.cols; ++j)
        REQUIRE_THAT(prod(i, j), Catch::Matchers::WithinAbs(i == j ? 1.0 : 0.0, 1e-6));
  }
}

TEST_CASE("posterior sampling reproduces the scalar closed form") {
  Matrix phi(1, 1);
  phi(0, 0) = 1.0;
  Rng rng(31);
  const auto cmp = posterior_variance_oracle(phi, Vector{1.0}, 1.0, Vector{1.0}, 50000, rng);
  // 1/2 up to the Cholesky round trip through sqrt(2).
  REQUIRE_THAT(cmp.closed_form, Catch::Matchers::WithinAbs(0.5, 1e-12));
  REQUIRE_THAT(cmp.estimate, Catch::Matchers::WithinRel(0.5, 0.05));
}

TEST_CASE("bootstrap refits approximate the posterior spread") {
  Rng rng(37);
  const int m = 300, d = 3;
  Matrix phi(m, d);
  Vector w_true{0.4, -0.2, 0.9};
  Vector y(m);
  for (int r = 0; r < m; ++r) {
    double t = rng.normal();
    for (int j = 0; j < d; ++j) {
      phi(r, j) = rng.uniform(-0.57, 0.57);
      t += phi(r, j) * w_true[static_cast<std::size_t>(j)];
    }
    y[static_cast<std::size_t>(r)] = t;
  }
  const auto cmp = bootstrap_variance_oracle(phi, y, 1.0, Vector{1.0, 0.0, 0.0}, 800, rng);
  REQUIRE(cmp.closed_form > 0.0);
  REQUIRE_THAT(cmp.estimate, Catch::Matchers::WithinRel(cmp.closed_form, 0.35));
}

TEST_CASE("variance oracles validate their inputs") {
  Matrix phi(2, 2);
  Rng rng(1);
  REQUIRE_THROWS_AS((posterior_variance_oracle(phi, Vector{1.0}, 1.0, Vector{1.0, 0.0}, 10, rng)),
                    DimensionError);
  REQUIRE_THROWS_AS(
      (posterior_variance_oracle(phi, Vector{1.0, 2.0}, 1.0, Vector{1.0, 0.0}, 1, rng)),
      InvalidInputError);
  REQUIRE_THROWS_AS(
      (bootstrap_variance_oracle(phi, Vector{1.0, 2.0}, 1.0, Vector{1.0}, 10, rng)), DimensionError);
}
