#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "explab/adam.hpp"
#include "explab/backward.hpp"
#include "explab/ensemble.hpp"
#include "explab/errors.hpp"
#include "explab/maze.hpp"
#include "explab/replay.hpp"
#include "explab/rng.hpp"
#include "explab/trainer_config.hpp"

namespace explab {

inline int head_for_episode(Rng& rng, int head_count) {
  if (head_count < 1) throw InvalidInputError("head_for_episode: no heads");
  return rng.uniform_index(head_count);
}

namespace detail {

inline int argmax_lowest(const Vector& values) {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  return best;
}

}  // namespace detail

// Greedy action under the variant's acquisition rule. One uniform draw
// decides exploration first, so epsilon = 1 is uniformly random and
// epsilon = 0 never explores. Ties resolve to the lowest action index
// everywhere.
inline int select_action(const TrainerConfig& cfg, const BootstrappedNet& net, const Vector& state,
                         double epsilon, int active_head, Rng& rng) {
  const int actions = net.num_actions();
  if (rng.uniform() < epsilon) return rng.uniform_index(actions);
  switch (cfg.variant) {
    case Variant::kBebu:
    case Variant::kOb2i: {
      // Sampled-head greedy: the episode's head acts alone.
      const Vector q = forward_head(net, state, active_head);
      return detail::argmax_lowest(q);
    }
    case Variant::kBebuUcb: {
      return detail::argmax_lowest(optimistic_q(net, state, cfg.lambda_ucb));
    }
    case Variant::kBebuIds: {
      // Information-directed rule: minimize squared regret gap over an
      // information proxy built from the ensemble spread.
      const Matrix q = forward_all(net, state);
      Vector mean(q.cols, 0.0), spread(q.cols, 0.0);
      for (std::size_t a = 0; a < q.cols; ++a) {
        double m = 0.0;
        for (std::size_t k = 0; k < q.rows; ++k) m += q(k, a);
        mean[a] = m / static_cast<double>(q.rows);
        spread[a] = column_disagreement(q, a);
      }
      double best_upper = mean[0] + cfg.lambda_ids * spread[0];
      for (std::size_t a = 1; a < q.cols; ++a)
        best_upper = std::max(best_upper, mean[a] + cfg.lambda_ids * spread[a]);
      int best = 0;
      double best_ratio = 0.0;
      for (std::size_t a = 0; a < q.cols; ++a) {
        const double gap = best_upper - (mean[a] - cfg.lambda_ids * spread[a]);
        const double info =
            std::log1p(spread[a] * spread[a] / (cfg.rho * cfg.rho)) + cfg.epsilon_ids;
        const double ratio = gap * gap / info;
        if (a == 0 || ratio < best_ratio) {
          best = static_cast<int>(a);
          best_ratio = ratio;
        }
      }
      return best;
    }
  }
  throw InvalidInputError("select_action: unknown variant");
}

struct TrainStepInfo {
  double loss = 0.0;
  double mean_batch_bonus = 0.0;
};

// One gradient step on a uniformly sampled stored episode.
inline TrainStepInfo train_step(BootstrappedNet& net, const BootstrappedNet& target,
                                const EpisodicReplay& replay, const TrainerConfig& cfg, Rng& rng,
                                AdamState& adam, RunningStd& bonus_norm) {
  const EpisodeRecord& episode = replay.sample(rng);
  BackwardTables tables = compute_bonus_tables(episode, net, target, cfg, bonus_norm);
  const Matrix targets = backward_targets(episode, tables, cfg);
  std::vector<Vector> states;
  std::vector<int> actions;
  states.reserve(episode.transitions.size());
  actions.reserve(episode.transitions.size());
  for (const Transition& tr : episode.transitions) {
    states.push_back(tr.state);
    actions.push_back(tr.action);
  }
  BackpropResult res = backprop_mse(net, states, actions, targets, cfg.grad_clip);
  const AdamConfig adam_cfg{cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon};
  auto params = net_param_view(net);
  adam_step(params, grad_view(res.grads), adam, adam_cfg);
  TrainStepInfo info;
  info.loss = res.loss;
  double mean_bonus = 0.0;
  for (double b : tables.reward_bonus) mean_bonus += b;
  info.mean_batch_bonus = mean_bonus / static_cast<double>(tables.reward_bonus.size());
  return info;
}

struct TrainEvent {
  long frame = 0;
  double loss = 0.0;
  double mean_batch_bonus = 0.0;
  double epsilon = 0.0;
};

struct EpisodeEvent {
  long frame = 0;
  double episode_return = 0.0;
  int length = 0;
  double epsilon = 0.0;
};

struct EvalEvent {
  long frame = 0;
  double relative_length = 0.0;
};

struct MetricTrace {
  std::vector<TrainEvent> train_events;
  std::vector<EpisodeEvent> episodes;
  std::vector<EvalEvent> evals;
};

struct TrainingResult {
  BootstrappedNet net;
  MetricTrace trace;
};

struct TrainingHooks {
  long eval_period = 0;  // 0 disables periodic evaluation
  std::function<double(long frame, const BootstrappedNet& net)> on_eval;
  std::function<void(long frame, int action)> on_action;  // test instrumentation
};

// Frame-budgeted training loop. Episodes stream into the replay buffer as
// they finish (a budget cutoff stores the partial episode too); training
// fires every train_frequency frames once learning_starts frames have
// elapsed, and the target net refreshes every target_sync_period frames.
template <typename EnvFactory>
TrainingResult run_training(EnvFactory&& make_env, const TrainerConfig& cfg, std::uint64_t seed,
                            const TrainingHooks& hooks = {}) {
  auto env = make_env(derive_seed(seed, 3));
  Rng action_rng(derive_seed(seed, 1));
  Rng replay_rng(derive_seed(seed, 2));
  TrainingResult result;
  result.net = init_net(static_cast<int>(env.state().encoded.size()), cfg.hidden,
                        kMazeActionCount, cfg.heads, derive_seed(seed, 0));
  BootstrappedNet target = sync_target(result.net);
  AdamState adam(net_param_count(result.net));
  EpisodicReplay replay(cfg.replay_capacity);
  RunningStd bonus_norm(cfg.bonus_norm_decay);
  auto maybe_eval = [&](long frame) {
    if (hooks.eval_period <= 0 || !hooks.on_eval) return;
    if (frame % hooks.eval_period == 0)
      result.trace.evals.push_back({frame, hooks.on_eval(frame, result.net)});
  };
  long h = 0;
  while (h < cfg.total_frames) {
    env.reset();
    EpisodeRecord episode;
    const int head = head_for_episode(action_rng, cfg.heads);
    bool done = false;
    double epsilon = epsilon_at(cfg, h);
    while (!done && h < cfg.total_frames) {
      epsilon = epsilon_at(cfg, h);
      const Vector& encoded = env.state().encoded;
      const int action = select_action(cfg, result.net, encoded, epsilon, head, action_rng);
      if (hooks.on_action) hooks.on_action(h, action);
      Transition tr;
      tr.state = encoded;
      tr.action = action;
      const StepOutcome out = env.step(action);
      tr.reward = out.reward;
      tr.next_state = out.state.encoded;
      tr.done = out.done;
      episode.transitions.push_back(std::move(tr));
      done = out.done;
      ++h;
      if (h >= cfg.learning_starts && h % cfg.train_frequency == 0 && replay.size() > 0) {
        const TrainStepInfo info =
            train_step(result.net, target, replay, cfg, replay_rng, adam, bonus_norm);
        result.trace.train_events.push_back({h, info.loss, info.mean_batch_bonus, epsilon});
      }
      if (h % cfg.target_sync_period == 0) target = sync_target(result.net);
      maybe_eval(h);
    }
    if (!episode.transitions.empty()) {
      if (done)
        result.trace.episodes.push_back({h, episode.total_reward(), episode.length(), epsilon});
      replay.push(std::move(episode));
    }
  }
  if (hooks.eval_period > 0 && hooks.on_eval && cfg.total_frames > 0 &&
      cfg.total_frames % hooks.eval_period != 0)
    result.trace.evals.push_back({cfg.total_frames, hooks.on_eval(cfg.total_frames, result.net)});
  return result;
}

// Rolls greedy episodes under an arbitrary policy(state) -> action callable
// and reports mean episode length relative to the shortest open path.
// Timeouts count at the full step cap.
template <typename Policy>
double relative_length_for_policy(const MazeSpec& spec, double noise_scale, int episodes,
                                  Policy&& policy, Rng& rng) {
  if (episodes < 1) throw InvalidInputError("relative_length_for_policy: need at least one episode");
  const int best = shortest_path_length(spec);
  if (best < 1) throw InvalidInputError("relative_length_for_policy: start equals goal");
  double total_ratio = 0.0;
  for (int e = 0; e < episodes; ++e) {
    MazeEnv env(spec, noise_scale, rng.next_u64());
    bool reached = false;
    while (!env.state().done) {
      const StepOutcome out = env.step(policy(env.state()));
      if (out.reward == spec.goal_reward) reached = true;
    }
    const int l_agent = reached ? env.state().steps_taken : spec.max_steps;
    total_ratio += static_cast<double>(l_agent) / static_cast<double>(best);
  }
  return total_ratio / static_cast<double>(episodes);
}

// Ensemble policy evaluation. Default: each episode follows one uniformly
// sampled head, greedily. Vote mode follows the plurality of per-head argmax
// choices instead (ties to the lowest action).
inline double evaluate_relative_length(const BootstrappedNet& net, const MazeSpec& spec,
                                       double noise_scale, int episodes, Rng& rng,
                                       bool vote = false) {
  if (episodes < 1) throw InvalidInputError("evaluate_relative_length: need at least one episode");
  const int best = shortest_path_length(spec);
  if (best < 1) throw InvalidInputError("evaluate_relative_length: start equals goal");
  double total_ratio = 0.0;
  for (int e = 0; e < episodes; ++e) {
    const int head = vote ? 0 : head_for_episode(rng, net.head_count());
    MazeEnv env(spec, noise_scale, rng.next_u64());
    bool reached = false;
    while (!env.state().done) {
      int action = 0;
      if (vote) {
        const Matrix q = forward_all(net, env.state().encoded);
        std::vector<int> votes(q.cols, 0);
        for (std::size_t k = 0; k < q.rows; ++k) {
          std::size_t arg = 0;
          for (std::size_t a = 1; a < q.cols; ++a)
            if (q(k, a) > q(k, arg)) arg = a;
          ++votes[arg];
        }
        for (std::size_t a = 1; a < votes.size(); ++a)
          if (votes[a] > votes[static_cast<std::size_t>(action)]) action = static_cast<int>(a);
      } else {
        action = detail::argmax_lowest(forward_head(net, env.state().encoded, head));
      }
      const StepOutcome out = env.step(action);
      if (out.reward == spec.goal_reward) reached = true;
    }
    const int l_agent = reached ? env.state().steps_taken : spec.max_steps;
    total_ratio += static_cast<double>(l_agent) / static_cast<double>(best);
  }
  return total_ratio / static_cast<double>(episodes);
}

}  // namespace explab
