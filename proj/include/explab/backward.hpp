#pragma once

#include <cstdint>
#include <vector>

#include "explab/ensemble.hpp"
#include "explab/errors.hpp"
#include "explab/maze.hpp"
#include "explab/trainer_config.hpp"

namespace explab {

// Exponentially weighted second-moment tracker used to normalize the
// next-state disagreement bonuses. Starts at 1 so early updates are already
// well scaled; strictly positive forever after.
class RunningStd {
 public:
  explicit RunningStd(double decay = 0.99) : decay_(decay) {
    if (!(decay > 0.0 && decay < 1.0)) throw InvalidInputError("RunningStd: decay must be in (0, 1)");
  }

  void update(const double* values, std::size_t count) {
    if (count == 0) return;
    double mean_sq = 0.0;
    for (std::size_t i = 0; i < count; ++i) mean_sq += values[i] * values[i];
    mean_sq /= static_cast<double>(count);
    second_moment_ = decay_ * second_moment_ + (1.0 - decay_) * mean_sq;
  }

  double value() const { return std::sqrt(second_moment_); }

 private:
  double decay_;
  double second_moment_ = 1.0;
};

// Per-episode tables consumed by the backward recursion, all indexed by
// (head k, action a, step t) as appropriate:
//   next_q       values of every action at the next state, from the target net
//   reward_bonus online-net disagreement at the executed (state, action)
//   next_q_bonus normalized target-net disagreement at the next state, taken
//                at each head's own argmax action
//   next_argmax  that argmax action
//   mask         1 where next_argmax disagrees with the action the trajectory
//                actually executed at step t+1 (last column unused)
struct BackwardTables {
  int heads = 0;
  int actions = 0;
  int length = 0;
  std::vector<double> next_q;
  std::vector<double> reward_bonus;
  std::vector<double> next_q_bonus;
  std::vector<int> next_argmax;
  std::vector<std::uint8_t> mask;

  double& q(int k, int a, int t) {
    return next_q[(static_cast<std::size_t>(k) * actions + a) * length + t];
  }
  double q(int k, int a, int t) const {
    return next_q[(static_cast<std::size_t>(k) * actions + a) * length + t];
  }
  double& bonus(int k, int t) { return next_q_bonus[static_cast<std::size_t>(k) * length + t]; }
  double bonus(int k, int t) const { return next_q_bonus[static_cast<std::size_t>(k) * length + t]; }
  int& argmax(int k, int t) { return next_argmax[static_cast<std::size_t>(k) * length + t]; }
  int argmax(int k, int t) const { return next_argmax[static_cast<std::size_t>(k) * length + t]; }
  std::uint8_t& m(int k, int t) { return mask[static_cast<std::size_t>(k) * length + t]; }
  std::uint8_t m(int k, int t) const { return mask[static_cast<std::size_t>(k) * length + t]; }
};

// Builds every table in one sweep over the episode. The online net prices
// disagreement at executed state-action pairs (shared across heads); the
// target net prices next states, per head at that head's own argmax. The raw
// next-state bonuses update the running normalizer first, then the stored
// bonuses are divided by it.
inline BackwardTables compute_bonus_tables(const EpisodeRecord& episode, const BootstrappedNet& net,
                                           const BootstrappedNet& target, const TrainerConfig& cfg,
                                           RunningStd& bonus_norm) {
  (void)cfg;
  const int length = episode.length();
  if (length == 0) throw InvalidInputError("compute_bonus_tables: empty episode");
  const int heads = net.head_count();
  const int actions = net.num_actions();
  if (target.head_count() != heads || target.num_actions() != actions)
    throw DimensionError("compute_bonus_tables: online and target net shapes differ");
  BackwardTables tables;
  tables.heads = heads;
  tables.actions = actions;
  tables.length = length;
  tables.next_q.resize(static_cast<std::size_t>(heads) * actions * length);
  tables.reward_bonus.resize(static_cast<std::size_t>(length));
  tables.next_q_bonus.resize(static_cast<std::size_t>(heads) * length);
  tables.next_argmax.resize(static_cast<std::size_t>(heads) * length);
  tables.mask.assign(static_cast<std::size_t>(heads) * length, 0);
  for (int t = 0; t < length; ++t) {
    const Transition& tr = episode.transitions[static_cast<std::size_t>(t)];
    const Matrix online_q = forward_all(net, tr.state);
    tables.reward_bonus[static_cast<std::size_t>(t)] =
        column_disagreement(online_q, static_cast<std::size_t>(tr.action));
    const Matrix target_q = forward_all(target, tr.next_state);
    for (int k = 0; k < heads; ++k) {
      int best = 0;
      for (int a = 1; a < actions; ++a)
        if (target_q(static_cast<std::size_t>(k), static_cast<std::size_t>(a)) >
            target_q(static_cast<std::size_t>(k), static_cast<std::size_t>(best)))
          best = a;
      tables.argmax(k, t) = best;
      tables.bonus(k, t) = column_disagreement(target_q, static_cast<std::size_t>(best));
      for (int a = 0; a < actions; ++a)
        tables.q(k, a, t) = target_q(static_cast<std::size_t>(k), static_cast<std::size_t>(a));
    }
    if (t + 1 < length)
      for (int k = 0; k < heads; ++k)
        tables.m(k, t) =
            tables.argmax(k, t) != episode.transitions[static_cast<std::size_t>(t) + 1].action ? 1 : 0;
  }
  bonus_norm.update(tables.next_q_bonus.data(), tables.next_q_bonus.size());
  const double norm = bonus_norm.value();
  for (double& b : tables.next_q_bonus) b /= norm;
  return tables;
}

// Backward induction over one episode, all heads at once. The last step's
// target is its (bonus-augmented) reward; walking backward, each freshly
// built target diffuses into the next-state value table at the executed
// action before that table is queried, so value flows along the trajectory
// within a single pass. Optimism enters twice: the executed-pair bonus joins
// the reward, and the next-state bonus joins the bootstrap value whenever the
// head's preferred action deviates from the trajectory.
//
// By default the preferred action and its deviation indicator are re-derived
// from the diffused table; cfg.precomputed_mask switches to the pre-diffusion
// argmax and mask captured in the tables. The next-state bonus is priced at
// the pre-diffusion argmax either way.
inline Matrix backward_targets(const EpisodeRecord& episode, BackwardTables& tables,
                               const TrainerConfig& cfg) {
  const int length = episode.length();
  if (length == 0) throw ContractViolation("backward_targets: empty episode");
  if (length != tables.length) throw DimensionError("backward_targets: episode and tables disagree");
  const int heads = tables.heads;
  const int actions = tables.actions;
  const double a1 = effective_alpha1(cfg);
  const double a2 = effective_alpha2(cfg);
  Matrix targets(static_cast<std::size_t>(heads), static_cast<std::size_t>(length));
  const int last = length - 1;
  const double last_reward = episode.transitions[static_cast<std::size_t>(last)].reward;
  for (int k = 0; k < heads; ++k)
    targets(static_cast<std::size_t>(k), static_cast<std::size_t>(last)) =
        last_reward + a1 * tables.reward_bonus[static_cast<std::size_t>(last)];
  for (int t = length - 2; t >= 0; --t) {
    const double reward = episode.transitions[static_cast<std::size_t>(t)].reward;
    const int executed_next = episode.transitions[static_cast<std::size_t>(t) + 1].action;
    for (int k = 0; k < heads; ++k) {
      double& diffused = tables.q(k, executed_next, t);
      diffused = cfg.beta * targets(static_cast<std::size_t>(k), static_cast<std::size_t>(t) + 1) +
                 (1.0 - cfg.beta) * diffused;
      int preferred;
      double deviates;
      if (cfg.precomputed_mask) {
        preferred = tables.argmax(k, t);
        deviates = tables.m(k, t) ? 1.0 : 0.0;
      } else {
        preferred = 0;
        for (int a = 1; a < actions; ++a)
          if (tables.q(k, a, t) > tables.q(k, preferred, t)) preferred = a;
        deviates = preferred != executed_next ? 1.0 : 0.0;
      }
      targets(static_cast<std::size_t>(k), static_cast<std::size_t>(t)) =
          reward + a1 * tables.reward_bonus[static_cast<std::size_t>(t)] +
          cfg.gamma * (tables.q(k, preferred, t) + a2 * deviates * tables.bonus(k, t));
    }
  }
  return targets;
}

}  // namespace explab
