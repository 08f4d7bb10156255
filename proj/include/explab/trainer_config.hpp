#pragma once

#include <string>
#include <vector>

#include "explab/errors.hpp"

namespace explab {

// Agent variants. All four share the backward-induction trainer; they differ
// in action selection and in whether the optimism bonuses enter the targets.
enum class Variant { kBebu, kBebuUcb, kBebuIds, kOb2i };

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kBebu: return "bebu";
    case Variant::kBebuUcb: return "bebu_ucb";
    case Variant::kBebuIds: return "bebu_ids";
    case Variant::kOb2i: return "ob2i";
  }
  throw InvalidInputError("variant_name: unknown variant");
}

inline Variant variant_from_name(const std::string& name) {
  if (name == "bebu") return Variant::kBebu;
  if (name == "bebu_ucb") return Variant::kBebuUcb;
  if (name == "bebu_ids") return Variant::kBebuIds;
  if (name == "ob2i") return Variant::kOb2i;
  throw ConfigError("unknown variant '" + name + "'");
}

struct TrainerConfig {
  Variant variant = Variant::kOb2i;
  int heads = 10;
  double gamma = 0.9;  // discount
  double beta = 1.0;   // diffusion factor for backward target propagation
  double alpha1 = 0.01;  // immediate-reward bonus weight
  double alpha2 = 0.01;  // next-state-value bonus weight
  double lambda_ucb = 0.1;
  double lambda_ids = 0.1;
  double rho = 1.0;          // return-variance scale in the information ratio
  double epsilon_ids = 1e-5; // information floor
  double lr = 0.001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-7;
  double grad_clip = 10.0;
  // learning_starts, train_frequency and target_sync_period are sized for the
  // 50k-frame default budget; scale them together with total_frames so the
  // gradient-step count and sync cadence stay put.
  long total_frames = 50000;
  long learning_starts = 2500;
  long train_frequency = 12;
  long target_sync_period = 500;
  int replay_capacity = 170;  // episodes
  std::vector<int> hidden = {64, 64};
  // Ablation: reuse the pre-diffusion argmax and mask inside the backward
  // recursion instead of re-evaluating them after diffusion.
  bool precomputed_mask = false;
  double bonus_norm_decay = 0.99;
};

// Only the optimistic variant feeds bonuses into the targets; for the others
// the shared backward pass runs with both weights at zero.
inline double effective_alpha1(const TrainerConfig& cfg) {
  return cfg.variant == Variant::kOb2i ? cfg.alpha1 : 0.0;
}

inline double effective_alpha2(const TrainerConfig& cfg) {
  return cfg.variant == Variant::kOb2i ? cfg.alpha2 : 0.0;
}

// Quadratic exploration anneal: 1 at frame 0, 1/4 at the midpoint, 0 from
// total_frames on.
inline double epsilon_at(const TrainerConfig& cfg, long frame) {
  if (cfg.total_frames <= 0 || frame >= cfg.total_frames) return 0.0;
  const double ratio = 1.0 - static_cast<double>(frame) / static_cast<double>(cfg.total_frames);
  return ratio * ratio;
}

}  // namespace explab
