#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "explab/errors.hpp"
#include "explab/regress.hpp"
#include "explab/trainer_config.hpp"

namespace explab {

// Strict configuration parsing: every key must be known, every value typed
// and range-checked, and errors always name the offending key. The resolved
// structs serialize back to JSON such that emit -> parse -> emit is a fixed
// point, which is what the manifests rely on.

namespace cfgdetail {

using nlohmann::json;

inline void expect_object(const json& j, const std::string& scope) {
  if (!j.is_object()) throw ConfigError(scope + ": expected a JSON object");
}

inline void reject_unknown(const json& j, const std::set<std::string>& known,
                           const std::string& scope) {
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw ConfigError(scope + ": unknown key '" + item.key() + "'");
}

inline void read_double(const json& j, const char* key, double& target, const std::string& scope) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number()) throw ConfigError(scope + ": " + key + " must be a number");
  target = j.at(key).get<double>();
}

inline void read_int(const json& j, const char* key, int& target, const std::string& scope) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number_integer()) throw ConfigError(scope + ": " + key + " must be an integer");
  target = j.at(key).get<int>();
}

inline void read_long(const json& j, const char* key, long& target, const std::string& scope) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number_integer()) throw ConfigError(scope + ": " + key + " must be an integer");
  target = j.at(key).get<long>();
}

inline void read_u64(const json& j, const char* key, std::uint64_t& target, const std::string& scope) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)))
    throw ConfigError(scope + ": " + key + " must be a non-negative integer");
  target = v.get<std::uint64_t>();
}

inline void read_bool(const json& j, const char* key, bool& target, const std::string& scope) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_boolean()) throw ConfigError(scope + ": " + key + " must be a boolean");
  target = j.at(key).get<bool>();
}

inline void read_int_list(const json& j, const char* key, std::vector<int>& target,
                          const std::string& scope) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(scope + ": " + key + " must be an array of integers");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) throw ConfigError(scope + ": " + key + " must be an array of integers");
    out.push_back(e.get<int>());
  }
  target = std::move(out);
}

inline void read_double_list(const json& j, const char* key, std::vector<double>& target,
                             const std::string& scope) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(scope + ": " + key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(scope + ": " + key + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  target = std::move(out);
}

inline void check_range(double value, double lo, double hi, const char* key,
                        const std::string& scope) {
  if (!(value >= lo && value <= hi))
    throw ConfigError(scope + ": " + key + " must be in [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
}

inline void check_min(double value, double lo, const char* key, const std::string& scope) {
  if (!(value >= lo))
    throw ConfigError(scope + ": " + key + " must be at least " + std::to_string(lo));
}

inline void check_positive(double value, const char* key, const std::string& scope) {
  if (!(value > 0.0)) throw ConfigError(scope + ": " + key + " must be positive");
}

}  // namespace cfgdetail

struct EnvConfig {
  int width = 10;
  int height = 10;
  double slip_prob = 0.1;
  double noise_scale = 0.1;
  int max_steps = 1000;
  double wall_bump_reward = -1.0;
  double goal_reward = 1000.0;
};

struct EvalConfig {
  int episodes = 20;
  long period = 5000;
  bool vote = false;
};

struct MazeRunConfig {
  std::vector<Variant> variants = {Variant::kBebu, Variant::kBebuUcb, Variant::kBebuIds,
                                   Variant::kOb2i};
  std::vector<double> densities = {0.3, 0.4, 0.5};
  int seeds = 10;
  std::uint64_t master_seed = 1;
  int workers = 1;
  bool save_checkpoints = false;
  EnvConfig env;
  TrainerConfig trainer;
  EvalConfig eval;
};

inline TrainerConfig parse_trainer_config(const nlohmann::json& j, const std::string& scope) {
  using namespace cfgdetail;
  expect_object(j, scope);
  reject_unknown(j,
                 {"heads", "gamma", "beta", "alpha1", "alpha2", "lambda_ucb", "lambda_ids", "rho",
                  "epsilon_ids", "lr", "adam_beta1", "adam_beta2", "adam_epsilon", "grad_clip",
                  "total_frames", "learning_starts", "train_frequency", "target_sync_period",
                  "replay_capacity", "hidden", "precomputed_mask", "bonus_norm_decay"},
                 scope);
  TrainerConfig cfg;
  read_int(j, "heads", cfg.heads, scope);
  read_double(j, "gamma", cfg.gamma, scope);
  read_double(j, "beta", cfg.beta, scope);
  read_double(j, "alpha1", cfg.alpha1, scope);
  read_double(j, "alpha2", cfg.alpha2, scope);
  read_double(j, "lambda_ucb", cfg.lambda_ucb, scope);
  read_double(j, "lambda_ids", cfg.lambda_ids, scope);
  read_double(j, "rho", cfg.rho, scope);
  read_double(j, "epsilon_ids", cfg.epsilon_ids, scope);
  read_double(j, "lr", cfg.lr, scope);
  read_double(j, "adam_beta1", cfg.adam_beta1, scope);
  read_double(j, "adam_beta2", cfg.adam_beta2, scope);
  read_double(j, "adam_epsilon", cfg.adam_epsilon, scope);
  read_double(j, "grad_clip", cfg.grad_clip, scope);
  read_long(j, "total_frames", cfg.total_frames, scope);
  read_long(j, "learning_starts", cfg.learning_starts, scope);
  read_long(j, "train_frequency", cfg.train_frequency, scope);
  read_long(j, "target_sync_period", cfg.target_sync_period, scope);
  read_int(j, "replay_capacity", cfg.replay_capacity, scope);
  read_int_list(j, "hidden", cfg.hidden, scope);
  read_bool(j, "precomputed_mask", cfg.precomputed_mask, scope);
  read_double(j, "bonus_norm_decay", cfg.bonus_norm_decay, scope);
  check_min(cfg.heads, 1, "heads", scope);
  if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) throw ConfigError(scope + ": gamma must be in [0, 1)");
  check_range(cfg.beta, 0.0, 1.0, "beta", scope);
  check_min(cfg.alpha1, 0.0, "alpha1", scope);
  check_min(cfg.alpha2, 0.0, "alpha2", scope);
  check_min(cfg.lambda_ucb, 0.0, "lambda_ucb", scope);
  check_min(cfg.lambda_ids, 0.0, "lambda_ids", scope);
  check_positive(cfg.rho, "rho", scope);
  check_positive(cfg.epsilon_ids, "epsilon_ids", scope);
  check_positive(cfg.lr, "lr", scope);
  check_range(cfg.adam_beta1, 0.0, 0.999999, "adam_beta1", scope);
  check_range(cfg.adam_beta2, 0.0, 0.999999, "adam_beta2", scope);
  check_positive(cfg.adam_epsilon, "adam_epsilon", scope);
  check_positive(cfg.grad_clip, "grad_clip", scope);
  check_min(cfg.total_frames, 0, "total_frames", scope);
  check_min(cfg.learning_starts, 0, "learning_starts", scope);
  check_min(cfg.train_frequency, 1, "train_frequency", scope);
  check_min(cfg.target_sync_period, 1, "target_sync_period", scope);
  check_min(cfg.replay_capacity, 1, "replay_capacity", scope);
  for (int h : cfg.hidden)
    if (h < 1) throw ConfigError(scope + ": hidden widths must be positive");
  if (!(cfg.bonus_norm_decay > 0.0 && cfg.bonus_norm_decay < 1.0))
    throw ConfigError(scope + ": bonus_norm_decay must be in (0, 1)");
  return cfg;
}

inline nlohmann::json trainer_config_json(const TrainerConfig& cfg) {
  return nlohmann::json{{"heads", cfg.heads},
                        {"gamma", cfg.gamma},
                        {"beta", cfg.beta},
                        {"alpha1", cfg.alpha1},
                        {"alpha2", cfg.alpha2},
                        {"lambda_ucb", cfg.lambda_ucb},
                        {"lambda_ids", cfg.lambda_ids},
                        {"rho", cfg.rho},
                        {"epsilon_ids", cfg.epsilon_ids},
                        {"lr", cfg.lr},
                        {"adam_beta1", cfg.adam_beta1},
                        {"adam_beta2", cfg.adam_beta2},
                        {"adam_epsilon", cfg.adam_epsilon},
                        {"grad_clip", cfg.grad_clip},
                        {"total_frames", cfg.total_frames},
                        {"learning_starts", cfg.learning_starts},
                        {"train_frequency", cfg.train_frequency},
                        {"target_sync_period", cfg.target_sync_period},
                        {"replay_capacity", cfg.replay_capacity},
                        {"hidden", cfg.hidden},
                        {"precomputed_mask", cfg.precomputed_mask},
                        {"bonus_norm_decay", cfg.bonus_norm_decay}};
}

inline MazeRunConfig parse_maze_run_config(const nlohmann::json& j) {
  using namespace cfgdetail;
  const std::string scope = "maze config";
  expect_object(j, scope);
  reject_unknown(j,
                 {"variants", "densities", "seeds", "master_seed", "workers", "save_checkpoints",
                  "env", "trainer", "eval"},
                 scope);
  MazeRunConfig cfg;
  if (j.contains("variants")) {
    const auto& v = j.at("variants");
    if (!v.is_array() || v.empty()) throw ConfigError(scope + ": variants must be a non-empty array");
    cfg.variants.clear();
    for (const auto& e : v) {
      if (!e.is_string()) throw ConfigError(scope + ": variants must be strings");
      cfg.variants.push_back(variant_from_name(e.get<std::string>()));
    }
  }
  read_double_list(j, "densities", cfg.densities, scope);
  if (cfg.densities.empty()) throw ConfigError(scope + ": densities must be non-empty");
  for (double d : cfg.densities) check_range(d, 0.0, 0.6, "densities", scope);
  read_int(j, "seeds", cfg.seeds, scope);
  check_min(cfg.seeds, 1, "seeds", scope);
  read_u64(j, "master_seed", cfg.master_seed, scope);
  read_int(j, "workers", cfg.workers, scope);
  check_min(cfg.workers, 1, "workers", scope);
  read_bool(j, "save_checkpoints", cfg.save_checkpoints, scope);
  if (j.contains("env")) {
    const std::string env_scope = "maze config env";
    const auto& e = j.at("env");
    expect_object(e, env_scope);
    reject_unknown(e,
                   {"width", "height", "slip_prob", "noise_scale", "max_steps", "wall_bump_reward",
                    "goal_reward"},
                   env_scope);
    read_int(e, "width", cfg.env.width, env_scope);
    read_int(e, "height", cfg.env.height, env_scope);
    read_double(e, "slip_prob", cfg.env.slip_prob, env_scope);
    read_double(e, "noise_scale", cfg.env.noise_scale, env_scope);
    read_int(e, "max_steps", cfg.env.max_steps, env_scope);
    read_double(e, "wall_bump_reward", cfg.env.wall_bump_reward, env_scope);
    read_double(e, "goal_reward", cfg.env.goal_reward, env_scope);
    check_min(cfg.env.width, 2, "width", env_scope);
    check_min(cfg.env.height, 2, "height", env_scope);
    check_range(cfg.env.slip_prob, 0.0, 0.5, "slip_prob", env_scope);
    check_min(cfg.env.noise_scale, 0.0, "noise_scale", env_scope);
    check_min(cfg.env.max_steps, 1, "max_steps", env_scope);
  }
  if (j.contains("trainer")) cfg.trainer = parse_trainer_config(j.at("trainer"), "maze config trainer");
  if (j.contains("eval")) {
    const std::string eval_scope = "maze config eval";
    const auto& e = j.at("eval");
    expect_object(e, eval_scope);
    reject_unknown(e, {"episodes", "period", "vote"}, eval_scope);
    read_int(e, "episodes", cfg.eval.episodes, eval_scope);
    read_long(e, "period", cfg.eval.period, eval_scope);
    read_bool(e, "vote", cfg.eval.vote, eval_scope);
    check_min(cfg.eval.episodes, 1, "episodes", eval_scope);
    check_min(cfg.eval.period, 0, "period", eval_scope);
  }
  return cfg;
}

inline nlohmann::json maze_run_config_json(const MazeRunConfig& cfg) {
  std::vector<std::string> variants;
  for (Variant v : cfg.variants) variants.push_back(variant_name(v));
  return nlohmann::json{
      {"variants", variants},
      {"densities", cfg.densities},
      {"seeds", cfg.seeds},
      {"master_seed", cfg.master_seed},
      {"workers", cfg.workers},
      {"save_checkpoints", cfg.save_checkpoints},
      {"env",
       {{"width", cfg.env.width},
        {"height", cfg.env.height},
        {"slip_prob", cfg.env.slip_prob},
        {"noise_scale", cfg.env.noise_scale},
        {"max_steps", cfg.env.max_steps},
        {"wall_bump_reward", cfg.env.wall_bump_reward},
        {"goal_reward", cfg.env.goal_reward}}},
      {"trainer", trainer_config_json(cfg.trainer)},
      {"eval",
       {{"episodes", cfg.eval.episodes}, {"period", cfg.eval.period}, {"vote", cfg.eval.vote}}}};
}

struct BootstrapVerifyConfig {
  int designs = 5;
  int rows = 500;
  int refits = 2000;
  double lambda = 1.0;
  double tolerance = 0.15;
};

struct LsviVerifyConfig {
  std::uint64_t master_seed = 1;
  int designs = 20;
  int max_feature_dim = 8;
  int max_rows = 100;
  std::vector<double> lambdas = {0.1, 1.0, 10.0};
  int probes_per_design = 3;
  int samples = 100000;
  double tolerance = 0.05;
  BootstrapVerifyConfig bootstrap;
};

inline LsviVerifyConfig parse_lsvi_verify_config(const nlohmann::json& j) {
  using namespace cfgdetail;
  const std::string scope = "lsvi-verify config";
  expect_object(j, scope);
  reject_unknown(j,
                 {"master_seed", "designs", "max_feature_dim", "max_rows", "lambdas",
                  "probes_per_design", "samples", "tolerance", "bootstrap"},
                 scope);
  LsviVerifyConfig cfg;
  read_u64(j, "master_seed", cfg.master_seed, scope);
  read_int(j, "designs", cfg.designs, scope);
  read_int(j, "max_feature_dim", cfg.max_feature_dim, scope);
  read_int(j, "max_rows", cfg.max_rows, scope);
  read_double_list(j, "lambdas", cfg.lambdas, scope);
  read_int(j, "probes_per_design", cfg.probes_per_design, scope);
  read_int(j, "samples", cfg.samples, scope);
  read_double(j, "tolerance", cfg.tolerance, scope);
  if (j.contains("bootstrap")) {
    const std::string bscope = "lsvi-verify config bootstrap";
    const auto& b = j.at("bootstrap");
    expect_object(b, bscope);
    reject_unknown(b, {"designs", "rows", "refits", "lambda", "tolerance"}, bscope);
    read_int(b, "designs", cfg.bootstrap.designs, bscope);
    read_int(b, "rows", cfg.bootstrap.rows, bscope);
    read_int(b, "refits", cfg.bootstrap.refits, bscope);
    read_double(b, "lambda", cfg.bootstrap.lambda, bscope);
    read_double(b, "tolerance", cfg.bootstrap.tolerance, bscope);
    check_min(cfg.bootstrap.designs, 0, "designs", bscope);
    check_min(cfg.bootstrap.rows, 2, "rows", bscope);
    check_min(cfg.bootstrap.refits, 2, "refits", bscope);
    check_positive(cfg.bootstrap.lambda, "lambda", bscope);
    check_positive(cfg.bootstrap.tolerance, "tolerance", bscope);
  }
  check_min(cfg.designs, 1, "designs", scope);
  check_range(cfg.max_feature_dim, 1, 64, "max_feature_dim", scope);
  check_min(cfg.max_rows, 1, "max_rows", scope);
  if (cfg.lambdas.empty()) throw ConfigError(scope + ": lambdas must be non-empty");
  for (double l : cfg.lambdas) check_positive(l, "lambdas", scope);
  check_min(cfg.probes_per_design, 1, "probes_per_design", scope);
  check_min(cfg.samples, 2, "samples", scope);
  check_positive(cfg.tolerance, "tolerance", scope);
  return cfg;
}

inline nlohmann::json lsvi_verify_config_json(const LsviVerifyConfig& cfg) {
  return nlohmann::json{{"master_seed", cfg.master_seed},
                        {"designs", cfg.designs},
                        {"max_feature_dim", cfg.max_feature_dim},
                        {"max_rows", cfg.max_rows},
                        {"lambdas", cfg.lambdas},
                        {"probes_per_design", cfg.probes_per_design},
                        {"samples", cfg.samples},
                        {"tolerance", cfg.tolerance},
                        {"bootstrap",
                         {{"designs", cfg.bootstrap.designs},
                          {"rows", cfg.bootstrap.rows},
                          {"refits", cfg.bootstrap.refits},
                          {"lambda", cfg.bootstrap.lambda},
                          {"tolerance", cfg.bootstrap.tolerance}}}};
}

struct GridConfig {
  double lo = -1.2;
  double hi = 1.2;
  int points = 241;
};

struct RegressDemoConfig {
  std::uint64_t master_seed = 1;
  int points = 60;
  int nets = 20;
  int epochs = 2000;
  std::vector<int> hidden = {32, 32};
  double lr = 0.01;
  double noise = 0.05;
  std::vector<Interval> support = {{-1.0, -0.25}, {0.3, 1.0}};
  GridConfig grid;
};

inline RegressDemoConfig parse_regress_demo_config(const nlohmann::json& j) {
  using namespace cfgdetail;
  const std::string scope = "regress-demo config";
  expect_object(j, scope);
  reject_unknown(
      j, {"master_seed", "points", "nets", "epochs", "hidden", "lr", "noise", "support", "grid"},
      scope);
  RegressDemoConfig cfg;
  read_u64(j, "master_seed", cfg.master_seed, scope);
  read_int(j, "points", cfg.points, scope);
  read_int(j, "nets", cfg.nets, scope);
  read_int(j, "epochs", cfg.epochs, scope);
  read_int_list(j, "hidden", cfg.hidden, scope);
  read_double(j, "lr", cfg.lr, scope);
  read_double(j, "noise", cfg.noise, scope);
  if (j.contains("support")) {
    const auto& s = j.at("support");
    if (!s.is_array() || s.size() != 2)
      throw ConfigError(scope + ": support must be an array of exactly two [lo, hi] intervals");
    cfg.support.clear();
    for (const auto& iv : s) {
      if (!iv.is_array() || iv.size() != 2 || !iv.at(0).is_number() || !iv.at(1).is_number())
        throw ConfigError(scope + ": support intervals must be [lo, hi] number pairs");
      cfg.support.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    }
  }
  if (j.contains("grid")) {
    const std::string gscope = "regress-demo config grid";
    const auto& g = j.at("grid");
    expect_object(g, gscope);
    reject_unknown(g, {"lo", "hi", "points"}, gscope);
    read_double(g, "lo", cfg.grid.lo, gscope);
    read_double(g, "hi", cfg.grid.hi, gscope);
    read_int(g, "points", cfg.grid.points, gscope);
  }
  check_min(cfg.points, 1, "points", scope);
  check_min(cfg.nets, 2, "nets", scope);
  check_min(cfg.epochs, 1, "epochs", scope);
  for (int h : cfg.hidden)
    if (h < 1) throw ConfigError(scope + ": hidden widths must be positive");
  check_positive(cfg.lr, "lr", scope);
  check_min(cfg.noise, 0.0, "noise", scope);
  for (const auto& iv : cfg.support)
    if (!(iv.lo < iv.hi)) throw ConfigError(scope + ": support intervals must satisfy lo < hi");
  if (!(cfg.support[0].hi < cfg.support[1].lo))
    throw ConfigError(scope + ": support intervals must be disjoint and ascending");
  if (!(cfg.grid.lo < cfg.grid.hi)) throw ConfigError(scope + ": grid lo must be below hi");
  check_min(cfg.grid.points, 2, "points", "regress-demo config grid");
  return cfg;
}

inline nlohmann::json regress_demo_config_json(const RegressDemoConfig& cfg) {
  nlohmann::json support = nlohmann::json::array();
  for (const auto& iv : cfg.support) support.push_back({iv.lo, iv.hi});
  return nlohmann::json{
      {"master_seed", cfg.master_seed},
      {"points", cfg.points},
      {"nets", cfg.nets},
      {"epochs", cfg.epochs},
      {"hidden", cfg.hidden},
      {"lr", cfg.lr},
      {"noise", cfg.noise},
      {"support", support},
      {"grid", {{"lo", cfg.grid.lo}, {"hi", cfg.grid.hi}, {"points", cfg.grid.points}}}};
}

// Loads a JSON config file; missing path means "all defaults" when allowed by
// the caller passing an empty string.
inline nlohmann::json load_config_json(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }
  // A manifest can be re-run directly: its embedded resolved config is used.
  if (j.is_object() && j.contains("config") && j.contains("artifact_version"))
    return j.at("config");
  return j;
}

// Applies --set overrides of the form dotted.path=value onto the raw JSON
// before validation. Values parse as JSON when possible, else as strings.
inline void apply_override(nlohmann::json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  nlohmann::json* cursor = &j;
  std::size_t begin = 0;
  while (true) {
    const auto dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot == std::string::npos ? dot : dot - begin);
    if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty path segment");
    if (dot == std::string::npos) {
      (*cursor)[key] = value;
      return;
    }
    cursor = &(*cursor)[key];
    begin = dot + 1;
  }
}

inline void apply_overrides(nlohmann::json& j, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) apply_override(j, a);
}

}  // namespace explab
