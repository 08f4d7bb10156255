#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "explab/config.hpp"
#include "explab/csv.hpp"
#include "explab/ensemble.hpp"
#include "explab/errors.hpp"
#include "explab/lsvi.hpp"
#include "explab/maze_json.hpp"
#include "explab/regress.hpp"
#include "explab/trainer.hpp"

namespace explab {

inline constexpr const char* kArtifactVersion = "0.1.0";

namespace detail {

// Fixed-size pool over an indexed job list. A failing job records its error;
// remaining jobs still run (their outputs are already flushed per job), and
// the first error rethrows after the join.
inline void run_jobs(int workers, int n, const std::function<void(int)>& job) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min(workers, n);
  pool.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot open " + path + " for writing");
  out << content;
}

inline std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace detail

// Training trace serialization: one row per event, chronological; cells not
// applicable to the event kind stay empty. At equal frames the training row
// precedes the episode row, matching the order things happened in the loop.
inline void write_trace_csv(const MetricTrace& trace, const std::string& path) {
  CsvWriter csv(path, {"frame", "episode_return", "mean_batch_bonus", "loss", "epsilon"});
  std::size_t ti = 0, ei = 0;
  while (ti < trace.train_events.size() || ei < trace.episodes.size()) {
    const bool take_train =
        ti < trace.train_events.size() &&
        (ei >= trace.episodes.size() || trace.train_events[ti].frame <= trace.episodes[ei].frame);
    if (take_train) {
      const TrainEvent& e = trace.train_events[ti++];
      csv.write_row({format_number(e.frame), "", format_number(e.mean_batch_bonus),
                     format_number(e.loss), format_number(e.epsilon)});
    } else {
      const EpisodeEvent& e = trace.episodes[ei++];
      csv.write_row({format_number(e.frame), format_number(e.episode_return), "", "",
                     format_number(e.epsilon)});
    }
  }
}

inline void write_eval_csv(const MetricTrace& trace, const std::string& path) {
  CsvWriter csv(path, {"frame", "relative_length"});
  for (const EvalEvent& e : trace.evals)
    csv.write_row({format_number(e.frame), format_number(e.relative_length)});
}

struct MazeRunRow {
  std::string variant;
  double density = 0.0;
  int seed_index = 0;
  std::uint64_t run_seed = 0;
  std::uint64_t maze_seed = 0;
  double relative_length = 0.0;
  int episodes_completed = 0;
  std::string dir;
};

struct MazeSuiteResult {
  std::vector<MazeRunRow> rows;
  nlohmann::json summary;
};

// Full experiment sweep: density x seed x variant. Runs sharing a (density,
// seed) pair use the same maze, the same initialization, and the same
// environment stream regardless of variant, so cross-variant comparisons are
// paired. Each run writes its own directory as it completes.
inline MazeSuiteResult run_maze_suite(const MazeRunConfig& cfg, const std::string& out_dir,
                                      bool stamp = false) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  fs::create_directories(out_dir + "/runs");

  struct Job {
    Variant variant;
    double density = 0.0;
    int density_index = 0;
    int seed_index = 0;
    std::uint64_t pair_seed = 0;
    std::uint64_t maze_seed = 0;
    std::string dir;
  };
  std::vector<Job> jobs;
  for (std::size_t di = 0; di < cfg.densities.size(); ++di)
    for (int si = 0; si < cfg.seeds; ++si) {
      const std::uint64_t pair_seed =
          derive_seed(derive_seed(cfg.master_seed, 1000 + di), static_cast<std::uint64_t>(si));
      for (Variant v : cfg.variants) {
        Job job;
        job.variant = v;
        job.density = cfg.densities[di];
        job.density_index = static_cast<int>(di);
        job.seed_index = si;
        job.pair_seed = pair_seed;
        job.maze_seed = derive_seed(pair_seed, 10);
        job.dir = "runs/" + variant_name(v) + "_d" + format_number(cfg.densities[di]) + "_s" +
                  format_number(si);
        jobs.push_back(job);
      }
    }

  MazeSuiteResult result;
  result.rows.resize(jobs.size());
  auto run_one = [&](int index) {
    const Job& job = jobs[static_cast<std::size_t>(index)];
    const std::string run_dir = out_dir + "/" + job.dir;
    fs::create_directories(run_dir);
    MazeSpec maze = generate_maze(job.maze_seed, job.density, cfg.env.width, cfg.env.height);
    maze.slip_prob = cfg.env.slip_prob;
    maze.max_steps = cfg.env.max_steps;
    maze.wall_bump_reward = cfg.env.wall_bump_reward;
    maze.goal_reward = cfg.env.goal_reward;
    save_maze(maze, run_dir + "/maze.json");
    TrainerConfig trainer_cfg = cfg.trainer;
    trainer_cfg.variant = job.variant;
    TrainingHooks hooks;
    hooks.eval_period = cfg.eval.period;
    const std::uint64_t eval_stream = derive_seed(job.pair_seed, 4);
    hooks.on_eval = [&](long frame, const BootstrappedNet& net) {
      Rng eval_rng(derive_seed(eval_stream, static_cast<std::uint64_t>(frame)));
      return evaluate_relative_length(net, maze, cfg.env.noise_scale, cfg.eval.episodes, eval_rng,
                                      cfg.eval.vote);
    };
    auto factory = [&](std::uint64_t env_seed) {
      return MazeEnv(maze, cfg.env.noise_scale, env_seed);
    };
    TrainingResult training = run_training(factory, trainer_cfg, job.pair_seed, hooks);
    write_trace_csv(training.trace, run_dir + "/trace.csv");
    write_eval_csv(training.trace, run_dir + "/eval.csv");
    if (cfg.save_checkpoints) save_checkpoint(training.net, run_dir + "/checkpoint");
    Rng final_rng(derive_seed(job.pair_seed, 5));
    const double rel = evaluate_relative_length(training.net, maze, cfg.env.noise_scale,
                                                cfg.eval.episodes, final_rng, cfg.eval.vote);
    MazeRunRow row;
    row.variant = variant_name(job.variant);
    row.density = job.density;
    row.seed_index = job.seed_index;
    row.run_seed = job.pair_seed;
    row.maze_seed = job.maze_seed;
    row.relative_length = rel;
    row.episodes_completed = static_cast<int>(training.trace.episodes.size());
    row.dir = job.dir;
    result.rows[static_cast<std::size_t>(index)] = row;
  };
  detail::run_jobs(cfg.workers, static_cast<int>(jobs.size()), run_one);

  {
    CsvWriter csv(out_dir + "/summary.csv",
                  {"variant", "density", "seed", "relative_length", "episodes_completed"});
    for (const MazeRunRow& row : result.rows)
      csv.write_row({row.variant, format_number(row.density), format_number(row.seed_index),
                     format_number(row.relative_length), format_number(row.episodes_completed)});
  }

  nlohmann::json groups = nlohmann::json::array();
  for (Variant v : cfg.variants)
    for (double density : cfg.densities) {
      std::vector<double> values;
      for (const MazeRunRow& row : result.rows)
        if (row.variant == variant_name(v) && row.density == density)
          values.push_back(row.relative_length);
      double mean = 0.0;
      for (double x : values) mean += x;
      mean /= static_cast<double>(values.size());
      double var = 0.0;
      for (double x : values) var += (x - mean) * (x - mean);
      var /= static_cast<double>(values.size());
      groups.push_back({{"variant", variant_name(v)},
                        {"density", density},
                        {"n", values.size()},
                        {"mean_relative_length", mean},
                        {"std_relative_length", std::sqrt(var)}});
    }

  nlohmann::json paired = nlohmann::json::array();
  const bool has_ob2i =
      std::find(cfg.variants.begin(), cfg.variants.end(), Variant::kOb2i) != cfg.variants.end();
  const bool has_bebu =
      std::find(cfg.variants.begin(), cfg.variants.end(), Variant::kBebu) != cfg.variants.end();
  if (has_ob2i && has_bebu)
    for (double density : cfg.densities) {
      std::vector<double> ob2i(static_cast<std::size_t>(cfg.seeds), 0.0);
      std::vector<double> bebu(static_cast<std::size_t>(cfg.seeds), 0.0);
      for (const MazeRunRow& row : result.rows) {
        if (row.density != density) continue;
        if (row.variant == "ob2i") ob2i[static_cast<std::size_t>(row.seed_index)] = row.relative_length;
        if (row.variant == "bebu") bebu[static_cast<std::size_t>(row.seed_index)] = row.relative_length;
      }
      int wins = 0;
      double ob2i_mean = 0.0, bebu_mean = 0.0;
      for (int s = 0; s < cfg.seeds; ++s) {
        if (ob2i[static_cast<std::size_t>(s)] <= bebu[static_cast<std::size_t>(s)]) ++wins;
        ob2i_mean += ob2i[static_cast<std::size_t>(s)];
        bebu_mean += bebu[static_cast<std::size_t>(s)];
      }
      ob2i_mean /= cfg.seeds;
      bebu_mean /= cfg.seeds;
      paired.push_back({{"density", density},
                        {"seeds", cfg.seeds},
                        {"ob2i_not_worse_seeds", wins},
                        {"ob2i_mean", ob2i_mean},
                        {"bebu_mean", bebu_mean}});
    }

  result.summary = nlohmann::json{{"groups", groups}, {"paired_ob2i_vs_bebu", paired},
                                  {"runs", result.rows.size()}};
  detail::write_text_file(out_dir + "/summary.json", result.summary.dump(2) + "\n");

  nlohmann::json manifest;
  manifest["artifact_version"] = kArtifactVersion;
  manifest["command"] = "maze-run";
  manifest["config"] = maze_run_config_json(cfg);
  nlohmann::json runs = nlohmann::json::array();
  for (const MazeRunRow& row : result.rows)
    runs.push_back({{"variant", row.variant},
                    {"density", row.density},
                    {"seed_index", row.seed_index},
                    {"run_seed", row.run_seed},
                    {"maze_seed", row.maze_seed},
                    {"dir", row.dir}});
  manifest["runs"] = runs;
  if (stamp) manifest["timestamp"] = detail::iso_timestamp();
  detail::write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
  return result;
}

// Random ridge design with unit-ball rows, targets from a random true weight
// vector plus unit-variance noise (the regime where the posterior and the
// sampling variance line up).
struct RidgeDesign {
  Matrix rows;
  Vector targets;
};

inline RidgeDesign make_ridge_design(int rows, int dim, Rng& rng) {
  RidgeDesign design;
  design.rows = Matrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(dim));
  design.targets = Vector(static_cast<std::size_t>(rows), 0.0);
  Vector w_true(static_cast<std::size_t>(dim));
  for (double& w : w_true) w = rng.normal();
  for (int r = 0; r < rows; ++r) {
    double norm_sq = 0.0;
    for (int j = 0; j < dim; ++j) {
      const double v = rng.uniform(-1.0, 1.0);
      design.rows(static_cast<std::size_t>(r), static_cast<std::size_t>(j)) = v;
      norm_sq += v * v;
    }
    if (norm_sq > 1.0) {
      const double scale = 1.0 / std::sqrt(norm_sq);
      for (int j = 0; j < dim; ++j)
        design.rows(static_cast<std::size_t>(r), static_cast<std::size_t>(j)) *= scale;
    }
    double y = rng.normal();  // unit observation noise
    for (int j = 0; j < dim; ++j)
      y += design.rows(static_cast<std::size_t>(r), static_cast<std::size_t>(j)) *
           w_true[static_cast<std::size_t>(j)];
    design.targets[static_cast<std::size_t>(r)] = y;
  }
  return design;
}

inline Vector random_unit_vector(int dim, Rng& rng) {
  Vector v(static_cast<std::size_t>(dim));
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm_sq += x * x;
    }
  } while (norm_sq < 1e-12);
  const double scale = 1.0 / std::sqrt(norm_sq);
  for (double& x : v) x *= scale;
  return v;
}

// Numerical check that the ensemble-style posterior spread reproduces the
// closed-form bonus: Monte-Carlo posterior sampling on random designs, plus a
// bootstrap-resampling pass at a looser tolerance. Writes verify.csv and
// report.json into out_dir.
inline nlohmann::json run_lsvi_verify(const LsviVerifyConfig& cfg, const std::string& out_dir,
                                      bool stamp = false) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  struct Row {
    std::string section;
    std::string label;
    int d = 0;
    int m = 0;
    double lambda = 0.0;
    double closed = 0.0;
    double estimate = 0.0;
  };
  std::vector<Row> rows;

  {  // Prior-only: no data, Lambda = lambda I, probe e1.
    Row row{"mc", "prior", 2, 0, 1.0, 0.0, 0.0};
    Matrix phi(0, 2);
    Vector targets;
    Vector probe{1.0, 0.0};
    Rng rng(derive_seed(cfg.master_seed, 1));
    const auto cmp = posterior_variance_oracle(phi, targets, row.lambda, probe, cfg.samples, rng);
    row.closed = cmp.closed_form;
    row.estimate = cmp.estimate;
    rows.push_back(row);
  }
  {  // Scalar single observation: Lambda = 2, variance 1/2, bonus 1/sqrt(2).
    Row row{"mc", "scalar", 1, 1, 1.0, 0.0, 0.0};
    Matrix phi(1, 1);
    phi(0, 0) = 1.0;
    Vector targets{1.0};
    Vector probe{1.0};
    Rng rng(derive_seed(cfg.master_seed, 2));
    const auto cmp = posterior_variance_oracle(phi, targets, row.lambda, probe, cfg.samples, rng);
    row.closed = cmp.closed_form;
    row.estimate = cmp.estimate;
    rows.push_back(row);
  }
  for (int i = 0; i < cfg.designs; ++i) {
    Rng rng(derive_seed(cfg.master_seed, 100 + static_cast<std::uint64_t>(i)));
    const int d = 1 + rng.uniform_index(cfg.max_feature_dim);
    const int m = 1 + rng.uniform_index(cfg.max_rows);
    const double lambda = cfg.lambdas[static_cast<std::size_t>(i) % cfg.lambdas.size()];
    const RidgeDesign design = make_ridge_design(m, d, rng);
    for (int p = 0; p < cfg.probes_per_design; ++p) {
      Row row{"mc", "r" + format_number(i) + "p" + format_number(p), d, m, lambda, 0.0, 0.0};
      const Vector probe = random_unit_vector(d, rng);
      const auto cmp =
          posterior_variance_oracle(design.rows, design.targets, lambda, probe, cfg.samples, rng);
      row.closed = cmp.closed_form;
      row.estimate = cmp.estimate;
      rows.push_back(row);
    }
  }
  for (int b = 0; b < cfg.bootstrap.designs; ++b) {
    Rng rng(derive_seed(cfg.master_seed, 10000 + static_cast<std::uint64_t>(b)));
    const int d = 1 + rng.uniform_index(cfg.max_feature_dim);
    const RidgeDesign design = make_ridge_design(cfg.bootstrap.rows, d, rng);
    Row row{"bootstrap", "b" + format_number(b), d, cfg.bootstrap.rows, cfg.bootstrap.lambda, 0.0,
            0.0};
    const Vector probe = random_unit_vector(d, rng);
    const auto cmp = bootstrap_variance_oracle(design.rows, design.targets, cfg.bootstrap.lambda,
                                               probe, cfg.bootstrap.refits, rng);
    row.closed = cmp.closed_form;
    row.estimate = cmp.estimate;
    rows.push_back(row);
  }

  double mc_max = 0.0, boot_max = 0.0;
  int mc_rows = 0, boot_rows = 0;
  {
    CsvWriter csv(out_dir + "/verify.csv", {"section", "label", "d", "m", "lambda", "closed_form",
                                            "estimate", "rel_error", "bonus", "pass"});
    for (const Row& row : rows) {
      const double rel = std::abs(row.estimate - row.closed) / row.closed;
      const double tol = row.section == "mc" ? cfg.tolerance : cfg.bootstrap.tolerance;
      if (row.section == "mc") {
        mc_max = std::max(mc_max, rel);
        ++mc_rows;
      } else {
        boot_max = std::max(boot_max, rel);
        ++boot_rows;
      }
      csv.write_row({row.section, row.label, format_number(row.d), format_number(row.m),
                     format_number(row.lambda), format_number(row.closed),
                     format_number(row.estimate), format_number(rel),
                     format_number(std::sqrt(row.closed)), rel <= tol ? "1" : "0"});
    }
  }
  nlohmann::json report;
  report["artifact_version"] = kArtifactVersion;
  report["command"] = "lsvi-verify";
  report["config"] = lsvi_verify_config_json(cfg);
  report["mc"] = {{"rows", mc_rows}, {"max_rel_error", mc_max}, {"tolerance", cfg.tolerance},
                  {"pass", mc_max <= cfg.tolerance}};
  report["bootstrap"] = {{"rows", boot_rows},
                         {"max_rel_error", boot_max},
                         {"tolerance", cfg.bootstrap.tolerance},
                         {"pass", boot_rows == 0 || boot_max <= cfg.bootstrap.tolerance}};
  report["overall_pass"] =
      report["mc"]["pass"].get<bool>() && report["bootstrap"]["pass"].get<bool>();
  if (stamp) report["timestamp"] = detail::iso_timestamp();
  detail::write_text_file(out_dir + "/report.json", report.dump(2) + "\n");
  return report;
}

// Fits the regression ensemble and writes data.csv, bands.csv, and a summary
// with the gap-inflation statistic.
inline nlohmann::json run_regress_demo(const RegressDemoConfig& cfg, const std::string& out_dir,
                                       bool stamp = false) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const RegressDataset data =
      make_regress_dataset(cfg.points, cfg.support, cfg.noise, derive_seed(cfg.master_seed, 0));
  {
    CsvWriter csv(out_dir + "/data.csv", {"x", "y"});
    for (std::size_t i = 0; i < data.x.size(); ++i)
      csv.write_row({format_number(data.x[i]), format_number(data.y[i])});
  }
  const RegressEnsemble ensemble = fit_regress_ensemble(data, cfg.nets, cfg.hidden, cfg.epochs,
                                                        cfg.lr, derive_seed(cfg.master_seed, 1));
  const Vector grid = linspace(cfg.grid.lo, cfg.grid.hi, cfg.grid.points);
  emit_bands(ensemble, grid, out_dir + "/bands.csv");
  const Interval gap{cfg.support[0].hi, cfg.support[1].lo};
  const GapInflation stat = gap_inflation(ensemble, cfg.support, gap, grid);
  nlohmann::json summary;
  summary["artifact_version"] = kArtifactVersion;
  summary["command"] = "regress-demo";
  summary["config"] = regress_demo_config_json(cfg);
  summary["gap_mean_sigma"] = stat.gap_mean_sigma;
  summary["support_mean_sigma"] = stat.support_mean_sigma;
  summary["gap_inflated"] = stat.gap_mean_sigma > stat.support_mean_sigma;
  if (stamp) summary["timestamp"] = detail::iso_timestamp();
  detail::write_text_file(out_dir + "/regress_summary.json", summary.dump(2) + "\n");
  return summary;
}

// Rise-then-fall analysis of the mean-batch-bonus curve, mirroring the
// qualitative claim about exploration bonuses: they swell once training
// begins biting and decay as uncertainty resolves.
struct BonusTrend {
  std::string status;  // pass | fail | not-applicable | too-short
  long peak_frame = 0;
  double peak_smoothed = 0.0;
  double final_smoothed = 0.0;
  int rows = 0;
};

inline BonusTrend bonus_trend(const std::vector<std::pair<long, double>>& rows, int window,
                              long learning_starts) {
  if (window < 1 || window % 2 == 0) throw InvalidInputError("bonus_trend: window must be odd and positive");
  BonusTrend trend;
  trend.rows = static_cast<int>(rows.size());
  if (rows.empty()) {
    trend.status = "not-applicable";
    return trend;
  }
  bool any_nonzero = false;
  for (const auto& [frame, value] : rows)
    if (value != 0.0) any_nonzero = true;
  if (!any_nonzero) {
    trend.status = "not-applicable";
    return trend;
  }
  if (static_cast<int>(rows.size()) < window) {
    trend.status = "too-short";
    return trend;
  }
  const int half = window / 2;
  const int n = static_cast<int>(rows.size());
  std::vector<double> smoothed(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) sum += rows[static_cast<std::size_t>(j)].second;
    smoothed[static_cast<std::size_t>(i)] = sum / static_cast<double>(hi - lo + 1);
  }
  int peak_index = 0;
  for (int i = 1; i < n; ++i)
    if (smoothed[static_cast<std::size_t>(i)] > smoothed[static_cast<std::size_t>(peak_index)])
      peak_index = i;
  trend.peak_frame = rows[static_cast<std::size_t>(peak_index)].first;
  trend.peak_smoothed = smoothed[static_cast<std::size_t>(peak_index)];
  trend.final_smoothed = smoothed.back();
  trend.status = (trend.peak_frame > learning_starts &&
                  trend.final_smoothed < 0.5 * trend.peak_smoothed)
                     ? "pass"
                     : "fail";
  return trend;
}

inline std::vector<std::pair<long, double>> bonus_rows_from_trace(const MetricTrace& trace) {
  std::vector<std::pair<long, double>> rows;
  rows.reserve(trace.train_events.size());
  for (const TrainEvent& e : trace.train_events) rows.emplace_back(e.frame, e.mean_batch_bonus);
  return rows;
}

// CLI entry for bonus-trace: reads a trace.csv, extracts training rows,
// writes bonus.csv plus the trend summary.
inline nlohmann::json run_bonus_trace(const std::string& trace_path, int window,
                                      long learning_starts, const std::string& out_dir,
                                      bool stamp = false) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const CsvTable table = read_csv(trace_path);
  const int frame_col = table.column("frame");
  const int bonus_col = table.column("mean_batch_bonus");
  std::vector<std::pair<long, double>> rows;
  for (const auto& r : table.rows) {
    const std::string& cell = r[static_cast<std::size_t>(bonus_col)];
    if (cell.empty()) continue;
    rows.emplace_back(static_cast<long>(parse_double(r[static_cast<std::size_t>(frame_col)])),
                      parse_double(cell));
  }
  {
    CsvWriter csv(out_dir + "/bonus.csv", {"frame", "mean_batch_bonus"});
    for (const auto& [frame, value] : rows)
      csv.write_row({format_number(frame), format_number(value)});
  }
  const BonusTrend trend = bonus_trend(rows, window, learning_starts);
  nlohmann::json summary;
  summary["artifact_version"] = kArtifactVersion;
  summary["command"] = "bonus-trace";
  summary["window"] = window;
  summary["learning_starts"] = learning_starts;
  summary["rows"] = trend.rows;
  summary["status"] = trend.status;
  if (trend.status == "pass" || trend.status == "fail") {
    summary["peak_frame"] = trend.peak_frame;
    summary["peak_smoothed"] = trend.peak_smoothed;
    summary["final_smoothed"] = trend.final_smoothed;
  } else if (trend.status == "too-short") {
    summary["warning"] = "trace shorter than smoothing window; trend statistic omitted";
  }
  if (stamp) summary["timestamp"] = detail::iso_timestamp();
  detail::write_text_file(out_dir + "/bonus_summary.json", summary.dump(2) + "\n");
  return summary;
}

// CLI entry for eval: load a checkpoint, roll greedy episodes on a stored
// maze, report the relative length.
inline nlohmann::json run_eval(const std::string& checkpoint_base, const std::string& maze_path,
                               int episodes, std::uint64_t seed, double noise_scale, bool vote,
                               const std::string& out_path) {
  const BootstrappedNet net = load_checkpoint(checkpoint_base);
  const MazeSpec maze = load_maze(maze_path);
  Rng rng(seed);
  const double rel = evaluate_relative_length(net, maze, noise_scale, episodes, rng, vote);
  nlohmann::json out;
  out["artifact_version"] = kArtifactVersion;
  out["command"] = "eval";
  out["checkpoint"] = checkpoint_base;
  out["episodes"] = episodes;
  out["seed"] = seed;
  out["noise_scale"] = noise_scale;
  out["vote"] = vote;
  out["relative_length"] = rel;
  if (!out_path.empty()) detail::write_text_file(out_path, out.dump(2) + "\n");
  return out;
}

}  // namespace explab
