#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "explab/config.hpp"
#include "explab/csv.hpp"
#include "explab/harness.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;
  bool stamp = false;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "JSON config file (or a manifest.json to re-run)");
  sub->add_option("--out", args.out_dir, "output directory");
  args.seed_opt = sub->add_option("--seed", args.seed, "master seed (overrides config)");
  sub->add_option("--set", args.overrides,
                  "dotted-path config override, e.g. --set trainer.ensemble_size=5");
  sub->add_flag("--stamp", args.stamp, "include a wall-clock timestamp in the manifest");
}

nlohmann::json loaded_config(const CommonArgs& args) {
  nlohmann::json j = explab::load_config_json(args.config_path);
  explab::apply_overrides(j, args.overrides);
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"explab: exploration-bonus laboratory"};
  app.require_subcommand(1);

  CommonArgs maze_args;
  int maze_seeds = 0;
  int maze_workers = 0;
  CLI::App* maze = app.add_subcommand("maze-run", "train maze agents across variants and seeds");
  add_common(maze, maze_args);
  CLI::Option* seeds_opt =
      maze->add_option("--seeds", maze_seeds, "seeds per (variant, density) cell");
  CLI::Option* workers_opt = maze->add_option("--workers", maze_workers, "parallel run workers");

  CommonArgs lsvi_args;
  CLI::App* lsvi = app.add_subcommand("lsvi-verify", "bonus-equivalence numerical check");
  add_common(lsvi, lsvi_args);

  CommonArgs regress_args;
  CLI::App* regress = app.add_subcommand("regress-demo", "1-d ensemble disagreement bands");
  add_common(regress, regress_args);

  std::string trace_path;
  std::string bonus_out = "out";
  int window = 25;
  long learning_starts = explab::TrainerConfig{}.learning_starts;
  bool bonus_stamp = false;
  CLI::App* bonus = app.add_subcommand("bonus-trace", "bonus trend analysis of a trace.csv");
  bonus->add_option("--trace", trace_path, "trace.csv produced by maze-run")->required();
  bonus->add_option("--out", bonus_out, "output directory");
  bonus->add_option("--window", window, "odd smoothing window in rows");
  bonus->add_option("--learning-starts", learning_starts,
                    "frame before which a peak does not count");
  bonus->add_flag("--stamp", bonus_stamp, "include a wall-clock timestamp in the summary");

  std::string ckpt_base;
  std::string maze_path;
  std::string eval_out;
  int eval_episodes = 20;
  std::uint64_t eval_seed = 1;
  double eval_noise = 0.1;
  bool eval_vote = false;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on a stored maze");
  eval->add_option("--checkpoint", ckpt_base, "checkpoint base path (without .json/.bin)")
      ->required();
  eval->add_option("--maze", maze_path, "maze.json path")->required();
  eval->add_option("--episodes", eval_episodes, "evaluation episodes");
  eval->add_option("--seed", eval_seed, "evaluation seed");
  eval->add_option("--noise", eval_noise, "observation noise scale");
  eval->add_flag("--vote", eval_vote, "act by plurality vote across heads");
  eval->add_option("--out", eval_out, "optional JSON result path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (maze->parsed()) {
      explab::MazeRunConfig cfg = explab::parse_maze_run_config(loaded_config(maze_args));
      if (maze_args.seed_opt->count() > 0) cfg.master_seed = maze_args.seed;
      if (seeds_opt->count() > 0) cfg.seeds = maze_seeds;
      if (workers_opt->count() > 0) cfg.workers = maze_workers;
      const explab::MazeSuiteResult result =
          explab::run_maze_suite(cfg, maze_args.out_dir, maze_args.stamp);
      for (const auto& group : result.summary["groups"])
        std::cout << group["variant"].get<std::string>() << " d="
                  << explab::format_number(group["density"].get<double>())
                  << " mean_relative_length="
                  << explab::format_number(group["mean_relative_length"].get<double>()) << " (n="
                  << group["n"].get<std::size_t>() << ")\n";
      std::cout << "wrote " << maze_args.out_dir << "/summary.json\n";
    } else if (lsvi->parsed()) {
      explab::LsviVerifyConfig cfg = explab::parse_lsvi_verify_config(loaded_config(lsvi_args));
      if (lsvi_args.seed_opt->count() > 0) cfg.master_seed = lsvi_args.seed;
      const nlohmann::json report =
          explab::run_lsvi_verify(cfg, lsvi_args.out_dir, lsvi_args.stamp);
      std::cout << "mc max_rel_error="
                << explab::format_number(report["mc"]["max_rel_error"].get<double>())
                << " tolerance=" << explab::format_number(report["mc"]["tolerance"].get<double>())
                << " pass=" << (report["mc"]["pass"].get<bool>() ? "1" : "0") << "\n";
      std::cout << "bootstrap max_rel_error="
                << explab::format_number(report["bootstrap"]["max_rel_error"].get<double>())
                << " tolerance="
                << explab::format_number(report["bootstrap"]["tolerance"].get<double>())
                << " pass=" << (report["bootstrap"]["pass"].get<bool>() ? "1" : "0") << "\n";
      std::cout << "overall_pass=" << (report["overall_pass"].get<bool>() ? "1" : "0") << "\n";
      std::cout << "wrote " << lsvi_args.out_dir << "/report.json\n";
    } else if (regress->parsed()) {
      explab::RegressDemoConfig cfg =
          explab::parse_regress_demo_config(loaded_config(regress_args));
      if (regress_args.seed_opt->count() > 0) cfg.master_seed = regress_args.seed;
      const nlohmann::json summary =
          explab::run_regress_demo(cfg, regress_args.out_dir, regress_args.stamp);
      std::cout << "gap_mean_sigma="
                << explab::format_number(summary["gap_mean_sigma"].get<double>())
                << " support_mean_sigma="
                << explab::format_number(summary["support_mean_sigma"].get<double>())
                << " inflated=" << (summary["gap_inflated"].get<bool>() ? "1" : "0") << "\n";
      std::cout << "wrote " << regress_args.out_dir << "/regress_summary.json\n";
    } else if (bonus->parsed()) {
      const nlohmann::json summary =
          explab::run_bonus_trace(trace_path, window, learning_starts, bonus_out, bonus_stamp);
      std::cout << "status=" << summary["status"].get<std::string>() << "\n";
      std::cout << "wrote " << bonus_out << "/bonus_summary.json\n";
    } else if (eval->parsed()) {
      const nlohmann::json result = explab::run_eval(ckpt_base, maze_path, eval_episodes,
                                                     eval_seed, eval_noise, eval_vote, eval_out);
      std::cout << "relative_length="
                << explab::format_number(result["relative_length"].get<double>()) << "\n";
    }
  } catch (const explab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
