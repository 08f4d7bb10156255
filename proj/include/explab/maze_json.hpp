#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "explab/errors.hpp"
#include "explab/maze.hpp"

namespace explab {

// JSON layout: walls as a sorted list of [row, col] pairs so files diff
// cleanly; the grid is rebuilt on load.
inline void to_json(nlohmann::json& j, const MazeSpec& spec) {
  nlohmann::json walls = nlohmann::json::array();
  for (const Cell& c : spec.wall_list()) walls.push_back({c.row, c.col});
  j = nlohmann::json{{"width", spec.width},
                     {"height", spec.height},
                     {"start", {spec.start.row, spec.start.col}},
                     {"goal", {spec.goal.row, spec.goal.col}},
                     {"walls", walls},
                     {"slip_prob", spec.slip_prob},
                     {"wall_bump_reward", spec.wall_bump_reward},
                     {"goal_reward", spec.goal_reward},
                     {"max_steps", spec.max_steps},
                     {"wall_density", spec.wall_density},
                     {"seed", spec.seed}};
}

inline void from_json(const nlohmann::json& j, MazeSpec& spec) {
  try {
    spec.width = j.at("width").get<int>();
    spec.height = j.at("height").get<int>();
    spec.start = {j.at("start").at(0).get<int>(), j.at("start").at(1).get<int>()};
    spec.goal = {j.at("goal").at(0).get<int>(), j.at("goal").at(1).get<int>()};
    spec.slip_prob = j.at("slip_prob").get<double>();
    spec.wall_bump_reward = j.at("wall_bump_reward").get<double>();
    spec.goal_reward = j.at("goal_reward").get<double>();
    spec.max_steps = j.at("max_steps").get<int>();
    spec.wall_density = j.at("wall_density").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    if (spec.width < 1 || spec.height < 1) throw ConfigError("maze json: non-positive grid size");
    spec.wall_grid.assign(static_cast<std::size_t>(spec.width) * spec.height, 0);
    for (const auto& w : j.at("walls")) {
      const Cell c{w.at(0).get<int>(), w.at(1).get<int>()};
      if (!spec.in_bounds(c)) throw ConfigError("maze json: wall out of bounds");
      spec.wall_grid[static_cast<std::size_t>(c.row) * spec.width + c.col] = 1;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("maze json: ") + e.what());
  }
}

inline void save_maze(const MazeSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("save_maze: cannot open " + path);
  out << nlohmann::json(spec).dump(2) << "\n";
}

inline MazeSpec load_maze(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("load_maze: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("load_maze: ") + e.what());
  }
  return j.get<MazeSpec>();
}

}  // namespace explab
