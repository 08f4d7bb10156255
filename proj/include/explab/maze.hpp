#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "explab/errors.hpp"
#include "explab/linalg.hpp"
#include "explab/rng.hpp"

namespace explab {

// Grid cell, row-major addressing. Row 0 is the top of the maze.
struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell& a, const Cell& b) { return a.row == b.row && a.col == b.col; }
  friend bool operator!=(const Cell& a, const Cell& b) { return !(a == b); }
};

// Action encoding shared by every maze consumer.
enum MazeAction : int { kLeft = 0, kRight = 1, kUp = 2, kDown = 3 };
inline constexpr int kMazeActionCount = 4;

struct MazeSpec {
  int width = 10;
  int height = 10;
  Cell start{0, 0};
  Cell goal{9, 9};
  std::vector<std::uint8_t> wall_grid;  // height*width, row-major, 1 = wall
  double slip_prob = 0.1;
  double wall_bump_reward = -1.0;
  double goal_reward = 1000.0;
  int max_steps = 1000;
  double wall_density = 0.0;
  std::uint64_t seed = 0;

  bool in_bounds(const Cell& c) const {
    return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width;
  }
  bool is_wall(const Cell& c) const {
    return wall_grid[static_cast<std::size_t>(c.row) * width + c.col] != 0;
  }
  std::vector<Cell> wall_list() const {
    std::vector<Cell> out;
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c)
        if (wall_grid[static_cast<std::size_t>(r) * width + c]) out.push_back({r, c});
    return out;
  }
};

inline Cell action_delta(int action) {
  switch (action) {
    case kLeft: return {0, -1};
    case kRight: return {0, 1};
    case kUp: return {-1, 0};
    case kDown: return {1, 0};
    default: throw InvalidInputError("action_delta: unknown action " + std::to_string(action));
  }
}

// Perpendicular slip pair for an intended move, in fixed order so the
// realized-action draw is reproducible.
inline std::pair<int, int> slip_pair(int action) {
  if (action == kLeft || action == kRight) return {kUp, kDown};
  if (action == kUp || action == kDown) return {kLeft, kRight};
  throw InvalidInputError("slip_pair: unknown action " + std::to_string(action));
}

// Breadth-first distances from a source through open cells. -1 = unreachable.
inline std::vector<int> bfs_distances(const MazeSpec& spec, const Cell& source) {
  std::vector<int> dist(static_cast<std::size_t>(spec.width) * spec.height, -1);
  auto idx = [&](const Cell& c) { return static_cast<std::size_t>(c.row) * spec.width + c.col; };
  std::deque<Cell> queue;
  dist[idx(source)] = 0;
  queue.push_back(source);
  while (!queue.empty()) {
    const Cell cur = queue.front();
    queue.pop_front();
    for (int a = 0; a < kMazeActionCount; ++a) {
      const Cell d = action_delta(a);
      const Cell nxt{cur.row + d.row, cur.col + d.col};
      if (!spec.in_bounds(nxt) || spec.is_wall(nxt)) continue;
      if (dist[idx(nxt)] >= 0) continue;
      dist[idx(nxt)] = dist[idx(cur)] + 1;
      queue.push_back(nxt);
    }
  }
  return dist;
}

inline bool maze_solvable(const MazeSpec& spec) {
  const auto dist = bfs_distances(spec, spec.start);
  return dist[static_cast<std::size_t>(spec.goal.row) * spec.width + spec.goal.col] >= 0;
}

// Number of moves on a shortest open path start -> goal.
inline int shortest_path_length(const MazeSpec& spec) {
  const auto dist = bfs_distances(spec, spec.start);
  const int d = dist[static_cast<std::size_t>(spec.goal.row) * spec.width + spec.goal.col];
  if (d < 0) throw UnreachableError("shortest_path_length: goal unreachable");
  return d;
}

// Walls on a start -> goal path that crosses as few walls as possible
// (0/1 breadth-first search: stepping onto a wall costs 1, open cells 0).
inline std::vector<int> min_wall_removal(const MazeSpec& spec) {
  const int cells = spec.width * spec.height;
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> cost(static_cast<std::size_t>(cells), kInf);
  std::vector<int> parent(static_cast<std::size_t>(cells), -1);
  const int start = spec.start.row * spec.width + spec.start.col;
  const int goal = spec.goal.row * spec.width + spec.goal.col;
  std::deque<int> frontier{start};
  cost[static_cast<std::size_t>(start)] = 0;
  while (!frontier.empty()) {
    const int idx = frontier.front();
    frontier.pop_front();
    const Cell here{idx / spec.width, idx % spec.width};
    for (int a = 0; a < kMazeActionCount; ++a) {
      const Cell d = action_delta(a);
      const Cell next{here.row + d.row, here.col + d.col};
      if (!spec.in_bounds(next)) continue;
      const int nidx = next.row * spec.width + next.col;
      const int step = spec.wall_grid[static_cast<std::size_t>(nidx)] ? 1 : 0;
      const int c = cost[static_cast<std::size_t>(idx)] + step;
      if (c < cost[static_cast<std::size_t>(nidx)]) {
        cost[static_cast<std::size_t>(nidx)] = c;
        parent[static_cast<std::size_t>(nidx)] = idx;
        if (step == 0) frontier.push_front(nidx);
        else frontier.push_back(nidx);
      }
    }
  }
  std::vector<int> walls;
  for (int idx = goal; idx != -1 && idx != start; idx = parent[static_cast<std::size_t>(idx)])
    if (spec.wall_grid[static_cast<std::size_t>(idx)]) walls.push_back(idx);
  return walls;
}

// Draws wall layouts until one is solvable. Deterministic in (seed, density):
// attempt i uses the derived child seed i, so retries never change the result
// of a successful earlier attempt. Density 0.5 leaves the open cells below
// the site-percolation threshold, so for rare seeds every draw is blocked;
// the final draw is then patched by removing the fewest walls that reconnect
// start and goal, keeping the wall count within a handful of the target.
inline MazeSpec generate_maze(std::uint64_t seed, double density, int width = 10, int height = 10) {
  if (width < 2 || height < 2) throw InvalidInputError("generate_maze: grid too small");
  if (!(density >= 0.0 && density <= 0.6))
    throw InvalidInputError("generate_maze: density out of range [0, 0.6]");
  MazeSpec spec;
  spec.width = width;
  spec.height = height;
  spec.start = {0, 0};
  spec.goal = {height - 1, width - 1};
  spec.wall_density = density;
  spec.seed = seed;
  const int cells = width * height;
  const int n_walls = static_cast<int>(std::llround(density * cells));
  std::vector<int> candidates;
  candidates.reserve(cells - 2);
  for (int i = 0; i < cells; ++i) {
    const Cell c{i / width, i % width};
    if (c == spec.start || c == spec.goal) continue;
    candidates.push_back(i);
  }
  if (n_walls > static_cast<int>(candidates.size()))
    throw InvalidInputError("generate_maze: density leaves no room for start and goal");
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::vector<int> pool = candidates;
    spec.wall_grid.assign(static_cast<std::size_t>(cells), 0);
    for (int i = 0; i < n_walls; ++i) {
      const int j = i + rng.uniform_index(static_cast<int>(pool.size()) - i);
      std::swap(pool[i], pool[j]);
      spec.wall_grid[static_cast<std::size_t>(pool[i])] = 1;
    }
    if (maze_solvable(spec)) return spec;
  }
  for (const int idx : min_wall_removal(spec)) spec.wall_grid[static_cast<std::size_t>(idx)] = 0;
  return spec;
}

// Noisy one-hot encoding of a position: a one-hot block over rows followed by
// a one-hot block over columns, plus Gaussian noise clamped to (-0.5, 0.5) so
// per-block argmax always recovers the cell.
inline Vector encode_state(const MazeSpec& spec, const Cell& position, double noise_scale, Rng& rng) {
  if (!spec.in_bounds(position)) throw InvalidInputError("encode_state: position out of bounds");
  if (!(noise_scale >= 0.0)) throw InvalidInputError("encode_state: negative noise scale");
  Vector v(static_cast<std::size_t>(spec.height + spec.width), 0.0);
  v[static_cast<std::size_t>(position.row)] = 1.0;
  v[static_cast<std::size_t>(spec.height + position.col)] = 1.0;
  constexpr double kClamp = 0.4999;
  for (double& x : v) {
    double noise = rng.normal(0.0, noise_scale);
    noise = std::clamp(noise, -kClamp, kClamp);
    x += noise;
  }
  return v;
}

// Inverse of encode_state's block argmax; used by tests and diagnostics.
inline Cell decode_state(const MazeSpec& spec, const Vector& encoded) {
  if (encoded.size() != static_cast<std::size_t>(spec.height + spec.width))
    throw DimensionError("decode_state: encoding length mismatch");
  const auto row_end = encoded.begin() + spec.height;
  Cell c;
  c.row = static_cast<int>(std::max_element(encoded.begin(), row_end) - encoded.begin());
  c.col = static_cast<int>(std::max_element(row_end, encoded.end()) - row_end);
  return c;
}

struct EnvState {
  Cell position;
  Vector encoded;
  int steps_taken = 0;
  bool done = false;
};

struct StepOutcome {
  EnvState state;
  double reward = 0.0;
  bool done = false;
};

// One environment step. Slips realize the intended action with probability
// 1 - 2*slip_prob and each perpendicular action with probability slip_prob.
// Moves into walls or off the grid keep the agent in place at the bump
// penalty; reaching the goal pays goal_reward and terminates; hitting
// max_steps terminates whatever the final move was.
inline StepOutcome maze_step(const MazeSpec& spec, const EnvState& state, int action,
                             double noise_scale, Rng& rng) {
  if (state.done) throw ContractViolation("maze_step: episode already finished");
  if (action < 0 || action >= kMazeActionCount)
    throw InvalidInputError("maze_step: unknown action " + std::to_string(action));
  int realized = action;
  const double u = rng.uniform();
  if (u < spec.slip_prob) {
    realized = slip_pair(action).first;
  } else if (u < 2.0 * spec.slip_prob) {
    realized = slip_pair(action).second;
  }
  StepOutcome out;
  const Cell d = action_delta(realized);
  const Cell target{state.position.row + d.row, state.position.col + d.col};
  Cell next = state.position;
  if (!spec.in_bounds(target) || spec.is_wall(target)) {
    out.reward = spec.wall_bump_reward;
  } else {
    next = target;
    if (next == spec.goal) {
      out.reward = spec.goal_reward;
      out.done = true;
    }
  }
  out.state.position = next;
  out.state.steps_taken = state.steps_taken + 1;
  if (out.state.steps_taken >= spec.max_steps) out.done = true;
  out.state.done = out.done;
  out.state.encoded = encode_state(spec, next, noise_scale, rng);
  return out;
}

// Owns the per-episode state and the environment's random stream.
class MazeEnv {
 public:
  MazeEnv(MazeSpec spec, double noise_scale, std::uint64_t seed)
      : spec_(std::move(spec)), noise_scale_(noise_scale), rng_(seed) {
    reset();
  }

  const EnvState& reset() {
    state_.position = spec_.start;
    state_.steps_taken = 0;
    state_.done = false;
    state_.encoded = encode_state(spec_, spec_.start, noise_scale_, rng_);
    return state_;
  }

  StepOutcome step(int action) {
    StepOutcome out = maze_step(spec_, state_, action, noise_scale_, rng_);
    state_ = out.state;
    return out;
  }

  const EnvState& state() const { return state_; }
  const MazeSpec& spec() const { return spec_; }
  double noise_scale() const { return noise_scale_; }

 private:
  MazeSpec spec_;
  double noise_scale_;
  Rng rng_;
  EnvState state_;
};

// Replayable experience. Encoded vectors are stored as seen: next_state of
// transition i and state of transition i+1 come from the same visit, so they
// chain exactly; a fresh visit to the same cell re-samples the noise.
struct Transition {
  Vector state;
  int action = 0;
  double reward = 0.0;
  Vector next_state;
  bool done = false;
};

struct EpisodeRecord {
  std::vector<Transition> transitions;

  int length() const { return static_cast<int>(transitions.size()); }
  double total_reward() const {
    double s = 0.0;
    for (const auto& t : transitions) s += t.reward;
    return s;
  }
};

}  // namespace explab
