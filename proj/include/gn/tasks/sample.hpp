#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gn/graph.hpp"
#include "gn/random.hpp"

namespace gn::tasks {

enum class Task { ShortestPath, Sort, Physics };

std::string to_string(Task t);
/// Throws std::invalid_argument naming the valid tasks.
Task task_from_string(const std::string& s);
const std::vector<std::string>& task_names();

/// One supervised example. For shortest path and sort the target has the
/// input's structure with a single 0/1 label per node and per edge. For
/// physics both graphs are raw states (see physics.hpp) one timestep apart.
struct Sample {
  Task task = Task::ShortestPath;
  Graph input;
  Graph target;

  bool operator==(const Sample&) const = default;
};

/// Generator settings. Sizes (nodes, list length, masses) are drawn
/// uniformly from [min_size, max_size].
struct TaskParams {
  Task task = Task::ShortestPath;
  std::size_t min_size = 8;
  std::size_t max_size = 16;
  double connectivity = 0.45;  // geometric-graph radius for shortest path
  bool fixed_ends = true;      // physics: pin both ends of the chain
  double gravity = -10.0;      // physics: vertical gravity (m/s^2)
  double dt = 0.02;            // physics: timestep (s)
  std::size_t warmup = 50;     // physics: up to this many simulated steps before the pair
};

/// Default generator settings of each task.
TaskParams default_params(Task t);

Sample generate(const TaskParams& p, Rng& rng);
std::vector<Sample> generate_many(const TaskParams& p, std::size_t count, std::uint64_t seed);

}  // namespace gn::tasks
