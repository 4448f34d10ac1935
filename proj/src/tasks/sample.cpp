#include "gn/tasks/sample.hpp"

#include <stdexcept>

#include "gn/tasks/physics.hpp"
#include "gn/tasks/shortest_path.hpp"
#include "gn/tasks/sort.hpp"

namespace gn::tasks {

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {"shortest_path", "sort", "physics"};
  return names;
}

std::string to_string(Task t) { return task_names()[static_cast<std::size_t>(t)]; }

Task task_from_string(const std::string& s) {
  const auto& names = task_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == s) return static_cast<Task>(i);
  throw std::invalid_argument("unknown task '" + s + "' (shortest_path, sort, physics)");
}

TaskParams default_params(Task t) {
  TaskParams p;
  p.task = t;
  switch (t) {
    case Task::ShortestPath:
      p.min_size = 8;
      p.max_size = 16;
      break;
    case Task::Sort:
      p.min_size = 2;
      p.max_size = 8;
      break;
    case Task::Physics:
      p.min_size = 4;
      p.max_size = 4;
      break;
  }
  return p;
}

Sample generate(const TaskParams& p, Rng& rng) {
  if (p.min_size > p.max_size) throw std::invalid_argument("min_size exceeds max_size");
  const std::size_t n = p.min_size + rng.below(p.max_size - p.min_size + 1);
  switch (p.task) {
    case Task::ShortestPath: return to_sample(gen_shortest_path(n, p.connectivity, rng));
    case Task::Sort: return to_sample(gen_sort(n, rng));
    case Task::Physics: return gen_physics_sample(n, p, rng);
  }
  throw std::invalid_argument("unknown task");
}

std::vector<Sample> generate_many(const TaskParams& p, std::size_t count, std::uint64_t seed) {
  std::vector<Sample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, i));
    out.push_back(generate(p, rng));
  }
  return out;
}

}  // namespace gn::tasks
