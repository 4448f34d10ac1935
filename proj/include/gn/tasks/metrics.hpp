#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "gn/graph_json.hpp"
#include "gn/tasks/models.hpp"

namespace gn::tasks {

struct Metrics {
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

  std::size_t samples = 0;
  // Shortest path and sort: labels are logit > 0, pooled over all samples.
  double node_acc = kUnset;
  double edge_acc = kUnset;
  double graph_solved = kUnset;  // fraction of samples with every label right
  // Physics: position error of free masses after `horizon` steps.
  double rmse = kUnset;
  double mean_displacement = kUnset;  // mean true distance moved by free masses
  std::size_t horizon = 1;
  bool numerical_failure = false;
  std::string diagnostic;
};

/// Throws std::invalid_argument if a sample belongs to another task. For
/// physics the model is rolled out `horizon` steps and compared with the
/// simulator; a rollout that hits non-finite values sets numerical_failure.
Metrics evaluate(Model& model, const std::vector<Sample>& samples, std::size_t horizon = 1);

/// {"node_acc","edge_acc","graph_solved"} or {"rmse","mean_displacement","horizon"},
/// plus "samples".
Json metrics_to_json(Task t, const Metrics& m);

std::vector<std::string> metric_names(Task t);
std::vector<double> metric_values(Task t, const Metrics& m);

}  // namespace gn::tasks
