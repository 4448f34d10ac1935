#include "gn/tasks/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "gn/tasks/physics.hpp"

namespace gn::tasks {
namespace {

Metrics evaluate_labels(Model& model, const std::vector<Sample>& samples) {
  std::size_t node_ok = 0, nodes = 0, edge_ok = 0, edges = 0, solved = 0;
  for (const Sample& s : samples) {
    const Graph pred = model.predict(s.input);
    if (pred.nodes.size() != s.target.nodes.size() || pred.edges.size() != s.target.edges.size()) {
      throw std::invalid_argument("prediction does not match the target structure");
    }
    bool all = true;
    for (std::size_t i = 0; i < pred.nodes.size(); ++i) {
      const bool ok = (pred.nodes[i].at(0) > 0) == (s.target.nodes[i].at(0) > 0.5);
      node_ok += ok;
      all = all && ok;
    }
    for (std::size_t k = 0; k < pred.edges.size(); ++k) {
      const bool ok = (pred.edges[k].attr.at(0) > 0) == (s.target.edges[k].attr.at(0) > 0.5);
      edge_ok += ok;
      all = all && ok;
    }
    nodes += pred.nodes.size();
    edges += pred.edges.size();
    solved += all;
  }
  Metrics m;
  m.samples = samples.size();
  m.node_acc = nodes ? static_cast<double>(node_ok) / static_cast<double>(nodes) : 1.0;
  m.edge_acc = edges ? static_cast<double>(edge_ok) / static_cast<double>(edges) : 1.0;
  m.graph_solved = static_cast<double>(solved) / static_cast<double>(samples.size());
  return m;
}

Metrics evaluate_physics(Model& model, const std::vector<Sample>& samples, std::size_t horizon) {
  Metrics m;
  m.samples = samples.size();
  m.horizon = horizon;
  double sq = 0.0, disp = 0.0;
  std::size_t count = 0;
  for (std::size_t idx = 0; idx < samples.size(); ++idx) {
    const Sample& s = samples[idx];
    const PhysicsState start = graph_to_state(s.input);
    PhysicsState truth = horizon == 1 ? graph_to_state(s.target) : start;
    if (horizon != 1)
      for (std::size_t t = 0; t < horizon; ++t) truth = physics_step(truth);
    const Trajectory traj = rollout(model, s.input, horizon);
    if (traj.truncated) {
      m.numerical_failure = true;
      m.diagnostic = "sample " + std::to_string(idx) + ": " + traj.diagnostic;
      m.rmse = std::numeric_limits<double>::quiet_NaN();
      return m;
    }
    const PhysicsState pred = graph_to_state(traj.states.back());
    if (pred.size() != truth.size()) throw std::invalid_argument("prediction changed the number of masses");
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (start.fixed[i]) continue;
      const double ex = pred.position[i][0] - truth.position[i][0];
      const double ey = pred.position[i][1] - truth.position[i][1];
      sq += ex * ex + ey * ey;
      disp += std::hypot(truth.position[i][0] - start.position[i][0], truth.position[i][1] - start.position[i][1]);
      ++count;
    }
  }
  m.rmse = count ? std::sqrt(sq / static_cast<double>(count)) : 0.0;
  m.mean_displacement = count ? disp / static_cast<double>(count) : 0.0;
  return m;
}

}  // namespace

Metrics evaluate(Model& model, const std::vector<Sample>& samples, std::size_t horizon) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  for (const Sample& s : samples) {
    if (s.task != model.task()) {
      throw std::invalid_argument("sample for task " + to_string(s.task) + " given to a " + to_string(model.task()) +
                                  " model");
    }
  }
  return model.task() == Task::Physics ? evaluate_physics(model, samples, horizon) : evaluate_labels(model, samples);
}

std::vector<std::string> metric_names(Task t) {
  if (t == Task::Physics) return {"rmse", "mean_displacement"};
  return {"node_acc", "edge_acc", "graph_solved"};
}

std::vector<double> metric_values(Task t, const Metrics& m) {
  if (t == Task::Physics) return {m.rmse, m.mean_displacement};
  return {m.node_acc, m.edge_acc, m.graph_solved};
}

Json metrics_to_json(Task t, const Metrics& m) {
  Json j;
  const auto names = metric_names(t);
  const auto values = metric_values(t, m);
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = std::isfinite(values[i]) ? Json(values[i]) : Json(nullptr);
  if (t == Task::Physics) j["horizon"] = m.horizon;
  j["samples"] = m.samples;
  return j;
}

}  // namespace gn::tasks
