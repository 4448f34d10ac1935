#include "gn/tasks/models.hpp"

#include <cmath>
#include <stdexcept>

#include "gn/tasks/physics.hpp"
#include "gn/tasks/shortest_path.hpp"
#include "gn/tasks/sort.hpp"

namespace gn::tasks {
namespace {

Graph physics_features(const Graph& raw) {
  const PhysicsState s = graph_to_state(raw);
  Graph g;
  g.global_attr = {s.gravity[0] / kAccelScale, s.gravity[1] / kAccelScale};
  for (std::size_t i = 0; i < s.size(); ++i)
    g.nodes.push_back({s.velocity[i][0], s.velocity[i][1], s.mass[i], s.fixed[i] ? 1.0 : 0.0});
  auto add = [&](int from, int to, const Spring& sp) {
    const auto a = static_cast<std::size_t>(from), b = static_cast<std::size_t>(to);
    const double dx = s.position[a][0] - s.position[b][0];
    const double dy = s.position[a][1] - s.position[b][1];
    g.edges.push_back(Edge{{dx, dy, std::hypot(dx, dy), sp.rest_length, sp.stiffness / kStiffnessScale}, from, to, 0});
  };
  for (const Spring& sp : s.springs) {
    add(sp.a, sp.b, sp);
    add(sp.b, sp.a, sp);
  }
  return g;
}

Tensor node_tensor(const std::vector<const Graph*>& gs, std::size_t first, std::size_t cols) {
  std::size_t n = 0;
  for (const Graph* g : gs) n += g->nodes.size();
  Tensor t(n, cols);
  std::size_t r = 0;
  for (const Graph* g : gs)
    for (const auto& v : g->nodes) {
      for (std::size_t c = 0; c < cols; ++c) t(r, c) = v.at(first + c);
      ++r;
    }
  return t;
}

Tensor edge_tensor(const std::vector<const Graph*>& gs) {
  std::size_t m = 0;
  for (const Graph* g : gs) m += g->edges.size();
  Tensor t(m, 1);
  std::size_t r = 0;
  for (const Graph* g : gs)
    for (const auto& e : g->edges) t(r++, 0) = e.attr.at(0);
  return t;
}

// Next [x, y, vx, vy] for every node of the raw inputs, on the tape.
Var physics_next(const Architecture& arch, ParameterStore& ps, Tape& tape, const std::vector<const Graph*>& raw) {
  std::vector<Graph> feats;
  for (const Graph* g : raw) feats.push_back(physics_features(*g));
  const BatchedGraph bg = batch(feats);
  const GraphVars out = arch.forward(to_vars(tape, bg), ps).back();

  const Tensor x = node_tensor(raw, 0, 2);
  const Tensor v = node_tensor(raw, 2, 2);
  Tensor step(x.rows(), 1), dt(x.rows(), 1);
  std::size_t r = 0;
  for (const Graph* g : raw) {
    const double h = g->global_attr.at(2);
    for (const auto& node : g->nodes) {
      dt(r, 0) = h;
      step(r, 0) = node.at(5) > 0.5 ? 0.0 : h * kAccelScale;
      ++r;
    }
  }
  if (out.nodes.cols() != 2) throw ShapeError("physics model must output 2 node values, got " + std::to_string(out.nodes.cols()));
  Var vel = add(tape.constant(v), mul_col(out.nodes, tape.constant(step)));
  Var pos = add(tape.constant(x), mul_col(vel, tape.constant(dt)));
  return concat_cols({pos, vel});
}

}  // namespace

Graph featurize(Task t, const Graph& input) { return t == Task::Physics ? physics_features(input) : input; }

AttrWidths task_input_widths(Task t) {
  switch (t) {
    case Task::ShortestPath: return {1, 2, 0};
    case Task::Sort: return {0, 1, 0};
    case Task::Physics: return {5, 4, 2};
  }
  return {};
}

AttrWidths task_output_widths(Task t) {
  if (t == Task::Physics) return {0, 2, 0};
  return {1, 1, 0};
}

Var batch_loss(Task t, const Architecture& arch, ParameterStore& ps, Tape& tape, const std::vector<Sample>& batch_samples) {
  if (batch_samples.empty()) throw std::invalid_argument("empty batch");
  std::vector<const Graph*> inputs, targets;
  for (const Sample& s : batch_samples) {
    if (s.task != t) throw std::invalid_argument("sample task " + to_string(s.task) + " in a " + to_string(t) + " batch");
    inputs.push_back(&s.input);
    targets.push_back(&s.target);
  }
  if (t == Task::Physics) {
    Var next = physics_next(arch, ps, tape, inputs);
    const Tensor want = node_tensor(targets, 0, 4);
    return mse(next, want);
  }

  std::vector<Graph> gs;
  for (const Graph* g : inputs) gs.push_back(*g);
  const auto outs = arch.forward(to_vars(tape, batch(gs)), ps, true);
  const Tensor node_want = node_tensor(targets, 0, 1);
  const Tensor edge_want = edge_tensor(targets);
  std::vector<Var> terms;
  for (const GraphVars& o : outs) {
    terms.push_back(bce_with_logits(slice_cols(o.nodes, 0, 1), node_want));
    terms.push_back(bce_with_logits(slice_cols(o.edges, 0, 1), edge_want));
  }
  return affine(sum_all(concat_cols(terms)), 1.0 / static_cast<double>(outs.size()), 0.0);
}

LearnedModel::LearnedModel(Task task, EPDSpec spec, ParameterStore params)
    : task_(task), arch_(std::move(spec)), params_(std::move(params)) {}

Graph NetworkModel::predict(const Graph& input) {
  Tape tape;
  if (task_ == Task::Physics) {
    const Tensor next = physics_next(*arch_, *params_, tape, {&input}).value();
    Graph out = input;
    for (std::size_t i = 0; i < out.nodes.size(); ++i)
      for (std::size_t c = 0; c < 4; ++c) out.nodes[i][c] = next(i, c);
    return out;
  }
  const GraphVars o = arch_->forward(to_vars(tape, input), *params_).back();
  Graph out = input;
  out.global_attr.clear();
  for (std::size_t i = 0; i < out.nodes.size(); ++i) out.nodes[i] = {o.nodes.value()(i, 0)};
  for (std::size_t k = 0; k < out.edges.size(); ++k) out.edges[k].attr = {o.edges.value()(k, 0)};
  return out;
}

Graph OracleModel::predict(const Graph& input) {
  if (task_ == Task::Physics) return state_to_graph(physics_step(graph_to_state(input)));
  std::vector<int> nodes, edges;
  if (task_ == Task::ShortestPath) {
    PathLabels l = shortest_path_labels(input);
    nodes = std::move(l.nodes);
    edges = std::move(l.edges);
  } else {
    SortSample s = sort_labels(input);
    nodes = std::move(s.node_labels);
    edges = std::move(s.edge_labels);
  }
  Graph out = input;
  out.global_attr.clear();
  for (std::size_t i = 0; i < out.nodes.size(); ++i) out.nodes[i] = {nodes[i] ? 1.0 : -1.0};
  for (std::size_t k = 0; k < out.edges.size(); ++k) out.edges[k].attr = {edges[k] ? 1.0 : -1.0};
  return out;
}

Trajectory rollout(Model& model, const Graph& s0, std::size_t steps) {
  Trajectory t;
  t.states.push_back(s0);
  for (std::size_t step = 1; step <= steps; ++step) {
    Graph next = model.predict(t.states.back());
    if (!is_valid(next)) {
      t.truncated = true;
      t.diagnostic = "non-finite or invalid state at step " + std::to_string(step);
      break;
    }
    t.states.push_back(std::move(next));
  }
  return t;
}

}  // namespace gn::tasks
