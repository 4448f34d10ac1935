#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gn/composer.hpp"
#include "gn/params.hpp"
#include "gn/tape.hpp"
#include "gn/tasks/sample.hpp"

namespace gn::tasks {

/// Something that maps a task input to a prediction. Shortest path and sort
/// predictions have the input's structure with one logit per node and per
/// edge (positive means label 1). Physics predictions are the next raw state.
class Model {
 public:
  virtual ~Model() = default;
  virtual Task task() const = 0;
  virtual Graph predict(const Graph& input) = 0;
};

// Physics model features. Nodes [vx, vy, mass, fixed]; each spring becomes
// two directed edges with [dx, dy, |d|, rest_length, stiffness / 50], where
// d is the sender position minus the receiver position; global [gx, gy] / 10.
// The network outputs a per-node acceleration in units of 10 m/s^2 which is
// integrated like the simulator: v' = v + dt a (zero for fixed masses),
// x' = x + dt v'.
inline constexpr double kStiffnessScale = 50.0;
inline constexpr double kAccelScale = 10.0;

/// Graph the network reads for a task input. Identity for shortest path and sort.
Graph featurize(Task t, const Graph& input);

/// Input widths (edge, node, global) and output widths of the network for a task.
AttrWidths task_input_widths(Task t);
AttrWidths task_output_widths(Task t);

/// Mean loss over a batch: sigmoid cross-entropy on node and edge labels
/// averaged over every core step's decoded output, or squared error on the
/// next position and velocity for physics.
Var batch_loss(Task t, const Architecture& arch, ParameterStore& ps, Tape& tape, const std::vector<Sample>& batch);

/// A network bound to parameters it does not own.
class NetworkModel : public Model {
 public:
  NetworkModel(Task task, const Architecture& arch, ParameterStore& params)
      : task_(task), arch_(&arch), params_(&params) {}

  Task task() const override { return task_; }
  Graph predict(const Graph& input) override;

 private:
  Task task_;
  const Architecture* arch_;
  ParameterStore* params_;
};

/// A network that owns its architecture and parameters.
class LearnedModel : public Model {
 public:
  LearnedModel(Task task, EPDSpec spec, ParameterStore params);

  Task task() const override { return task_; }
  Graph predict(const Graph& input) override { return NetworkModel(task_, arch_, params_).predict(input); }

  const Architecture& architecture() const { return arch_; }
  ParameterStore& params() { return params_; }

 private:
  Task task_;
  Architecture arch_;
  ParameterStore params_;
};

/// Exact answers: Dijkstra labels, sorted-order labels, or the simulator.
class OracleModel : public Model {
 public:
  explicit OracleModel(Task task) : task_(task) {}
  Task task() const override { return task_; }
  Graph predict(const Graph& input) override;

 private:
  Task task_;
};

/// Returns its input unchanged (a constant-state physics baseline).
class IdentityModel : public Model {
 public:
  explicit IdentityModel(Task task) : task_(task) {}
  Task task() const override { return task_; }
  Graph predict(const Graph& input) override { return input; }

 private:
  Task task_;
};

struct Trajectory {
  std::vector<Graph> states;
  bool truncated = false;
  std::string diagnostic;
};

/// s0 followed by T model predictions, each fed back as the next input.
/// Stops at the first prediction with a non-finite value; that state is
/// dropped and the reason recorded.
Trajectory rollout(Model& model, const Graph& s0, std::size_t steps);

}  // namespace gn::tasks
