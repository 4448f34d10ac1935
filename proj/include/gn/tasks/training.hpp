#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gn/composer.hpp"
#include "gn/optim.hpp"
#include "gn/tasks/metrics.hpp"
#include "gn/tasks/sample.hpp"

namespace gn::tasks {

struct TrainConfig {
  TaskParams data;
  std::size_t steps = 1000;  // total optimisation steps, counting resumed ones
  std::size_t batch_size = 16;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  std::size_t log_every = 100;
  std::size_t eval_samples = 64;  // fixed validation set size
};

Json train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const Json& j);

struct TrainState {
  ParameterStore params;
  Optimizer optimizer{OptimizerConfig{}};
  std::size_t step = 0;
};

/// Parameters drawn from a stream of the seed reserved for initialisation.
TrainState init_state(const Architecture& arch, const TrainConfig& cfg);

/// The fixed validation set of a run.
std::vector<Sample> validation_set(const TrainConfig& cfg);

struct HistoryRow {
  std::size_t step = 0;  // optimisation steps completed
  double loss = 0.0;     // training loss of the last batch
  double val_loss = 0.0;
  Metrics val;
};

struct TrainResult {
  TrainState state;
  std::vector<HistoryRow> history;
  bool diverged = false;
  std::string message;
};

/// Runs from `state.step` to `cfg.steps`. The batch of step t is drawn from
/// derive_seed(cfg.seed, t): freshly generated, or sampled with replacement
/// from `data` when given. A run resumed from a checkpoint therefore matches
/// an uninterrupted one bit for bit. A history row is logged every
/// `log_every` completed steps and at the end. A non-finite loss or gradient
/// stops training before the update, leaving the last good state.
TrainResult train(const Architecture& arch, const TrainConfig& cfg, TrainState state,
                  const std::vector<Sample>* data = nullptr,
                  const std::function<void(const HistoryRow&)>& on_log = {});

struct Checkpoint {
  Task task = Task::ShortestPath;
  EPDSpec architecture;
  TrainConfig train;
  TrainState state;
};

Json checkpoint_to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const Json& j);
void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gn::tasks
