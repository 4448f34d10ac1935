#include "gn/tasks/training.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gn/tasks/dataset.hpp"
#include "gn/tasks/models.hpp"

namespace gn::tasks {
namespace {

constexpr std::uint64_t kInitStream = 1ULL << 62;
constexpr std::uint64_t kValidationStream = (1ULL << 62) + 1;

bool grads_finite(const ParameterStore& ps) {
  for (const auto& e : ps)
    for (double g : e.grad.values())
      if (!std::isfinite(g)) return false;
  return true;
}

HistoryRow log_row(const Architecture& arch, ParameterStore& ps, const TrainConfig& cfg,
                   const std::vector<Sample>& val, std::size_t step, double loss) {
  HistoryRow row;
  row.step = step;
  row.loss = loss;
  {
    Tape tape;
    row.val_loss = batch_loss(cfg.data.task, arch, ps, tape, val).value().item();
  }
  NetworkModel model(cfg.data.task, arch, ps);
  row.val = evaluate(model, val);
  return row;
}

}  // namespace

Json train_config_to_json(const TrainConfig& c) {
  Json j;
  j["task"] = to_string(c.data.task);
  j["min_size"] = c.data.min_size;
  j["max_size"] = c.data.max_size;
  j["connectivity"] = c.data.connectivity;
  j["fixed_ends"] = c.data.fixed_ends;
  j["gravity"] = c.data.gravity;
  j["dt"] = c.data.dt;
  j["warmup"] = c.data.warmup;
  j["steps"] = c.steps;
  j["batch_size"] = c.batch_size;
  j["optimizer"] = c.optimizer.kind == OptimizerConfig::Kind::Adam ? "adam" : "sgd";
  j["learning_rate"] = c.optimizer.learning_rate;
  j["seed"] = c.seed;
  j["log_every"] = c.log_every;
  j["eval_samples"] = c.eval_samples;
  return j;
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig c;
  c.data = default_params(task_from_string(j.at("task").get<std::string>()));
  c.data.min_size = j.value("min_size", c.data.min_size);
  c.data.max_size = j.value("max_size", c.data.max_size);
  c.data.connectivity = j.value("connectivity", c.data.connectivity);
  c.data.fixed_ends = j.value("fixed_ends", c.data.fixed_ends);
  c.data.gravity = j.value("gravity", c.data.gravity);
  c.data.dt = j.value("dt", c.data.dt);
  c.data.warmup = j.value("warmup", c.data.warmup);
  c.steps = j.value("steps", c.steps);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.optimizer.kind = optimizer_kind_from_string(j.value("optimizer", std::string("adam")));
  c.optimizer.learning_rate = j.value("learning_rate", c.optimizer.learning_rate);
  c.seed = j.value("seed", c.seed);
  c.log_every = j.value("log_every", c.log_every);
  c.eval_samples = j.value("eval_samples", c.eval_samples);
  return c;
}

TrainState init_state(const Architecture& arch, const TrainConfig& cfg) {
  TrainState s;
  Rng rng(derive_seed(cfg.seed, kInitStream));
  arch.init(s.params, rng);
  s.optimizer = Optimizer(cfg.optimizer);
  return s;
}

std::vector<Sample> validation_set(const TrainConfig& cfg) {
  return generate_many(cfg.data, cfg.eval_samples, derive_seed(cfg.seed, kValidationStream));
}

TrainResult train(const Architecture& arch, const TrainConfig& cfg, TrainState state, const std::vector<Sample>* data,
                  const std::function<void(const HistoryRow&)>& on_log) {
  if (cfg.batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (data && data->empty()) throw std::invalid_argument("no samples");
  const Task task = cfg.data.task;
  const std::vector<Sample> val = cfg.eval_samples > 0 ? validation_set(cfg) : std::vector<Sample>{};
  TrainResult result;
  auto log = [&](std::size_t step, double loss) {
    if (val.empty()) return;
    HistoryRow row = log_row(arch, state.params, cfg, val, step, loss);
    if (on_log) on_log(row);
    result.history.push_back(std::move(row));
  };

  double loss = std::numeric_limits<double>::quiet_NaN();
  if (state.step == 0 && cfg.log_every > 0) log(0, loss);
  while (state.step < cfg.steps) {
    Rng rng(derive_seed(cfg.seed, state.step));
    std::vector<Sample> batch;
    for (std::size_t b = 0; b < cfg.batch_size; ++b)
      batch.push_back(data ? (*data)[rng.below(data->size())] : generate(cfg.data, rng));

    state.params.zero_grad();
    Tape tape;
    Var l = batch_loss(task, arch, state.params, tape, batch);
    loss = l.value().item();
    if (!std::isfinite(loss)) {
      result.diverged = true;
      result.message = "loss became non-finite at step " + std::to_string(state.step + 1);
      break;
    }
    tape.backward(l);
    if (!grads_finite(state.params)) {
      result.diverged = true;
      result.message = "gradient became non-finite at step " + std::to_string(state.step + 1);
      break;
    }
    state.optimizer.step(state.params);
    ++state.step;
    if (cfg.log_every > 0 && (state.step % cfg.log_every == 0 || state.step == cfg.steps)) log(state.step, loss);
  }
  state.params.zero_grad();
  result.state = std::move(state);
  return result;
}

Json checkpoint_to_json(const Checkpoint& c) {
  Json j;
  j["task"] = to_string(c.task);
  j["step"] = c.state.step;
  j["architecture"] = architecture_to_json(c.architecture);
  j["train"] = train_config_to_json(c.train);
  j["params"] = params_to_json(c.state.params);
  j["optimizer"] = c.state.optimizer.state_to_json();
  return j;
}

Checkpoint checkpoint_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("checkpoint must be a JSON object");
  for (const char* key : {"task", "step", "architecture", "train", "params", "optimizer"})
    if (!j.contains(key)) throw ConfigError(std::string("checkpoint is missing \"") + key + "\"");
  Checkpoint c;
  try {
    c.task = task_from_string(j["task"].get<std::string>());
    c.architecture = architecture_from_json(j["architecture"]);
    c.train = train_config_from_json(j["train"]);
    c.state.step = j["step"].get<std::size_t>();
    c.state.params = params_from_json(j["params"]);
    c.state.optimizer = Optimizer(c.train.optimizer);
    c.state.optimizer.load_state(j["optimizer"]);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& c) { write_text_atomic(path, checkpoint_to_json(c).dump()); }

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read checkpoint '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return checkpoint_from_json(Json::parse(ss.str()));
  } catch (const Json::parse_error& e) {
    throw ConfigError("checkpoint '" + path + "': " + e.what());
  }
}

}  // namespace gn::tasks
