#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gn/composer.hpp"
#include "gn/graph_json.hpp"
#include "gn/kernels.hpp"
#include "gn/tasks/dataset.hpp"
#include "gn/tasks/metrics.hpp"
#include "gn/tasks/models.hpp"
#include "gn/tasks/physics.hpp"
#include "gn/tasks/training.hpp"

using namespace gn;
using namespace gn::tasks;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string task_list() {
  std::string s;
  for (const auto& n : task_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

Task parse_task(const std::string& name) {
  try {
    return task_from_string(name);
  } catch (const std::invalid_argument&) {
    throw UsageError("unknown task '" + name + "'; valid tasks: " + task_list());
  }
}

struct GenerateArgs {
  std::string task;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::optional<std::size_t> min_size, max_size;
};

struct TrainArgs {
  std::string task;
  std::string arch;
  std::string out;
  std::string resume;
  std::string data;
  std::uint64_t seed = 0;
  std::size_t steps = 1000;
  std::size_t batch_size = 16;
  double learning_rate = 1e-3;
  std::string optimizer = "adam";
  std::size_t log_every = 100;
  std::size_t eval_samples = 64;
  std::optional<std::size_t> min_size, max_size;
};

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::size_t horizon = 1;
};

struct RolloutArgs {
  std::string checkpoint;
  std::string initial;
  std::size_t steps = 0;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t masses = 4;
};

int cmd_generate(const GenerateArgs& a) {
  TaskParams p = default_params(parse_task(a.task));
  if (a.min_size) p.min_size = *a.min_size;
  if (a.max_size) p.max_size = *a.max_size;
  if (p.min_size > p.max_size) throw UsageError("--min-size exceeds --max-size");
  write_jsonl(a.out, generate_many(p, a.count, a.seed));
  return kOk;
}

void write_metrics(const std::string& path, Task task, const std::vector<HistoryRow>& history) {
  std::vector<std::string> cols = {"loss", "val_loss"};
  for (const auto& n : metric_names(task)) cols.push_back(n);
  std::vector<std::pair<std::size_t, std::vector<double>>> rows;
  for (const auto& r : history) {
    std::vector<double> v = {r.loss, r.val_loss};
    for (double x : metric_values(task, r.val)) v.push_back(x);
    rows.emplace_back(r.step, std::move(v));
  }
  write_csv(path, cols, rows);
}

int cmd_train(const TrainArgs& a) {
  Checkpoint ckpt;
  if (!a.resume.empty()) {
    ckpt = load_checkpoint(a.resume);
    ckpt.train.steps = a.steps;
  } else {
    if (a.task.empty() || a.arch.empty()) throw UsageError("train needs --task and --arch (or --resume)");
    ckpt.task = parse_task(a.task);
    ckpt.architecture = load_architecture(a.arch);
    TrainConfig& c = ckpt.train;
    c.data = default_params(ckpt.task);
    if (a.min_size) c.data.min_size = *a.min_size;
    if (a.max_size) c.data.max_size = *a.max_size;
    c.steps = a.steps;
    c.batch_size = a.batch_size;
    c.optimizer.kind = optimizer_kind_from_string(a.optimizer);
    c.optimizer.learning_rate = a.learning_rate;
    c.seed = a.seed;
    c.log_every = a.log_every;
    c.eval_samples = a.eval_samples;
  }
  if (ckpt.train.batch_size == 0) throw UsageError("--batch-size must be positive");
  if (!(ckpt.train.optimizer.learning_rate > 0)) throw UsageError("--learning-rate must be positive");
  if (ckpt.train.data.min_size > ckpt.train.data.max_size) throw UsageError("--min-size exceeds --max-size");

  const Architecture arch(ckpt.architecture);
  if (a.resume.empty()) ckpt.state = init_state(arch, ckpt.train);
  std::vector<Sample> data;
  if (!a.data.empty()) {
    data = read_jsonl(a.data);
    if (data.empty()) throw UsageError("no samples in '" + a.data + "'");
  }

  std::filesystem::create_directories(a.out);
  const std::string ckpt_path = (std::filesystem::path(a.out) / "checkpoint.json").string();
  const std::string csv_path = (std::filesystem::path(a.out) / "metrics.csv").string();
  save_checkpoint(ckpt_path, ckpt);

  // Train in chunks of log_every steps and checkpoint after each, so a
  // divergence leaves the last good checkpoint on disk. Chunking does not
  // change the result because every step draws from its own seed.
  std::vector<HistoryRow> history;
  const std::size_t chunk = ckpt.train.log_every > 0 ? ckpt.train.log_every : ckpt.train.steps;
  const std::size_t total = ckpt.train.steps;
  while (true) {
    TrainConfig part = ckpt.train;
    part.steps = std::min(total, ckpt.state.step + std::max<std::size_t>(chunk, 1));
    TrainResult r = train(arch, part, std::move(ckpt.state), data.empty() ? nullptr : &data, [&](const HistoryRow& row) {
      std::cerr << "step " << row.step << " loss " << row.loss << " val_loss " << row.val_loss << "\n";
    });
    for (auto& row : r.history) history.push_back(std::move(row));
    ckpt.state = std::move(r.state);
    write_metrics(csv_path, ckpt.task, history);
    if (r.diverged) throw NumericalError(r.message + "; kept checkpoint at step " + std::to_string(ckpt.state.step));
    save_checkpoint(ckpt_path, ckpt);
    if (ckpt.state.step >= total) break;
  }
  return kOk;
}

std::unique_ptr<Model> load_model(const std::string& checkpoint, Task task) {
  if (checkpoint == "oracle") return std::make_unique<OracleModel>(task);
  if (checkpoint == "identity") return std::make_unique<IdentityModel>(task);
  Checkpoint c = load_checkpoint(checkpoint);
  if (c.task != task) throw UsageError("checkpoint is for task " + to_string(c.task) + ", data is " + to_string(task));
  return std::make_unique<LearnedModel>(c.task, c.architecture, std::move(c.state.params));
}

int cmd_eval(const EvalArgs& a) {
  if (a.horizon < 1) throw UsageError("--horizon must be at least 1");
  const std::vector<Sample> samples = read_jsonl(a.data);
  if (samples.empty()) throw UsageError("no samples");
  auto model = load_model(a.checkpoint, samples.front().task);
  Metrics m;
  try {
    m = evaluate(*model, samples, a.horizon);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("schema mismatch: ") + e.what());
  }
  std::cout << metrics_to_json(samples.front().task, m).dump() << "\n";
  if (m.numerical_failure) throw NumericalError(m.diagnostic);
  return kOk;
}

int cmd_rollout(const RolloutArgs& a) {
  Graph s0;
  if (!a.initial.empty()) {
    std::ifstream in(a.initial);
    if (!in) throw IoError("cannot read '" + a.initial + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    s0 = deserialize(ss.str());
  } else {
    Rng rng(a.seed);
    TaskParams p = default_params(Task::Physics);
    s0 = state_to_graph(gen_chain(a.masses, p.fixed_ends, {0.0, p.gravity}, p.dt, rng));
  }
  try {
    graph_to_state(s0);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("initial state: ") + e.what());
  }
  auto model = load_model(a.checkpoint, Task::Physics);
  Trajectory t;
  try {
    t = rollout(*model, s0, a.steps);
  } catch (const ShapeError& e) {
    throw UsageError(std::string("schema mismatch: ") + e.what());
  }
  std::string text;
  for (const Graph& g : t.states) text += serialize(g) + "\n";
  write_text_atomic(a.out, text);
  if (t.truncated) throw NumericalError("rollout truncated: " + t.diagnostic);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph network blocks: data generation, training, evaluation and rollouts"};
  app.name("gn");
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads for the kernels (1 keeps every result bit-exact)")
      ->check(CLI::PositiveNumber);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write a JSON-lines dataset");
  gen->add_option("--task", ga.task, "shortest_path, sort or physics")->required();
  gen->add_option("--count", ga.count, "Number of samples")->required();
  gen->add_option("--seed", ga.seed, "Random seed");
  gen->add_option("--out", ga.out, "Output file")->required();
  gen->add_option("--min-size", ga.min_size, "Smallest graph (nodes, elements or masses)");
  gen->add_option("--max-size", ga.max_size, "Largest graph");

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Train a model; writes checkpoint.json and metrics.csv");
  tr->add_option("--task", ta.task, "shortest_path, sort or physics");
  tr->add_option("--arch", ta.arch, "Architecture JSON file");
  tr->add_option("--out", ta.out, "Output directory")->required();
  tr->add_option("--resume", ta.resume, "Continue from this checkpoint (its task, architecture and settings)");
  tr->add_option("--data", ta.data, "Train on this dataset instead of fresh samples");
  tr->add_option("--seed", ta.seed, "Random seed");
  tr->add_option("--steps", ta.steps, "Total optimisation steps, counting resumed ones");
  tr->add_option("--batch-size", ta.batch_size, "Samples per step");
  tr->add_option("--learning-rate", ta.learning_rate, "Step size");
  tr->add_option("--optimizer", ta.optimizer, "adam or sgd");
  tr->add_option("--log-every", ta.log_every, "Validation and checkpoint interval in steps");
  tr->add_option("--eval-samples", ta.eval_samples, "Validation set size");
  tr->add_option("--min-size", ta.min_size, "Smallest training graph");
  tr->add_option("--max-size", ta.max_size, "Largest training graph");

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Print metrics of a checkpoint on a dataset as JSON");
  ev->add_option("--checkpoint", ea.checkpoint, "Checkpoint file, or 'oracle' / 'identity'")->required();
  ev->add_option("--data", ea.data, "JSON-lines dataset")->required();
  ev->add_option("--horizon", ea.horizon, "Physics: compare positions after this many steps");

  RolloutArgs ra;
  auto* ro = app.add_subcommand("rollout", "Feed a physics model its own predictions");
  ro->add_option("--checkpoint", ra.checkpoint, "Checkpoint file, or 'oracle' / 'identity'")->required();
  ro->add_option("--initial", ra.initial, "Initial state graph JSON (default: a generated chain)");
  ro->add_option("--steps", ra.steps, "Number of predicted steps")->required();
  ro->add_option("--out", ra.out, "Output JSON-lines file")->required();
  ro->add_option("--seed", ra.seed, "Seed for the generated initial state");
  ro->add_option("--masses", ra.masses, "Masses in the generated initial state");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  kernels::set_num_threads(threads);
  try {
    if (gen->parsed()) return cmd_generate(ga);
    if (tr->parsed()) return cmd_train(ta);
    if (ev->parsed()) return cmd_eval(ea);
    if (ro->parsed()) return cmd_rollout(ra);
  } catch (const NumericalError& e) {
    std::cerr << "gn: numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "gn: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
