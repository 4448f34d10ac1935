#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "gn/tasks/dataset.hpp"
#include "gn/tasks/metrics.hpp"
#include "gn/tasks/models.hpp"
#include "gn/tasks/physics.hpp"
#include "gn/tasks/shortest_path.hpp"
#include "gn/tasks/sort.hpp"
#include "gn/tasks/training.hpp"

using namespace gn;
using namespace gn::tasks;

namespace {

void add_undirected(Graph& g, int a, int b, double len) {
  g.edges.push_back(Edge{{len}, a, b, 0});
  g.edges.push_back(Edge{{len}, b, a, 0});
}

Graph unlabeled(std::size_t n) {
  Graph g;
  g.nodes.assign(n, AttrVector{0.0, 0.0});
  return g;
}

bool has_edge_label(const Graph& g, const PathLabels& l, int s, int r) {
  for (std::size_t k = 0; k < g.edges.size(); ++k)
    if (g.edges[k].sender == s && g.edges[k].receiver == r && l.edges[k]) return true;
  return false;
}

// Distance-array relaxation (Bellman-Ford), independent of the Dijkstra oracle.
std::vector<double> relax_distances(const Graph& g, int source) {
  std::vector<double> d(g.nodes.size(), std::numeric_limits<double>::infinity());
  d[static_cast<std::size_t>(source)] = 0.0;
  for (std::size_t round = 0; round < g.nodes.size(); ++round)
    for (const Edge& e : g.edges)
      d[static_cast<std::size_t>(e.receiver)] =
          std::min(d[static_cast<std::size_t>(e.receiver)], d[static_cast<std::size_t>(e.sender)] + e.attr[0]);
  return d;
}

// Shortest simple-path length by exhaustive enumeration.
double exhaustive_shortest(const Graph& g, int at, int target, std::vector<bool>& seen, double so_far) {
  if (at == target) return so_far;
  double best = std::numeric_limits<double>::infinity();
  seen[static_cast<std::size_t>(at)] = true;
  for (const Edge& e : g.edges) {
    if (e.sender != at || seen[static_cast<std::size_t>(e.receiver)]) continue;
    best = std::min(best, exhaustive_shortest(g, e.receiver, target, seen, so_far + e.attr[0]));
  }
  seen[static_cast<std::size_t>(at)] = false;
  return best;
}

// Checks the labels trace one simple path from s to t and returns its length.
double labeled_path_length(const Graph& g, const std::vector<int>& nodes, const std::vector<int>& edges, int s, int t) {
  REQUIRE(nodes[static_cast<std::size_t>(s)] == 1);
  REQUIRE(nodes[static_cast<std::size_t>(t)] == 1);
  double len = 0.0;
  int at = s;
  std::size_t hops = 0;
  while (at != t) {
    int next_edge = -1;
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
      if (edges[k] && g.edges[k].sender == at) {
        REQUIRE(next_edge < 0);  // exactly one labelled edge leaves each path node
        next_edge = static_cast<int>(k);
      }
    }
    REQUIRE(next_edge >= 0);
    len += g.edges[static_cast<std::size_t>(next_edge)].attr[0];
    at = g.edges[static_cast<std::size_t>(next_edge)].receiver;
    REQUIRE(nodes[static_cast<std::size_t>(at)] == 1);
    REQUIRE(++hops <= g.nodes.size());
  }
  const auto labelled_nodes = static_cast<std::size_t>(std::count(nodes.begin(), nodes.end(), 1));
  const auto labelled_edges = static_cast<std::size_t>(std::count(edges.begin(), edges.end(), 1));
  CHECK(labelled_edges == hops);
  CHECK(labelled_nodes == hops + 1);
  return len;
}

std::vector<Sample> small_sort_set(std::uint64_t seed, std::size_t count) {
  TaskParams p = default_params(Task::Sort);
  return generate_many(p, count, seed);
}

EPDSpec label_arch(std::size_t edge_in, std::size_t node_in, std::size_t steps) {
  BlockHyper h;
  h.hidden = {16};
  EPDSpec spec;
  spec.encoder = make_variant("independent", {edge_in, node_in, 0, 8, 8, 8}, h);
  spec.core = CoreSpec{{make_variant("full_gn", {16, 16, 16, 8, 8, 8}, h)}, steps, true};
  spec.decoder = make_variant("independent", {8, 8, 8, 1, 1, 0}, h);
  spec.skip = true;
  return spec;
}

EPDSpec physics_arch() {
  BlockHyper h;
  h.hidden = {32};
  EPDSpec spec;
  spec.core = CoreSpec{{make_variant("interaction_network", {5, 4, 2, 16, 2, 2}, h)}, 1, true};
  return spec;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gn_test_" + name)).string();
}

}  // namespace

TEST_CASE("shortest path oracle examples") {
  SUBCASE("path graph 0-1-2-3, query (0,3)") {
    Graph g = unlabeled(4);
    for (int i = 0; i < 3; ++i) add_undirected(g, i, i + 1, 1.0);
    PathLabels l = shortest_path_labels(g, 0, 3);
    CHECK(l.nodes == std::vector<int>{1, 1, 1, 1});
    CHECK(has_edge_label(g, l, 0, 1));
    CHECK(has_edge_label(g, l, 1, 2));
    CHECK(has_edge_label(g, l, 2, 3));
    CHECK(std::count(l.edges.begin(), l.edges.end(), 1) == 3);
    CHECK(l.length == 3.0);
  }
  SUBCASE("query (a,a) labels only a") {
    Graph g = unlabeled(3);
    add_undirected(g, 0, 1, 1.0);
    add_undirected(g, 1, 2, 1.0);
    PathLabels l = shortest_path_labels(g, 1, 1);
    CHECK(l.nodes == std::vector<int>{0, 1, 0});
    CHECK(std::count(l.edges.begin(), l.edges.end(), 1) == 0);
  }
  SUBCASE("triangle with equal weights takes the direct edge") {
    Graph g = unlabeled(3);
    add_undirected(g, 0, 1, 1.0);
    add_undirected(g, 1, 2, 1.0);
    add_undirected(g, 0, 2, 1.0);
    PathLabels l = shortest_path_labels(g, 0, 2);
    CHECK(l.nodes == std::vector<int>{1, 0, 1});
    CHECK(has_edge_label(g, l, 0, 2));
    CHECK(std::count(l.edges.begin(), l.edges.end(), 1) == 1);
  }
  SUBCASE("ties go to the lowest-index predecessor") {
    // Two routes of length 2 from 0 to 3: through 2 and through 1.
    Graph g = unlabeled(4);
    add_undirected(g, 0, 2, 1.0);
    add_undirected(g, 2, 3, 1.0);
    add_undirected(g, 0, 1, 1.0);
    add_undirected(g, 1, 3, 1.0);
    PathLabels l = shortest_path_labels(g, 0, 3);
    CHECK(l.nodes == std::vector<int>{1, 1, 0, 1});
    // Parallel edges: the lower index wins.
    Graph p = unlabeled(2);
    p.edges = {Edge{{1.0}, 0, 1, 0}, Edge{{1.0}, 0, 1, 0}};
    CHECK(shortest_path_labels(p, 0, 1).edges == std::vector<int>{1, 0});
  }
  SUBCASE("unreachable target") {
    Graph g = unlabeled(2);
    CHECK_THROWS_AS(shortest_path_labels(g, 0, 1), std::invalid_argument);
  }
}

TEST_CASE("shortest path oracle validity on generated graphs") {
  Rng rng(17);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + rng.below(7);  // 2..8 nodes: exhaustive search stays cheap
    ShortestPathSample s = gen_shortest_path(n, 0.6, rng);
    CHECK(s.source != s.target);
    CHECK(is_valid(s.input));
    const double len = labeled_path_length(s.input, s.node_labels, s.edge_labels, s.source, s.target);
    const double relaxed = relax_distances(s.input, s.source)[static_cast<std::size_t>(s.target)];
    std::vector<bool> seen(n, false);
    const double best = exhaustive_shortest(s.input, s.source, s.target, seen, 0.0);
    CHECK(len <= relaxed + 1e-12);
    CHECK(len <= best + 1e-12);
    CHECK(std::abs(relaxed - best) <= 1e-12);
    CHECK(shortest_path_labels(s.input).nodes == s.node_labels);
  }
}

TEST_CASE("generators are deterministic") {
  for (Task t : {Task::ShortestPath, Task::Sort, Task::Physics}) {
    const TaskParams p = default_params(t);
    CHECK(generate_many(p, 5, 99) == generate_many(p, 5, 99));
    CHECK_FALSE(generate_many(p, 5, 99) == generate_many(p, 5, 100));
  }
  Rng rng(1);
  CHECK_THROWS_AS(gen_shortest_path(1, 0.5, rng), std::invalid_argument);
}

TEST_CASE("sort oracle") {
  SUBCASE("[3,1,2]") {
    SortSample s = sort_sample({3, 1, 2});
    CHECK(s.node_labels == std::vector<int>{0, 1, 0});
    // Edges in order 0->1, 0->2, 1->0, 1->2, 2->0, 2->1.
    CHECK(s.edge_labels == std::vector<int>{0, 0, 0, 1, 1, 0});
  }
  SUBCASE("single element") {
    SortSample s = sort_sample({0.4});
    CHECK(s.node_labels == std::vector<int>{1});
    CHECK(s.input.edges.empty());
  }
  SUBCASE("already sorted input follows index order") {
    SortSample s = sort_sample({0.1, 0.2, 0.3, 0.4});
    for (std::size_t k = 0; k < s.input.edges.size(); ++k) {
      const Edge& e = s.input.edges[k];
      CHECK(s.edge_labels[k] == (e.receiver == e.sender + 1 ? 1 : 0));
    }
  }
  SUBCASE("duplicates are rejected") { CHECK_THROWS_AS(sort_sample({0.5, 0.5}), std::invalid_argument); }
  SUBCASE("labels form one chain through the sorted order") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + rng.below(10);
      SortSample s = gen_sort(n, rng);
      CHECK(std::count(s.node_labels.begin(), s.node_labels.end(), 1) == 1);
      std::vector<int> next(n, -1), indegree(n, 0);
      for (std::size_t k = 0; k < s.input.edges.size(); ++k) {
        if (!s.edge_labels[k]) continue;
        const Edge& e = s.input.edges[k];
        CHECK(next[static_cast<std::size_t>(e.sender)] == -1);
        next[static_cast<std::size_t>(e.sender)] = e.receiver;
        ++indegree[static_cast<std::size_t>(e.receiver)];
      }
      int at = static_cast<int>(std::find(s.node_labels.begin(), s.node_labels.end(), 1) - s.node_labels.begin());
      CHECK(indegree[static_cast<std::size_t>(at)] == 0);
      std::size_t visited = 1;
      while (next[static_cast<std::size_t>(at)] >= 0) {
        const int nx = next[static_cast<std::size_t>(at)];
        CHECK(s.values[static_cast<std::size_t>(nx)] > s.values[static_cast<std::size_t>(at)]);
        at = nx;
        ++visited;
      }
      CHECK(visited == n);
      CHECK(sort_labels(s.input).edge_labels == s.edge_labels);
    }
  }
}

TEST_CASE("physics step examples") {
  SUBCASE("single free mass under gravity") {
    PhysicsState s;
    s.position = {{0.0, 0.0}};
    s.velocity = {{0.0, 0.0}};
    s.mass = {1.0};
    s.fixed = {false};
    s.gravity = {0.0, -10.0};
    s.dt = 0.1;
    PhysicsState n = physics_step(s);
    CHECK(n.velocity[0] == Vec2{0.0, -1.0});
    CHECK(n.position[0][0] == 0.0);
    CHECK(n.position[0][1] == doctest::Approx(-0.1).epsilon(1e-15));
  }
  SUBCASE("spring at rest length is an equilibrium") {
    PhysicsState s;
    s.position = {{0.0, 0.0}, {1.0, 0.0}};
    s.velocity = {{0.0, 0.0}, {0.0, 0.0}};
    s.mass = {1.0, 1.0};
    s.fixed = {false, false};
    s.springs = {Spring{0, 1, 1.0, 50.0}};
    s.gravity = {0.0, 0.0};
    CHECK(physics_step(s) == s);
  }
  SUBCASE("stretched spring between equal masses conserves momentum") {
    PhysicsState s;
    s.position = {{0.0, 0.0}, {1.7, 0.3}};
    s.velocity = {{0.0, 0.0}, {0.0, 0.0}};
    s.mass = {1.0, 1.0};
    s.fixed = {false, false};
    s.springs = {Spring{0, 1, 1.0, 50.0}};
    s.gravity = {0.0, 0.0};
    PhysicsState n = physics_step(s);
    CHECK(total_momentum(n) == total_momentum(s));
    CHECK(n.velocity[0][0] > 0.0);  // pulled towards the other mass
    CHECK(n.velocity[1][0] < 0.0);
  }
  SUBCASE("coincident endpoints exert no force") {
    PhysicsState s;
    s.position = {{0.5, 0.5}, {0.5, 0.5}};
    s.velocity = {{0.0, 0.0}, {0.0, 0.0}};
    s.mass = {1.0, 1.0};
    s.fixed = {false, false};
    s.springs = {Spring{0, 1, 1.0, 50.0}};
    s.gravity = {0.0, 0.0};
    CHECK(physics_step(s) == s);
  }
  SUBCASE("fixed masses keep their state") {
    Rng rng(2);
    PhysicsState s = gen_chain(5, true, {0.0, -10.0}, 0.02, rng);
    for (int t = 0; t < 50; ++t) s = physics_step(s);
    Rng again(2);
    PhysicsState s0 = gen_chain(5, true, {0.0, -10.0}, 0.02, again);
    CHECK(s.position.front() == s0.position.front());
    CHECK(s.position.back() == s0.position.back());
    CHECK(s.velocity.front() == Vec2{0.0, 0.0});
  }
  SUBCASE("invalid states") {
    PhysicsState s;
    s.position = {{0, 0}};
    s.velocity = {{0, 0}};
    s.mass = {0.0};
    s.fixed = {false};
    CHECK_THROWS_AS(physics_step(s), std::invalid_argument);
    s.mass = {1.0};
    s.springs = {Spring{0, 3, 1, 1}};
    CHECK_THROWS_AS(physics_step(s), std::invalid_argument);
    s.springs.clear();
    s.dt = 0;
    CHECK_THROWS_AS(physics_step(s), std::invalid_argument);
  }
}

TEST_CASE("physics conservation") {
  Rng rng(5);
  SUBCASE("momentum is exactly conserved every step") {
    for (int trial = 0; trial < 20; ++trial) {
      PhysicsState s = gen_chain(2 + rng.below(6), false, {0.0, 0.0}, 0.02, rng);
      // Extra random springs, so forces do not come only from a chain.
      for (int k = 0; k < 3; ++k)
        s.springs.push_back(Spring{static_cast<int>(rng.below(s.size())), static_cast<int>(rng.below(s.size())),
                                   rng.uniform(0.5, 1.5), 50.0});
      const Vec2 p0 = total_momentum(s);
      for (int t = 0; t < 200; ++t) {
        s = physics_step(s);
        REQUIRE(total_momentum(s) == p0);
      }
    }
  }
  SUBCASE("energy drifts less than 1% over 1000 steps at dt = 1e-3") {
    for (int trial = 0; trial < 10; ++trial) {
      PhysicsState s = gen_chain(4, false, {0.0, 0.0}, 1e-3, rng);
      const double e0 = total_energy(s);
      double worst = 0.0;
      for (int t = 0; t < 1000; ++t) {
        s = physics_step(s);
        worst = std::max(worst, std::abs(total_energy(s) - e0) / e0);
      }
      CHECK(worst < 0.01);
    }
  }
}

TEST_CASE("physics graph encoding") {
  Rng rng(8);
  PhysicsState s = gen_chain(4, true, {0.0, -10.0}, 0.02, rng);
  CHECK(graph_to_state(state_to_graph(s)) == s);
  Graph g = state_to_graph(s);
  g.nodes[0].pop_back();
  CHECK_THROWS_AS(graph_to_state(g), std::invalid_argument);
  TaskParams p = default_params(Task::Physics);
  Sample sample = gen_physics_sample(4, p, rng);
  CHECK(sample.target == state_to_graph(physics_step(graph_to_state(sample.input))));
}

TEST_CASE("rollout") {
  Rng rng(9);
  const Graph s0 = state_to_graph(gen_chain(4, true, {0.0, -10.0}, 0.02, rng));
  SUBCASE("identity model gives a constant trajectory") {
    IdentityModel m(Task::Physics);
    Trajectory t = rollout(m, s0, 5);
    REQUIRE(t.states.size() == 6);
    for (const auto& g : t.states) CHECK(g == s0);
  }
  SUBCASE("oracle model reproduces the simulator") {
    OracleModel m(Task::Physics);
    Trajectory t = rollout(m, s0, 10);
    PhysicsState s = graph_to_state(s0);
    for (std::size_t i = 1; i < t.states.size(); ++i) {
      s = physics_step(s);
      CHECK(t.states[i] == state_to_graph(s));
    }
  }
  SUBCASE("T = 0") {
    OracleModel m(Task::Physics);
    CHECK(rollout(m, s0, 0).states == std::vector<Graph>{s0});
  }
  SUBCASE("non-finite predictions truncate the rollout") {
    struct Blowup : Model {
      int calls = 0;
      Task task() const override { return Task::Physics; }
      Graph predict(const Graph& g) override {
        Graph out = g;
        if (++calls == 3) out.nodes[1][0] = NAN;
        return out;
      }
    } m;
    Trajectory t = rollout(m, s0, 10);
    CHECK(t.truncated);
    CHECK(t.states.size() == 3);
    CHECK(t.diagnostic.find("step 3") != std::string::npos);
  }
}

TEST_CASE("evaluate") {
  SUBCASE("oracle labels score 1") {
    for (Task t : {Task::ShortestPath, Task::Sort}) {
      OracleModel m(t);
      Metrics r = evaluate(m, generate_many(default_params(t), 10, 4));
      CHECK(r.node_acc == 1.0);
      CHECK(r.edge_acc == 1.0);
      CHECK(r.graph_solved == 1.0);
    }
  }
  SUBCASE("an all-zero predictor scores the negative-class rate") {
    struct Zero : Model {
      Task task() const override { return Task::Sort; }
      Graph predict(const Graph& g) override {
        Graph out = g;
        for (auto& v : out.nodes) v = {-1.0};
        for (auto& e : out.edges) e.attr = {-1.0};
        return out;
      }
    } m;
    auto samples = small_sort_set(6, 20);
    std::size_t neg_nodes = 0, nodes = 0, neg_edges = 0, edges = 0;
    for (const auto& s : samples) {
      for (const auto& v : s.target.nodes) neg_nodes += v[0] == 0.0, ++nodes;
      for (const auto& e : s.target.edges) neg_edges += e.attr[0] == 0.0, ++edges;
    }
    Metrics r = evaluate(m, samples);
    CHECK(r.node_acc == doctest::Approx(static_cast<double>(neg_nodes) / static_cast<double>(nodes)));
    CHECK(r.edge_acc == doctest::Approx(static_cast<double>(neg_edges) / static_cast<double>(edges)));
    // Balanced labels: two elements, one smallest node and one successor edge.
    TaskParams two = default_params(Task::Sort);
    two.min_size = two.max_size = 2;
    Metrics b = evaluate(m, generate_many(two, 10, 1));
    CHECK(b.node_acc == 0.5);
    CHECK(b.edge_acc == 0.5);
    CHECK(b.graph_solved == 0.0);
  }
  SUBCASE("physics oracle against itself") {
    OracleModel m(Task::Physics);
    auto samples = generate_many(default_params(Task::Physics), 8, 2);
    for (std::size_t h : {1, 5}) {
      Metrics r = evaluate(m, samples, h);
      CHECK(r.rmse == 0.0);
      CHECK(r.mean_displacement > 0.0);
      CHECK(r.horizon == h);
    }
  }
  SUBCASE("errors") {
    OracleModel m(Task::Sort);
    CHECK_THROWS_AS(evaluate(m, {}), std::invalid_argument);
    CHECK_THROWS_AS(evaluate(m, generate_many(default_params(Task::Physics), 1, 0)), std::invalid_argument);
  }
  SUBCASE("metrics JSON keys") {
    Metrics r;
    r.node_acc = 1;
    r.edge_acc = 0.5;
    r.graph_solved = 0;
    r.samples = 3;
    CHECK(metrics_to_json(Task::Sort, r).dump() == R"({"node_acc":1.0,"edge_acc":0.5,"graph_solved":0.0,"samples":3})");
  }
}

TEST_CASE("datasets") {
  const std::string path = temp_path("data.jsonl");
  std::vector<Sample> all;
  for (Task t : {Task::ShortestPath, Task::Sort, Task::Physics})
    for (auto& s : generate_many(default_params(t), 3, 11)) all.push_back(s);
  write_jsonl(path, all);
  CHECK(read_jsonl(path) == all);

  write_jsonl(path, {});
  CHECK(std::filesystem::file_size(path) == 0);
  CHECK(read_jsonl(path).empty());

  {
    std::ofstream out(path);
    out << sample_to_json(all[0]).dump() << "\n{\"task\":\"sort\",\"input\":{}}\n";
  }
  CHECK_THROWS_WITH_AS(read_jsonl(path), doctest::Contains(":2:"), ParseError);
  CHECK_THROWS_AS(read_jsonl(temp_path("missing/none.jsonl")), IoError);
  CHECK_THROWS_AS(write_jsonl(temp_path("missing/none.jsonl"), all), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("training") {
  TrainConfig cfg;
  cfg.data = default_params(Task::Sort);
  cfg.data.max_size = 5;
  cfg.batch_size = 4;
  cfg.eval_samples = 8;
  cfg.log_every = 5;
  cfg.seed = 21;
  Architecture arch(label_arch(0, 1, 2));

  SUBCASE("zero steps leaves the initial parameters") {
    cfg.steps = 0;
    TrainState s0 = init_state(arch, cfg);
    TrainResult r = train(arch, cfg, init_state(arch, cfg));
    CHECK(r.state.step == 0);
    CHECK(r.state.params == s0.params);
    REQUIRE(r.history.size() == 1);
    CHECK(r.history[0].step == 0);
  }
  SUBCASE("resuming matches an uninterrupted run bit for bit") {
    cfg.steps = 12;
    TrainResult full = train(arch, cfg, init_state(arch, cfg));
    TrainConfig half = cfg;
    half.steps = 7;
    TrainResult first = train(arch, half, init_state(arch, cfg));
    // Through a checkpoint file, as the command line tool does it.
    const std::string path = temp_path("ckpt.json");
    save_checkpoint(path, Checkpoint{Task::Sort, label_arch(0, 1, 2), half, first.state});
    Checkpoint loaded = load_checkpoint(path);
    std::filesystem::remove(path);
    CHECK(loaded.state.params == first.state.params);
    CHECK(loaded.state.step == 7);
    TrainResult second = train(arch, cfg, std::move(loaded.state));
    CHECK(second.state.step == 12);
    CHECK(second.state.params == full.state.params);
    CHECK(second.history.back().loss == full.history.back().loss);
  }
  SUBCASE("validation loss goes down") {
    cfg.steps = 150;
    cfg.log_every = 150;
    TrainResult r = train(arch, cfg, init_state(arch, cfg));
    REQUIRE(r.history.size() == 2);
    CHECK_FALSE(r.diverged);
    CHECK(r.history.back().val_loss < 0.8 * r.history.front().val_loss);
  }
  SUBCASE("a non-finite loss stops before the update") {
    std::vector<Sample> data = small_sort_set(1, 2);
    data[0].input.nodes[0][0] = NAN;
    data[1].input.nodes[0][0] = NAN;
    cfg.steps = 5;
    TrainState start = init_state(arch, cfg);
    TrainResult r = train(arch, cfg, init_state(arch, cfg), &data);
    CHECK(r.diverged);
    CHECK(r.state.step == 0);
    CHECK(r.state.params == start.params);
    CHECK_FALSE(r.message.empty());
  }
  SUBCASE("checkpoint errors") {
    CHECK_THROWS(load_checkpoint(temp_path("missing/ckpt.json")));
    Json j = checkpoint_to_json(Checkpoint{Task::Sort, label_arch(0, 1, 2), cfg, init_state(arch, cfg)});
    j.erase("architecture");
    CHECK_THROWS_AS(checkpoint_from_json(j), ConfigError);
  }
}

TEST_CASE("physics network interface") {
  Architecture arch(physics_arch());
  TrainConfig cfg;
  cfg.data = default_params(Task::Physics);
  cfg.steps = 0;
  TrainState st = init_state(arch, cfg);
  NetworkModel m(Task::Physics, arch, st.params);
  Rng rng(4);
  const Graph s0 = state_to_graph(gen_chain(4, true, {0.0, -10.0}, 0.02, rng));
  const Graph next = m.predict(s0);
  const PhysicsState a = graph_to_state(s0), b = graph_to_state(next);
  // Fixed masses never move; structure and constants carry over.
  CHECK(b.position.front() == a.position.front());
  CHECK(b.velocity.back() == a.velocity.back());
  CHECK(b.springs == a.springs);
  CHECK(b.mass == a.mass);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int d = 0; d < 2; ++d)
      CHECK(b.position[i][d] == doctest::Approx(a.position[i][d] + a.dt * b.velocity[i][d]).epsilon(1e-12));
  CHECK(task_input_widths(Task::Physics) == AttrWidths{5, 4, 2});
  CHECK(task_input_widths(Task::Sort) == AttrWidths{0, 1, 0});
}
