#include <doctest.h>

#include <queue>

#include "generators.hpp"
#include "gn/composer.hpp"
#include "gn/graph_json.hpp"
#include "oracles.hpp"

using namespace gn;
using gn::testing::GraphShape;
using gn::testing::random_graph;
using gn::testing::random_graph_exact;

namespace {

GNConfig pass_through() { return GNConfig{}; }

// Message passing with no global state: phi_e reads edge, receiver, sender;
// phi_v reads the aggregate and the node.
GNConfig local_block(std::size_t e, std::size_t v) {
  BlockHyper h;
  h.hidden = {8};
  return make_variant("interaction_network", BlockDims{e, v, 0, e, v, 0}, h);
}

GNConfig full_block(std::size_t e, std::size_t v, std::size_t u) {
  BlockHyper h;
  h.hidden = {8};
  return make_variant("full_gn", BlockDims{e, v, u, e, v, u}, h);
}

Graph path_graph(std::size_t n, std::size_t e_dim, std::size_t v_dim, Rng& rng) {
  Graph g;
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back(gn::testing::random_attr(rng, v_dim));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const int a = static_cast<int>(i), b = a + 1;
    g.edges.push_back(Edge{gn::testing::random_attr(rng, e_dim), a, b, 0});
    g.edges.push_back(Edge{gn::testing::random_attr(rng, e_dim), b, a, 0});
  }
  return g;
}

// Hop distances from `src` along sender -> receiver edges, the direction in
// which messages carry influence.
std::vector<std::size_t> hops_from(const Graph& g, std::size_t src) {
  const std::size_t inf = g.nodes.size() + 1;
  std::vector<std::size_t> d(g.nodes.size(), inf);
  std::queue<std::size_t> q;
  d[src] = 0;
  q.push(src);
  while (!q.empty()) {
    const std::size_t i = q.front();
    q.pop();
    for (const auto& e : g.edges) {
      if (static_cast<std::size_t>(e.sender) != i) continue;
      const auto r = static_cast<std::size_t>(e.receiver);
      if (d[r] == inf) {
        d[r] = d[i] + 1;
        q.push(r);
      }
    }
  }
  return d;
}

}  // namespace

TEST_CASE("compose_sequential") {
  Rng rng(1);
  SUBCASE("a single block equals that block") {
    GNConfig c = full_block(2, 3, 2);
    ParameterStore ps;
    Core core(compose_sequential({c}));
    core.init(ps, rng);
    Graph g = random_graph(rng);
    CHECK(core.apply(g, ps) == apply_block(g, c, ps, "core/0/"));
  }
  SUBCASE("two pass-through blocks are the identity") {
    ParameterStore ps;
    Graph g = random_graph(rng);
    CHECK(run_core(g, compose_sequential({pass_through(), pass_through()}), ps) == g);
  }
  SUBCASE("unshared chain equals block-by-block application") {
    BlockHyper h;
    h.hidden = {6};
    std::vector<GNConfig> cs = {make_variant("full_gn", {2, 3, 2, 4, 5, 1}, h),
                                make_variant("full_gn", {4, 5, 1, 2, 2, 3}, h),
                                make_variant("independent", {2, 2, 3, 1, 1, 1}, h)};
    ParameterStore ps;
    Core core(compose_sequential(cs));
    core.init(ps, rng);
    for (int trial = 0; trial < 20; ++trial) {
      Graph g = random_graph(rng);
      Graph manual = g;
      for (std::size_t m = 0; m < cs.size(); ++m) manual = apply_block(manual, cs[m], ps, "core/" + std::to_string(m) + "/");
      CHECK(core.apply(g, ps) == manual);
    }
  }
  SUBCASE("adjacent dims must chain") {
    BlockHyper h;
    EPDSpec spec;
    spec.core = compose_sequential({make_variant("full_gn", {2, 3, 2, 4, 5, 1}, h), full_block(2, 3, 2)});
    CHECK_THROWS_WITH_AS(Architecture{spec}, doctest::Contains("dim chain mismatch at core step 2"), ConfigError);
  }
}

TEST_CASE("run_core") {
  Rng rng(2);
  SUBCASE("shared M=3 equals manual unrolling with one parameter set") {
    GNConfig c = full_block(2, 3, 2);
    ParameterStore ps;
    Core core(CoreSpec{{c}, 3, true});
    core.init(ps, rng);
    for (int trial = 0; trial < 20; ++trial) {
      Graph g = random_graph(rng);
      Graph manual = apply_block(apply_block(apply_block(g, c, ps, "core/"), c, ps, "core/"), c, ps, "core/");
      CHECK(core.apply(g, ps) == manual);
    }
  }
  SUBCASE("M=1 equals apply_block") {
    GNConfig c = full_block(2, 3, 2);
    ParameterStore ps;
    Core core(CoreSpec{{c}, 1, true});
    core.init(ps, rng);
    Graph g = random_graph(rng);
    CHECK(core.apply(g, ps) == apply_block(g, c, ps, "core/"));
  }
  SUBCASE("path graph, M=2: node 0 reaches nodes 0..2 only") {
    GNConfig c = local_block(2, 3);
    ParameterStore ps;
    Core core(CoreSpec{{c}, 2, true});
    core.init(ps, rng);
    gn::testing::jitter_params(ps, rng);
    Graph g = path_graph(5, 2, 3, rng);
    Graph h = g;
    h.nodes[0][1] += 0.75;
    Graph a = core.apply(g, ps), b = core.apply(h, ps);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.nodes[i] != b.nodes[i]);
    CHECK(a.nodes[3] == b.nodes[3]);
    CHECK(a.nodes[4] == b.nodes[4]);
  }
  SUBCASE("fully connected 4-node graph, M=1: every node sees every other") {
    GNConfig c = local_block(2, 3);
    ParameterStore ps;
    Core core(CoreSpec{{c}, 1, true});
    core.init(ps, rng);
    gn::testing::jitter_params(ps, rng);
    Graph g;
    for (int i = 0; i < 4; ++i) g.nodes.push_back(gn::testing::random_attr(rng, 3));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) g.edges.push_back(Edge{gn::testing::random_attr(rng, 2), i, j, 0});
    for (std::size_t src = 0; src < 4; ++src) {
      Graph h = g;
      h.nodes[src][0] += 0.5;
      Graph a = core.apply(g, ps), b = core.apply(h, ps);
      for (std::size_t i = 0; i < 4; ++i) CHECK(a.nodes[i] != b.nodes[i]);
    }
  }
  SUBCASE("m-hop locality on generated graphs") {
    GNConfig c = local_block(2, 3);
    for (std::size_t steps = 1; steps <= 3; ++steps) {
      ParameterStore ps;
      Core core(CoreSpec{{c}, steps, true});
      core.init(ps, rng);
      gn::testing::jitter_params(ps, rng);
      for (int trial = 0; trial < 40; ++trial) {
        Graph g = random_graph_exact(rng, 10, rng.below(16), GraphShape{10, 16, 2, 3, 0, 1});
        const std::size_t src = rng.below(g.nodes.size());
        Graph h = g;
        for (double& x : h.nodes[src]) x += rng.uniform(-1, 1);
        const auto d = hops_from(g, src);
        Graph a = core.apply(g, ps), b = core.apply(h, ps);
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
          if (d[i] > steps) CHECK(a.nodes[i] == b.nodes[i]);
        for (std::size_t k = 0; k < g.edges.size(); ++k) {
          // An edge's output depends on its endpoints' states after M-1 steps.
          const auto s = static_cast<std::size_t>(g.edges[k].sender);
          const auto r = static_cast<std::size_t>(g.edges[k].receiver);
          if (d[s] > steps - 1 && d[r] > steps - 1) CHECK(a.edges[k].attr == b.edges[k].attr);
        }
      }
    }
  }
  SUBCASE("bad core specs") {
    ParameterStore ps;
    Graph g;
    CHECK_THROWS_AS(run_core(g, CoreSpec{{pass_through()}, 0, true}, ps), ConfigError);
    CHECK_THROWS_AS(run_core(g, CoreSpec{{pass_through()}, 2, false}, ps), ConfigError);
    CHECK_THROWS_AS(run_core(g, CoreSpec{{}, 1, true}, ps), ConfigError);
  }
}

TEST_CASE("parameter counts") {
  GNConfig c = full_block(2, 3, 2);
  auto count = [&](std::size_t steps, bool shared) {
    Rng rng(3);
    ParameterStore ps;
    CoreSpec spec{shared ? std::vector<GNConfig>{c} : std::vector<GNConfig>(steps, c), steps, shared};
    Core(spec).init(ps, rng);
    return ps.num_scalars();
  };
  const std::size_t one = count(1, true);
  CHECK(one > 0);
  for (std::size_t m = 1; m <= 6; ++m) {
    CHECK(count(m, true) == one);
    CHECK(count(m, false) == m * one);
  }
}

TEST_CASE("encode-process-decode") {
  Rng rng(4);
  SUBCASE("pass-through encoder and decoder reduce to the core") {
    EPDSpec spec;
    spec.encoder = pass_through();
    spec.decoder = pass_through();
    spec.core = CoreSpec{{full_block(2, 3, 2)}, 2, true};
    Architecture arch(spec);
    ParameterStore ps;
    arch.init(ps, rng);
    for (int trial = 0; trial < 20; ++trial) {
      Graph g = random_graph(rng);
      CHECK(arch.apply(g, ps) == run_core(g, spec.core, ps));
    }
  }
  SUBCASE("node focus passes edges and globals through") {
    EPDSpec spec;
    spec.core = CoreSpec{{full_block(2, 3, 2)}, 2, true};
    BlockHyper h;
    h.hidden = {5};
    spec.decoder = make_variant("full_gn", {2, 3, 2, 4, 1, 6}, h);
    spec.output_focus = OutputFocus::Nodes;
    Architecture arch(spec);
    ParameterStore ps;
    arch.init(ps, rng);
    CHECK_FALSE(ps.contains("decoder/edge/mlp/l0/w"));
    CHECK_FALSE(ps.contains("decoder/global/mlp/l0/w"));
    Graph g = random_graph_exact(rng, 6, 9);
    Graph latent = run_core(g, spec.core, ps);
    Graph out = arch.apply(g, ps);
    CHECK(out.global_attr == latent.global_attr);
    for (std::size_t k = 0; k < g.edges.size(); ++k) CHECK(out.edges[k].attr == latent.edges[k].attr);
    for (const auto& v : out.nodes) CHECK(v.size() == 1);
  }
  SUBCASE("encoder, core and decoder compose in order") {
    BlockHyper h;
    h.hidden = {5};
    EPDSpec spec;
    spec.encoder = make_variant("independent", {2, 3, 2, 4, 4, 4}, h);
    spec.core = CoreSpec{{full_block(4, 4, 4)}, 3, true};
    spec.decoder = make_variant("independent", {4, 4, 4, 1, 2, 0}, h);
    Architecture arch(spec);
    ParameterStore ps;
    arch.init(ps, rng);
    Graph g = random_graph(rng);
    Graph manual = apply_block(g, *spec.encoder, ps, "encoder/");
    for (int m = 0; m < 3; ++m) manual = apply_block(manual, spec.core.configs[0], ps, "core/");
    manual = apply_block(manual, *spec.decoder, ps, "decoder/");
    CHECK(arch.apply(g, ps) == manual);

    Tape tape;
    auto outs = arch.forward(to_vars(tape, g), ps, true);
    CHECK(outs.size() == 3);
    CHECK(to_graph(outs.back(), g) == manual);
  }
  SUBCASE("skip connections feed the encoded graph to every step") {
    BlockHyper h;
    h.hidden = {5};
    EPDSpec spec;
    spec.encoder = make_variant("independent", {2, 3, 2, 2, 2, 2}, h);
    spec.core = CoreSpec{{make_variant("full_gn", {4, 4, 4, 2, 2, 2}, h)}, 2, true};
    spec.skip = true;
    Architecture arch(spec);
    ParameterStore ps;
    arch.init(ps, rng);
    Graph g = random_graph(rng);
    Graph enc = apply_block(g, *spec.encoder, ps, "encoder/");
    Graph manual = enc;
    for (int m = 0; m < 2; ++m) manual = apply_block(skip_connect(enc, manual), spec.core.configs[0], ps, "core/");
    CHECK(arch.apply(g, ps) == manual);
  }
  SUBCASE("batched application equals per-graph application") {
    EPDSpec spec;
    BlockHyper h;
    h.hidden = {5};
    spec.encoder = make_variant("independent", {2, 3, 2, 3, 3, 3}, h);
    spec.core = CoreSpec{{full_block(3, 3, 3)}, 2, true};
    spec.decoder = make_variant("independent", {3, 3, 3, 1, 1, 1}, h);
    Architecture arch(spec);
    ParameterStore ps;
    arch.init(ps, rng);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<Graph> gs;
      for (std::size_t i = 0, n = 1 + rng.below(4); i < n; ++i) gs.push_back(random_graph(rng));
      auto outs = unbatch(arch.apply(batch(gs), ps));
      for (std::size_t i = 0; i < gs.size(); ++i) CHECK(outs[i] == arch.apply(gs[i], ps));
    }
  }
  SUBCASE("encoder output must match the core input") {
    BlockHyper h;
    EPDSpec spec;
    spec.encoder = make_variant("independent", {2, 3, 2, 2, 5, 2}, h);
    spec.core = CoreSpec{{full_block(2, 3, 2)}, 1, true};
    CHECK_THROWS_WITH_AS(Architecture{spec}, doctest::Contains("dim chain mismatch at core step 1"), ConfigError);
    spec.encoder = make_variant("independent", {2, 3, 2, 2, 3, 2}, h);
    spec.decoder = make_variant("independent", {2, 4, 2, 1, 1, 1}, h);
    CHECK_THROWS_WITH_AS(Architecture{spec}, doctest::Contains("decoder"), ConfigError);
  }
}

TEST_CASE("recurrent_step") {
  Rng rng(5);
  SUBCASE("pass-through core: hidden is the concatenation chain") {
    EPDSpec spec;
    spec.core = CoreSpec{{pass_through()}, 2, true};
    Architecture arch(spec);
    ParameterStore ps;
    Graph x1 = random_graph_exact(rng, 4, 7);
    Graph x2 = x1;
    for (auto& v : x2.nodes) v = gn::testing::random_attr(rng, 3);
    Graph h0 = zero_hidden(x1, 1, 2, 1);
    auto [o1, h1] = arch.recurrent_step(x1, h0, ps);
    CHECK(h1 == concat_attributes(x1, h0));
    CHECK(o1 == h1);
    auto [o2, h2] = arch.recurrent_step(x2, h1, ps);
    CHECK(h2 == concat_attributes(x2, concat_attributes(x1, h0)));
    CHECK(h2.nodes.size() == x1.nodes.size());
    CHECK(h2.edges.size() == x1.edges.size());
  }
  SUBCASE("zero-width hidden state is a stateless model per step") {
    BlockHyper h;
    h.hidden = {5};
    EPDSpec spec;
    spec.encoder = make_variant("independent", {2, 3, 2, 3, 3, 3}, h);
    spec.core = CoreSpec{{full_block(3, 3, 3)}, 2, true};
    spec.decoder = make_variant("independent", {3, 3, 3, 1, 1, 1}, h);
    Architecture arch(spec);
    ParameterStore ps;
    arch.init(ps, rng);
    for (int trial = 0; trial < 10; ++trial) {
      Graph g = random_graph(rng);
      auto [out, next] = arch.recurrent_step(g, zero_hidden(g, 0, 0, 0), ps);
      CHECK(out == arch.apply(g, ps));
    }
  }
  SUBCASE("learned recurrent model keeps the structure") {
    BlockHyper h;
    h.hidden = {5};
    EPDSpec spec;
    spec.encoder = make_variant("independent", {2, 3, 2, 2, 2, 2}, h);
    spec.core = CoreSpec{{make_variant("full_gn", {4, 4, 4, 2, 2, 2}, h)}, 1, true};
    spec.decoder = make_variant("independent", {2, 2, 2, 1, 1, 0}, h);
    spec.recurrent = true;
    Architecture arch(spec);
    CHECK(arch.hidden_widths() == AttrWidths{2, 2, 2});
    ParameterStore ps;
    arch.init(ps, rng);
    Graph g = random_graph_exact(rng, 5, 8);
    Graph hid = zero_hidden(g, 2, 2, 2);
    for (int t = 0; t < 3; ++t) {
      Graph before = hid;
      auto [out, next] = arch.recurrent_step(g, hid, ps);
      CHECK(hid == before);
      CHECK(same_structure(next, g));
      CHECK(out.nodes[0].size() == 1);
      Graph manual = apply_block(concat_attributes(apply_block(g, *spec.encoder, ps, "encoder/"), hid),
                                 spec.core.configs[0], ps, "core/");
      CHECK(next == manual);
      hid = next;
    }
  }
  SUBCASE("hidden widths take part in the dim chain") {
    BlockHyper h;
    EPDSpec spec;
    spec.encoder = make_variant("independent", {2, 3, 2, 2, 2, 2}, h);
    spec.core = CoreSpec{{make_variant("full_gn", {4, 4, 4, 2, 2, 2}, h)}, 1, true};
    CHECK_THROWS_AS(Architecture{spec}, ConfigError);
    spec.recurrent = true;
    CHECK_NOTHROW(Architecture{spec});
  }
  SUBCASE("structural mismatch") {
    EPDSpec spec;
    spec.core = CoreSpec{{pass_through()}, 1, true};
    Architecture arch(spec);
    ParameterStore ps;
    Graph g = random_graph_exact(rng, 4, 6);
    Graph other = random_graph_exact(rng, 5, 6);
    CHECK_THROWS_AS(arch.recurrent_step(g, zero_hidden(other, 1, 1, 1), ps), IncompatibleStructure);
  }
}

TEST_CASE("skip_connect") {
  Rng rng(6);
  Graph g = random_graph_exact(rng, 3, 4);
  Graph h = zero_hidden(g, 1, 1, 1);
  CHECK(skip_connect(g, h) == concat_attributes(g, h));
  Graph other = g;
  other.edges.pop_back();
  CHECK_THROWS_AS(skip_connect(g, other), IncompatibleStructure);
}

TEST_CASE("architecture JSON") {
  BlockHyper h;
  h.hidden = {7, 7};
  EPDSpec spec;
  spec.encoder = make_variant("independent", {1, 2, 0, 4, 4, 4}, h);
  spec.core = compose_sequential({make_variant("full_gn", {4, 4, 4, 4, 4, 4}, h), make_variant("mpnn", {4, 4, 4, 4, 4, 4}, h)});
  spec.decoder = make_variant("independent", {4, 4, 4, 2, 2, 0}, h);
  spec.output_focus = OutputFocus::Mix;
  spec.skip = false;
  spec.recurrent = true;
  spec.encoder = make_variant("independent", {1, 2, 0, 2, 2, 2}, h);
  spec.decoder = make_variant("independent", {2, 2, 2, 2, 2, 0}, h);
  spec.core = compose_sequential({make_variant("full_gn", {4, 4, 4, 4, 4, 4}, h), make_variant("mpnn", {4, 4, 4, 2, 2, 2}, h)});
  CHECK_NOTHROW(Architecture{spec});
  const Json j = architecture_to_json(spec);
  EPDSpec back = architecture_from_json(j);
  CHECK(architecture_to_json(back) == j);
  CHECK(back.core.steps == 2);
  CHECK_FALSE(back.core.shared);
  CHECK(back.core.configs[1] == spec.core.configs[1]);
  CHECK(*back.encoder == *spec.encoder);
  CHECK(back.recurrent);

  Json shared = Json::parse(R"({"encoder":null,"decoder":null,"core":{"config":{"preset":"deep_set",
      "dims":{"edge_in":0,"node_in":2,"global_in":1,"edge_out":0,"node_out":2,"global_out":1}},"M":4}})");
  EPDSpec s = architecture_from_json(shared);
  CHECK(s.core.shared);
  CHECK(s.core.steps == 4);
  CHECK_FALSE(s.encoder.has_value());
  CHECK(s.output_focus == OutputFocus::Mix);

  CHECK_THROWS_AS(architecture_from_json(Json::parse(R"({"encoder":null})")), ConfigError);
  CHECK_THROWS_AS(architecture_from_json(Json::parse(R"({"core":{"config":{"preset":"nope"}}})")), ConfigError);
  CHECK_THROWS_AS(architecture_from_json(Json::parse(R"({"core":{"config":{"preset":"full_gn"}},"output_focus":"x"})")),
                  ConfigError);
}
