#include <doctest.h>

#include "generators.hpp"
#include "gn/graph.hpp"
#include "gn/graph_json.hpp"

using namespace gn;
using gn::testing::random_graph;
using gn::testing::GraphShape;

namespace {

bool has_violation(const Graph& g, const std::string& text) {
  for (const auto& v : validate(g))
    if (v.message.find(text) != std::string::npos) return true;
  return false;
}

Graph two_node_edge() {
  Graph g;
  g.nodes = {{1.0}, {2.0}};
  g.edges = {Edge{{7.0}, 0, 1, 0}};
  return g;
}

}  // namespace

TEST_CASE("validate") {
  SUBCASE("empty graph is valid") { CHECK(is_valid(Graph{})); }
  SUBCASE("receiver out of range") {
    Graph g;
    g.nodes = {{}, {}};
    g.edges = {Edge{{}, 0, 5, 0}};
    CHECK(has_violation(g, "edge 0 receiver out of range"));
  }
  SUBCASE("sender out of range") {
    Graph g;
    g.nodes = {{}};
    g.edges = {Edge{{}, -1, 0, 0}};
    CHECK(has_violation(g, "edge 0 sender out of range"));
  }
  SUBCASE("node dim mismatch") {
    Graph g;
    g.nodes = {{1, 2, 3}, {1, 2, 3, 4}};
    CHECK(has_violation(g, "node dim mismatch"));
    CHECK(has_violation(g, "node 1"));
  }
  SUBCASE("edge dim mismatch") {
    Graph g;
    g.nodes = {{}};
    g.edges = {Edge{{1.0}, 0, 0, 0}, Edge{{}, 0, 0, 0}};
    CHECK(has_violation(g, "edge 1"));
  }
  SUBCASE("non-finite values") {
    Graph g;
    g.global_attr = {NAN};
    CHECK_FALSE(is_valid(g));
    Graph h;
    h.nodes = {{INFINITY}};
    CHECK_FALSE(is_valid(h));
  }
  SUBCASE("self-edges and parallel edges are allowed") {
    Graph g;
    g.nodes = {{}, {}};
    g.edges = {Edge{{}, 0, 0, 0}, Edge{{}, 0, 1, 0}, Edge{{}, 0, 1, 0}};
    CHECK(is_valid(g));
  }
}

TEST_CASE("validation soundness on generated graphs") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    Graph g = random_graph(rng);
    REQUIRE(is_valid(g));
    if (g.nodes.empty()) continue;
    // Each corruption breaks exactly one invariant and must be reported.
    Graph bad = g;
    switch (rng.below(4)) {
      case 0:
        if (bad.edges.empty()) continue;
        bad.edges[rng.below(bad.edges.size())].receiver = static_cast<int>(bad.nodes.size() + rng.below(3));
        break;
      case 1:
        if (bad.edges.empty()) continue;
        bad.edges[rng.below(bad.edges.size())].sender = -1 - static_cast<int>(rng.below(3));
        break;
      case 2: bad.nodes[rng.below(bad.nodes.size())].push_back(0.5); break;
      case 3: bad.nodes[rng.below(bad.nodes.size())][0] = NAN; break;
    }
    if (bad.nodes.size() == 1 && bad.nodes[0].size() == 4) continue;  // a lone node defines the dim
    CHECK_FALSE(is_valid(bad));
  }
}

TEST_CASE("permute") {
  SUBCASE("identity permutation") {
    Rng rng(3);
    Graph g = random_graph(rng);
    std::vector<int> p(g.nodes.size()), q(g.edges.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<int>(i);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = static_cast<int>(i);
    CHECK(permute(g, p, q) == g);
  }
  SUBCASE("two-node swap relabels endpoints") {
    Graph g = two_node_edge();
    Graph h = permute(g, {1, 0}, {0});
    CHECK(h.edges[0].sender == 1);
    CHECK(h.edges[0].receiver == 0);
    CHECK(h.edges[0].attr == AttrVector{7.0});
    CHECK(h.nodes[1] == AttrVector{1.0});
    CHECK(h.nodes[0] == AttrVector{2.0});
  }
  SUBCASE("wrong sizes and non-bijections are rejected") {
    Graph g = two_node_edge();
    CHECK_THROWS_AS(permute(g, {0}, {0}), InvalidPermutation);
    CHECK_THROWS_AS(permute(g, {0, 0}, {0}), InvalidPermutation);
    CHECK_THROWS_AS(permute(g, {0, 1}, {1}), InvalidPermutation);
  }
  SUBCASE("permutation then inverse is the identity") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      Graph g = random_graph(rng);
      auto p = rng.permutation(g.nodes.size());
      auto q = rng.permutation(g.edges.size());
      Graph h = permute(g, p, q);
      CHECK(is_valid(h));
      CHECK(h.global_attr == g.global_attr);
      CHECK(permute(h, inverse_permutation(p), inverse_permutation(q)) == g);
    }
  }
}

TEST_CASE("batch and unbatch") {
  SUBCASE("singleton batch merges to the graph itself") {
    Rng rng(8);
    Graph g = random_graph(rng);
    BatchedGraph bg = batch({g});
    CHECK(bg.merged == g);
    CHECK(unbatch(bg) == std::vector<Graph>{g});
  }
  SUBCASE("edge indices are shifted by node offsets") {
    Graph a = two_node_edge();
    BatchedGraph bg = batch({a, a});
    REQUIRE(bg.merged.edges.size() == 2);
    CHECK(bg.merged.edges[0].sender == 0);
    CHECK(bg.merged.edges[0].receiver == 1);
    CHECK(bg.merged.edges[1].sender == 2);
    CHECK(bg.merged.edges[1].receiver == 3);
    CHECK(bg.node_offsets == std::vector<std::size_t>{0, 2});
  }
  SUBCASE("offsets [0,2] over 4 nodes split into two graphs") {
    BatchedGraph bg;
    bg.merged.nodes = {{1}, {2}, {3}, {4}};
    bg.node_offsets = {0, 2};
    bg.edge_offsets = {0, 0};
    bg.globals = {{}, {}};
    auto gs = unbatch(bg);
    REQUIRE(gs.size() == 2);
    CHECK(gs[0].nodes == std::vector<AttrVector>{{1}, {2}});
    CHECK(gs[1].nodes == std::vector<AttrVector>{{3}, {4}});
  }
  SUBCASE("empty members survive the round trip") {
    Graph empty;
    empty.global_attr = {1.0, 2.0};
    Graph g = two_node_edge();
    g.global_attr = {3.0, 4.0};
    auto gs = unbatch(batch({g, empty, g}));
    REQUIRE(gs.size() == 3);
    CHECK(gs[1] == empty);
  }
  SUBCASE("schema mismatch") {
    Graph a = two_node_edge();
    Graph b = two_node_edge();
    b.nodes = {{1.0, 2.0}, {3.0, 4.0}};
    CHECK_THROWS_AS(batch({a, b}), IncompatibleSchema);
    Graph c = two_node_edge();
    c.global_attr = {1.0};
    CHECK_THROWS_AS(batch({a, c}), IncompatibleSchema);
  }
  SUBCASE("corrupted offsets") {
    BatchedGraph bg = batch({two_node_edge(), two_node_edge()});
    BatchedGraph bad = bg;
    bad.node_offsets = {0, 7};
    CHECK_THROWS_AS(unbatch(bad), InconsistentBatch);
    bad = bg;
    bad.node_offsets = {0, 1};  // edge 0->1 now crosses the boundary
    CHECK_THROWS_AS(unbatch(bad), InconsistentBatch);
    bad = bg;
    bad.edge_offsets = {0};
    CHECK_THROWS_AS(unbatch(bad), InconsistentBatch);
  }
  SUBCASE("round trip on generated lists") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Graph> gs;
      const auto n = rng.below(5);
      for (std::size_t i = 0; i < n; ++i) gs.push_back(random_graph(rng));
      CHECK(unbatch(batch(gs)) == gs);
    }
  }
}

TEST_CASE("concat_attributes") {
  Graph a = two_node_edge();
  Graph zero = a;
  zero.global_attr = {};
  for (auto& v : zero.nodes) v = {};
  for (auto& e : zero.edges) e.attr = {};
  CHECK(concat_attributes(zero, a) == a);

  Graph b = a;
  b.nodes = {{2.0, 3.0}, {4.0, 5.0}};
  Graph c = concat_attributes(a, b);
  CHECK(c.nodes[0] == AttrVector{1.0, 2.0, 3.0});
  CHECK(c.edges[0].attr == AttrVector{7.0, 7.0});

  Rng rng(4);
  Graph g = gn::testing::random_graph_exact(rng, 4, 6);
  Graph h = g, k = g;
  h.nodes[0][0] = 9;
  k.edges[1].attr[0] = -9;
  CHECK(concat_attributes(concat_attributes(g, h), k) == concat_attributes(g, concat_attributes(h, k)));

  Graph other = a;
  other.edges[0].receiver = 0;
  CHECK_THROWS_AS(concat_attributes(a, other), IncompatibleStructure);
}

TEST_CASE("serialization") {
  SUBCASE("empty graph text") {
    CHECK(serialize(Graph{}) == R"({"u":[],"nodes":[],"edges":[]})");
    CHECK(deserialize(R"({"u":[],"nodes":[],"edges":[]})") == Graph{});
  }
  SUBCASE("self-edge round trip") {
    Graph g;
    g.nodes = {{0.1}};
    g.edges = {Edge{{1.0 / 3.0}, 0, 0, 2}};
    CHECK(deserialize(serialize(g)) == g);
  }
  SUBCASE("missing receiver is a parse error naming the path") {
    try {
      deserialize(R"({"u":[],"nodes":[[]],"edges":[{"attr":[],"sender":0}]})");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("receiver") != std::string::npos);
    }
  }
  SUBCASE("syntax errors carry a byte position") {
    try {
      deserialize(R"({"u":[1,],"nodes":[],"edges":[]})");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.position() > 0);
    }
  }
  SUBCASE("round trip is exact on generated graphs") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      Graph g = random_graph(rng, GraphShape{6, 10, 3, 2, 1, 3});
      // Include values that need all 17 significant digits.
      if (!g.nodes.empty()) g.nodes[0][0] = std::nextafter(1.0, 2.0) * rng.uniform(-1e10, 1e10);
      CHECK(deserialize(serialize(g)) == g);
    }
  }
}
