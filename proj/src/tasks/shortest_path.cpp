#include "gn/tasks/shortest_path.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gn::tasks {

PathLabels shortest_path_labels(const Graph& g, int source, int target) {
  const std::size_t n = g.nodes.size();
  if (source < 0 || target < 0 || static_cast<std::size_t>(source) >= n || static_cast<std::size_t>(target) >= n) {
    throw std::invalid_argument("shortest path query out of range");
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<int> pred(n, -1), pred_edge(n, -1);
  std::vector<bool> done(n, false);
  dist[static_cast<std::size_t>(source)] = 0.0;

  for (std::size_t round = 0; round < n; ++round) {
    int u = -1;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && dist[i] < inf && (u < 0 || dist[i] < dist[static_cast<std::size_t>(u)])) u = static_cast<int>(i);
    if (u < 0) break;
    done[static_cast<std::size_t>(u)] = true;
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
      const Edge& e = g.edges[k];
      if (e.sender != u) continue;
      const auto v = static_cast<std::size_t>(e.receiver);
      if (done[v]) continue;
      const double d = dist[static_cast<std::size_t>(u)] + e.attr.at(0);
      const bool better = d < dist[v];
      const bool tie = d == dist[v] && (u < pred[v] || (u == pred[v] && static_cast<int>(k) < pred_edge[v]));
      if (better || tie) {
        dist[v] = d;
        pred[v] = u;
        pred_edge[v] = static_cast<int>(k);
      }
    }
  }
  const auto t = static_cast<std::size_t>(target);
  if (dist[t] == inf) throw std::invalid_argument("shortest path target unreachable");

  PathLabels out;
  out.nodes.assign(n, 0);
  out.edges.assign(g.edges.size(), 0);
  out.length = dist[t];
  for (int v = target; v >= 0; v = pred[static_cast<std::size_t>(v)]) {
    out.nodes[static_cast<std::size_t>(v)] = 1;
    if (v == source) break;
    out.edges[static_cast<std::size_t>(pred_edge[static_cast<std::size_t>(v)])] = 1;
  }
  return out;
}

PathLabels shortest_path_labels(const Graph& input) {
  int s = -1, t = -1;
  for (std::size_t i = 0; i < input.nodes.size(); ++i) {
    if (input.nodes[i].at(0) > 0.5) s = static_cast<int>(i);
    if (input.nodes[i].at(1) > 0.5) t = static_cast<int>(i);
  }
  if (s < 0 || t < 0) throw std::invalid_argument("shortest path input has no source or target flag");
  return shortest_path_labels(input, s, t);
}

namespace {

bool connected(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<int> comp(n);
  for (std::size_t i = 0; i < n; ++i) comp[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (comp[static_cast<std::size_t>(x)] != x) x = comp[static_cast<std::size_t>(x)] = comp[static_cast<std::size_t>(comp[static_cast<std::size_t>(x)])];
    return x;
  };
  std::size_t parts = n;
  for (const Edge& e : edges) {
    const int a = find(e.sender), b = find(e.receiver);
    if (a != b) {
      comp[static_cast<std::size_t>(a)] = b;
      --parts;
    }
  }
  return parts <= 1;
}

}  // namespace

ShortestPathSample gen_shortest_path(std::size_t n_nodes, double connectivity, Rng& rng) {
  if (n_nodes < 2) throw std::invalid_argument("shortest path needs at least 2 nodes");
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<std::array<double, 2>> pts(n_nodes);
    for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n_nodes; ++i) {
      for (std::size_t j = i + 1; j < n_nodes; ++j) {
        const double d = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
        if (d > connectivity) continue;
        edges.push_back(Edge{{d}, static_cast<int>(i), static_cast<int>(j), 0});
        edges.push_back(Edge{{d}, static_cast<int>(j), static_cast<int>(i), 0});
      }
    }
    if (!connected(n_nodes, edges)) continue;

    ShortestPathSample s;
    s.source = static_cast<int>(rng.below(n_nodes));
    s.target = static_cast<int>(rng.below(n_nodes - 1));
    if (s.target >= s.source) ++s.target;
    s.input.edges = std::move(edges);
    s.input.nodes.assign(n_nodes, AttrVector{0.0, 0.0});
    s.input.nodes[static_cast<std::size_t>(s.source)][0] = 1.0;
    s.input.nodes[static_cast<std::size_t>(s.target)][1] = 1.0;
    PathLabels l = shortest_path_labels(s.input, s.source, s.target);
    s.node_labels = std::move(l.nodes);
    s.edge_labels = std::move(l.edges);
    return s;
  }
  throw std::runtime_error("could not draw a connected graph; raise the connectivity radius");
}

Sample to_sample(const ShortestPathSample& s) {
  Sample out;
  out.task = Task::ShortestPath;
  out.input = s.input;
  out.target = s.input;
  out.target.global_attr.clear();
  for (std::size_t i = 0; i < s.node_labels.size(); ++i) out.target.nodes[i] = {static_cast<double>(s.node_labels[i])};
  for (std::size_t k = 0; k < s.edge_labels.size(); ++k) out.target.edges[k].attr = {static_cast<double>(s.edge_labels[k])};
  return out;
}

}  // namespace gn::tasks
