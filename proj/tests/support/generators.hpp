#pragma once

// Hand-rolled random generators for property tests.

#include <cmath>
#include <cstddef>
#include <vector>

#include "gn/graph.hpp"
#include "gn/random.hpp"
#include "gn/tensor.hpp"

namespace gn::testing {

struct GraphShape {
  std::size_t max_nodes = 12;
  std::size_t max_edges = 40;
  std::size_t edge_dim = 2;
  std::size_t node_dim = 3;
  std::size_t global_dim = 2;
  int edge_types = 1;
};

inline AttrVector random_attr(Rng& rng, std::size_t dim, double lo = -2.0, double hi = 2.0) {
  AttrVector v(dim);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

/// Random multigraph with self-edges and parallel edges allowed. At least one
/// node whenever edges are drawn.
inline Graph random_graph(Rng& rng, const GraphShape& s = {}) {
  Graph g;
  g.global_attr = random_attr(rng, s.global_dim);
  const std::size_t n = rng.below(s.max_nodes + 1);
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back(random_attr(rng, s.node_dim));
  const std::size_t m = n == 0 ? 0 : rng.below(s.max_edges + 1);
  for (std::size_t k = 0; k < m; ++k) {
    Edge e;
    e.attr = random_attr(rng, s.edge_dim);
    e.sender = static_cast<int>(rng.below(n));
    e.receiver = static_cast<int>(rng.below(n));
    e.type = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.edge_types)));
    g.edges.push_back(std::move(e));
  }
  return g;
}

/// Random graph with exactly n nodes and m edges.
inline Graph random_graph_exact(Rng& rng, std::size_t n, std::size_t m, const GraphShape& s = {}) {
  Graph g;
  g.global_attr = random_attr(rng, s.global_dim);
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back(random_attr(rng, s.node_dim));
  for (std::size_t k = 0; k < m; ++k) {
    Edge e;
    e.attr = random_attr(rng, s.edge_dim);
    e.sender = static_cast<int>(rng.below(n));
    e.receiver = static_cast<int>(rng.below(n));
    e.type = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.edge_types)));
    g.edges.push_back(std::move(e));
  }
  return g;
}

inline Tensor random_tensor(Rng& rng, std::size_t rows, std::size_t cols, double lo = -2.0, double hi = 2.0) {
  Tensor t(rows, cols);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

inline double max_abs_diff(const AttrVector& a, const AttrVector& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const Graph& a, const Graph& b) {
  if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return INFINITY;
  double m = max_abs_diff(a.global_attr, b.global_attr);
  for (std::size_t i = 0; i < a.nodes.size(); ++i) m = std::max(m, max_abs_diff(a.nodes[i], b.nodes[i]));
  for (std::size_t k = 0; k < a.edges.size(); ++k) m = std::max(m, max_abs_diff(a.edges[k].attr, b.edges[k].attr));
  return m;
}

}  // namespace gn::testing
