#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "gn/graph.hpp"
#include "gn/kernels.hpp"
#include "gn/tape.hpp"

namespace gn {

/// Index structure of a graph or a disjoint union of graphs, shared by all
/// blocks applied to it.
struct Topology {
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;
  std::size_t n_graphs = 1;
  std::vector<int> types;
  std::shared_ptr<const Grouping> by_receiver;  // edge -> receiver node
  std::shared_ptr<const Grouping> by_sender;    // edge -> sender node
  std::shared_ptr<const Grouping> node_graph;   // node -> member graph
  std::shared_ptr<const Grouping> edge_graph;   // edge -> member graph

  const std::vector<int>& senders() const { return by_sender->ids; }
  const std::vector<int>& receivers() const { return by_receiver->ids; }

  /// Edge-to-edge neighbourhood used by structure2vec: for each edge k the
  /// edges l with r_l == s_k and s_l != r_k, ascending in l. `source` maps a
  /// pair to l (gather), `target` maps it to k (segment).
  struct LinePairs {
    std::shared_ptr<const Grouping> source;
    std::shared_ptr<const Grouping> target;
  };
  LinePairs s2v_pairs;
};

std::shared_ptr<const Topology> make_topology(const Graph& g);
std::shared_ptr<const Topology> make_topology(const BatchedGraph& bg);

/// Attribute tensors of a graph (or batch) on a tape. Globals hold one row
/// per member graph.
struct GraphVars {
  Var edges;
  Var nodes;
  Var globals;
  std::shared_ptr<const Topology> topo;
};

GraphVars to_vars(Tape& tape, const Graph& g);
GraphVars to_vars(Tape& tape, const BatchedGraph& bg);
GraphVars to_vars(Tape& tape, const Graph& g, std::shared_ptr<const Topology> topo);

/// Reassembles a single graph; `structure` supplies senders, receivers and types.
Graph to_graph(const GraphVars& gv, const Graph& structure);
BatchedGraph to_batched(const GraphVars& gv, const BatchedGraph& structure);

/// Replaces an empty [0 x c] tensor by [0 x width] so zero-row inputs pass
/// width checks. Non-empty tensors are returned unchanged.
Var fit_width(Var x, std::size_t width);

}  // namespace gn
