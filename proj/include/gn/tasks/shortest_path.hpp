#pragma once

#include <cstddef>
#include <vector>

#include "gn/graph.hpp"
#include "gn/random.hpp"
#include "gn/tasks/sample.hpp"

namespace gn::tasks {

// Input graph: node attr [is_source, is_target], edge attr [length]. Each
// undirected geometric edge appears once in each direction.

struct PathLabels {
  std::vector<int> nodes;
  std::vector<int> edges;
  double length = 0.0;
};

/// Dijkstra over attr[0] lengths. Among equally short routes the path uses
/// the lowest-index predecessor, and among parallel edges the lowest index.
/// Edges are labelled only in the direction of travel. Throws
/// std::invalid_argument if the target is unreachable.
PathLabels shortest_path_labels(const Graph& g, int source, int target);
/// Reads source and target from the node flags.
PathLabels shortest_path_labels(const Graph& input);

struct ShortestPathSample {
  Graph input;
  std::vector<int> node_labels;
  std::vector<int> edge_labels;
  int source = 0;
  int target = 0;
};

/// Random geometric graph on points in the unit square, linking pairs closer
/// than `connectivity`. Disconnected draws are redrawn. Source and target
/// are distinct.
ShortestPathSample gen_shortest_path(std::size_t n_nodes, double connectivity, Rng& rng);

Sample to_sample(const ShortestPathSample& s);

}  // namespace gn::tasks
