#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gn {

/// Flat real attribute. A zero-length vector stands for an unspecified
/// attribute and concatenates as an empty segment.
using AttrVector = std::vector<double>;

struct Edge {
  AttrVector attr;
  int sender = 0;
  int receiver = 0;
  int type = 0;

  bool operator==(const Edge&) const = default;
};

/// Directed, attributed multigraph with a global attribute: (u, V, E).
struct Graph {
  AttrVector global_attr;
  std::vector<AttrVector> nodes;
  std::vector<Edge> edges;

  bool operator==(const Graph&) const = default;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_edges() const { return edges.size(); }

  // Dimensions of the first element; 0 for empty sets.
  std::size_t node_dim() const { return nodes.empty() ? 0 : nodes.front().size(); }
  std::size_t edge_dim() const { return edges.empty() ? 0 : edges.front().attr.size(); }
  std::size_t global_dim() const { return global_attr.size(); }
};

/// Disjoint union of graphs. Per-member globals are kept separately; the
/// merged graph carries the member global only for singleton batches.
struct BatchedGraph {
  Graph merged;
  std::vector<std::size_t> node_offsets;
  std::vector<std::size_t> edge_offsets;
  std::vector<AttrVector> globals;

  bool operator==(const BatchedGraph&) const = default;

  std::size_t num_members() const { return globals.size(); }
};

struct Violation {
  std::string message;
};

class InvalidPermutation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IncompatibleSchema : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InconsistentBatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IncompatibleStructure : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Checks every graph invariant. An empty result means the graph is valid;
/// each violation names the offending element.
std::vector<Violation> validate(const Graph& g);
inline bool is_valid(const Graph& g) { return validate(g).empty(); }

/// Relabels nodes and reorders edges. Node i of `g` becomes node
/// node_perm[i] of the result; edge k becomes edge edge_perm[k].
Graph permute(const Graph& g, const std::vector<int>& node_perm,
              const std::vector<int>& edge_perm);

std::vector<int> inverse_permutation(const std::vector<int>& perm);

BatchedGraph batch(const std::vector<Graph>& gs);
std::vector<Graph> unbatch(const BatchedGraph& bg);

/// Attribute-wise concatenation [g1, g2] of two structure-identical graphs.
Graph concat_attributes(const Graph& g1, const Graph& g2);

/// True when both graphs have the same node count and edge endpoints.
bool same_structure(const Graph& a, const Graph& b);

}  // namespace gn
