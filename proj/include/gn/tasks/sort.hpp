#pragma once

#include <cstddef>
#include <vector>

#include "gn/graph.hpp"
#include "gn/random.hpp"
#include "gn/tasks/sample.hpp"

namespace gn::tasks {

// Input graph: one node per element with attr [value]; a directed edge for
// every ordered pair i != j, with no edge attributes. Labels: the smallest
// element, and edge i -> j when j holds the next larger value after i.

struct SortSample {
  Graph input;
  std::vector<double> values;
  std::vector<int> node_labels;
  std::vector<int> edge_labels;
};

/// Labels a list of distinct values; throws std::invalid_argument on duplicates.
SortSample sort_sample(const std::vector<double>& values);

/// n distinct values drawn uniformly from [0, 1).
SortSample gen_sort(std::size_t n, Rng& rng);

/// Recomputes the labels from an input graph.
SortSample sort_labels(const Graph& input);

Sample to_sample(const SortSample& s);

}  // namespace gn::tasks
