#include "gn/tasks/sort.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gn::tasks {

SortSample sort_sample(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  for (std::size_t i = 1; i < n; ++i)
    if (values[order[i - 1]] == values[order[i]]) throw std::invalid_argument("sort values must be distinct");

  // next[i] is the element that follows i in sorted order.
  std::vector<int> next(n, -1);
  for (std::size_t i = 0; i + 1 < n; ++i) next[order[i]] = static_cast<int>(order[i + 1]);

  SortSample s;
  s.values = values;
  s.node_labels.assign(n, 0);
  if (n > 0) s.node_labels[order[0]] = 1;
  for (std::size_t i = 0; i < n; ++i) s.input.nodes.push_back({values[i]});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      s.input.edges.push_back(Edge{{}, static_cast<int>(i), static_cast<int>(j), 0});
      s.edge_labels.push_back(next[i] == static_cast<int>(j) ? 1 : 0);
    }
  }
  return s;
}

SortSample gen_sort(std::size_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sort needs at least one element");
  std::vector<double> values;
  while (values.size() < n) {
    const double v = rng.uniform();
    if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
  }
  return sort_sample(values);
}

SortSample sort_labels(const Graph& input) {
  std::vector<double> values;
  for (const auto& v : input.nodes) values.push_back(v.at(0));
  SortSample s = sort_sample(values);
  if (s.input.edges.size() != input.edges.size()) throw std::invalid_argument("sort input is not fully connected");
  for (std::size_t k = 0; k < input.edges.size(); ++k) {
    if (input.edges[k].sender != s.input.edges[k].sender || input.edges[k].receiver != s.input.edges[k].receiver) {
      throw std::invalid_argument("sort input edges are not in canonical order");
    }
  }
  return s;
}

Sample to_sample(const SortSample& s) {
  Sample out;
  out.task = Task::Sort;
  out.input = s.input;
  out.target = s.input;
  for (std::size_t i = 0; i < s.node_labels.size(); ++i) out.target.nodes[i] = {static_cast<double>(s.node_labels[i])};
  for (std::size_t k = 0; k < s.edge_labels.size(); ++k) out.target.edges[k].attr = {static_cast<double>(s.edge_labels[k])};
  return out;
}

}  // namespace gn::tasks
