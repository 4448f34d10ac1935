#include "gn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

namespace gn {
namespace {

bool all_finite(const AttrVector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_permutation(const std::vector<int>& perm, std::size_t n, const char* what) {
  if (perm.size() != n) {
    throw InvalidPermutation(std::string(what) + " permutation has size " +
                             std::to_string(perm.size()) + ", expected " + std::to_string(n));
  }
  std::vector<char> seen(n, 0);
  for (int p : perm) {
    if (p < 0 || static_cast<std::size_t>(p) >= n || seen[p]) {
      throw InvalidPermutation(std::string(what) + " permutation is not a bijection");
    }
    seen[p] = 1;
  }
}

AttrVector concat(const AttrVector& a, const AttrVector& b) {
  AttrVector out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

std::vector<Violation> validate(const Graph& g) {
  std::vector<Violation> out;
  const auto nv = static_cast<long long>(g.nodes.size());

  if (!all_finite(g.global_attr)) out.push_back({"global attribute not finite"});

  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].size() != g.nodes.front().size()) {
      out.push_back({"node " + std::to_string(i) + " node dim mismatch (" +
                     std::to_string(g.nodes[i].size()) + " vs " +
                     std::to_string(g.nodes.front().size()) + ")"});
    }
    if (!all_finite(g.nodes[i])) out.push_back({"node " + std::to_string(i) + " attribute not finite"});
  }

  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const Edge& e = g.edges[k];
    const std::string tag = "edge " + std::to_string(k);
    if (e.attr.size() != g.edges.front().attr.size()) {
      out.push_back({tag + " edge dim mismatch (" + std::to_string(e.attr.size()) + " vs " +
                     std::to_string(g.edges.front().attr.size()) + ")"});
    }
    if (e.receiver < 0 || e.receiver >= nv) out.push_back({tag + " receiver out of range"});
    if (e.sender < 0 || e.sender >= nv) out.push_back({tag + " sender out of range"});
    if (e.type < 0) out.push_back({tag + " negative edge type"});
    if (!all_finite(e.attr)) out.push_back({tag + " attribute not finite"});
  }
  return out;
}

std::vector<int> inverse_permutation(const std::vector<int>& perm) {
  check_permutation(perm, perm.size(), "input");
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
  return inv;
}

Graph permute(const Graph& g, const std::vector<int>& node_perm,
              const std::vector<int>& edge_perm) {
  check_permutation(node_perm, g.nodes.size(), "node");
  check_permutation(edge_perm, g.edges.size(), "edge");

  Graph out;
  out.global_attr = g.global_attr;
  out.nodes.resize(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) out.nodes[node_perm[i]] = g.nodes[i];

  out.edges.resize(g.edges.size());
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    Edge e = g.edges[k];
    e.sender = node_perm[e.sender];
    e.receiver = node_perm[e.receiver];
    out.edges[edge_perm[k]] = std::move(e);
  }
  return out;
}

BatchedGraph batch(const std::vector<Graph>& gs) {
  BatchedGraph bg;
  // Members with no nodes (or no edges) carry no dimension information.
  std::optional<std::size_t> node_dim, edge_dim, global_dim;
  auto agree = [](std::optional<std::size_t>& slot, std::size_t d, const char* what, std::size_t m) {
    if (!slot) {
      slot = d;
    } else if (*slot != d) {
      throw IncompatibleSchema(std::string(what) + " dim of member " + std::to_string(m) + " is " +
                               std::to_string(d) + ", expected " + std::to_string(*slot));
    }
  };

  std::size_t node_base = 0;
  std::size_t edge_base = 0;
  for (std::size_t m = 0; m < gs.size(); ++m) {
    const Graph& g = gs[m];
    if (!g.nodes.empty()) agree(node_dim, g.node_dim(), "node", m);
    if (!g.edges.empty()) agree(edge_dim, g.edge_dim(), "edge", m);
    agree(global_dim, g.global_dim(), "global", m);

    bg.node_offsets.push_back(node_base);
    bg.edge_offsets.push_back(edge_base);
    bg.globals.push_back(g.global_attr);
    for (const auto& v : g.nodes) bg.merged.nodes.push_back(v);
    for (const auto& e : g.edges) {
      Edge shifted = e;
      shifted.sender += static_cast<int>(node_base);
      shifted.receiver += static_cast<int>(node_base);
      bg.merged.edges.push_back(std::move(shifted));
    }
    node_base += g.nodes.size();
    edge_base += g.edges.size();
  }
  if (gs.size() == 1) bg.merged.global_attr = gs.front().global_attr;
  return bg;
}

std::vector<Graph> unbatch(const BatchedGraph& bg) {
  const std::size_t members = bg.globals.size();
  if (bg.node_offsets.size() != members || bg.edge_offsets.size() != members) {
    throw InconsistentBatch("offset lists do not match member count");
  }
  const std::size_t nv = bg.merged.nodes.size();
  const std::size_t ne = bg.merged.edges.size();

  std::vector<Graph> out(members);
  for (std::size_t m = 0; m < members; ++m) {
    const std::size_t n0 = bg.node_offsets[m];
    const std::size_t n1 = m + 1 < members ? bg.node_offsets[m + 1] : nv;
    const std::size_t e0 = bg.edge_offsets[m];
    const std::size_t e1 = m + 1 < members ? bg.edge_offsets[m + 1] : ne;
    if (n0 > n1 || n1 > nv || e0 > e1 || e1 > ne) {
      throw InconsistentBatch("offsets of member " + std::to_string(m) + " are out of order");
    }

    Graph& g = out[m];
    g.global_attr = bg.globals[m];
    g.nodes.assign(bg.merged.nodes.begin() + static_cast<std::ptrdiff_t>(n0),
                   bg.merged.nodes.begin() + static_cast<std::ptrdiff_t>(n1));
    for (std::size_t k = e0; k < e1; ++k) {
      Edge e = bg.merged.edges[k];
      const auto lo = static_cast<long long>(n0);
      const auto hi = static_cast<long long>(n1);
      if (e.sender < lo || e.sender >= hi || e.receiver < lo || e.receiver >= hi) {
        throw InconsistentBatch("edge " + std::to_string(k) + " crosses a member boundary");
      }
      e.sender -= static_cast<int>(n0);
      e.receiver -= static_cast<int>(n0);
      g.edges.push_back(std::move(e));
    }
  }
  return out;
}

bool same_structure(const Graph& a, const Graph& b) {
  if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;
  for (std::size_t k = 0; k < a.edges.size(); ++k) {
    const Edge& x = a.edges[k];
    const Edge& y = b.edges[k];
    if (x.sender != y.sender || x.receiver != y.receiver || x.type != y.type) return false;
  }
  return true;
}

Graph concat_attributes(const Graph& g1, const Graph& g2) {
  if (!same_structure(g1, g2)) {
    throw IncompatibleStructure("graphs differ in node count, edge count or edge endpoints");
  }
  Graph out;
  out.global_attr = concat(g1.global_attr, g2.global_attr);
  out.nodes.reserve(g1.nodes.size());
  for (std::size_t i = 0; i < g1.nodes.size(); ++i) out.nodes.push_back(concat(g1.nodes[i], g2.nodes[i]));
  out.edges.reserve(g1.edges.size());
  for (std::size_t k = 0; k < g1.edges.size(); ++k) {
    Edge e = g1.edges[k];
    e.attr = concat(g1.edges[k].attr, g2.edges[k].attr);
    out.edges.push_back(std::move(e));
  }
  return out;
}

}  // namespace gn
