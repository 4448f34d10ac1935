#include "gn/topology.hpp"

#include <string>

namespace gn {
namespace {

std::shared_ptr<Topology> build(const Graph& merged, const std::vector<std::size_t>& node_offsets,
                                const std::vector<std::size_t>& edge_offsets) {
  auto t = std::make_shared<Topology>();
  t->n_nodes = merged.nodes.size();
  t->n_edges = merged.edges.size();
  t->n_graphs = node_offsets.size();

  std::vector<int> senders, receivers;
  senders.reserve(t->n_edges);
  receivers.reserve(t->n_edges);
  t->types.reserve(t->n_edges);
  for (const Edge& e : merged.edges) {
    senders.push_back(e.sender);
    receivers.push_back(e.receiver);
    t->types.push_back(e.type);
  }
  t->by_sender = make_grouping(std::move(senders), t->n_nodes);
  t->by_receiver = make_grouping(std::move(receivers), t->n_nodes);

  auto member_ids = [&](const std::vector<std::size_t>& offsets, std::size_t total) {
    std::vector<int> ids(total);
    for (std::size_t m = 0; m < offsets.size(); ++m) {
      const std::size_t end = m + 1 < offsets.size() ? offsets[m + 1] : total;
      for (std::size_t i = offsets[m]; i < end; ++i) ids[i] = static_cast<int>(m);
    }
    return ids;
  };
  t->node_graph = make_grouping(member_ids(node_offsets, t->n_nodes), t->n_graphs);
  t->edge_graph = make_grouping(member_ids(edge_offsets, t->n_edges), t->n_graphs);

  // structure2vec neighbourhood: pairs (l, k) with r_l == s_k and s_l != r_k.
  std::vector<int> src, dst;
  const auto& incoming = *t->by_receiver;
  for (std::size_t k = 0; k < t->n_edges; ++k) {
    const int sk = t->by_sender->ids[k];
    const int rk = t->by_receiver->ids[k];
    for (std::size_t m = incoming.offsets[sk]; m < incoming.offsets[sk + 1]; ++m) {
      const int l = incoming.members[m];
      if (t->by_sender->ids[static_cast<std::size_t>(l)] == rk) continue;
      src.push_back(l);
      dst.push_back(static_cast<int>(k));
    }
  }
  t->s2v_pairs.source = make_grouping(std::move(src), t->n_edges);
  t->s2v_pairs.target = make_grouping(std::move(dst), t->n_edges);
  return t;
}

Tensor rows_to_tensor(const std::vector<AttrVector>& rows, std::size_t width) {
  Tensor t(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw ShapeError("row " + std::to_string(r) + " has width " + std::to_string(rows[r].size()) +
                       ", expected " + std::to_string(width));
    }
    std::copy(rows[r].begin(), rows[r].end(), t.row_span(r).begin());
  }
  return t;
}

Tensor edge_tensor(const Graph& g) {
  const std::size_t width = g.edge_dim();
  Tensor t(g.edges.size(), width);
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    if (g.edges[k].attr.size() != width) throw ShapeError("edge " + std::to_string(k) + " width mismatch");
    std::copy(g.edges[k].attr.begin(), g.edges[k].attr.end(), t.row_span(k).begin());
  }
  return t;
}

AttrVector row_vector(const Tensor& t, std::size_t r) {
  const auto s = t.row_span(r);
  return AttrVector(s.begin(), s.end());
}

}  // namespace

std::shared_ptr<const Topology> make_topology(const Graph& g) { return build(g, {0}, {0}); }

std::shared_ptr<const Topology> make_topology(const BatchedGraph& bg) {
  return build(bg.merged, bg.node_offsets, bg.edge_offsets);
}

GraphVars to_vars(Tape& tape, const Graph& g, std::shared_ptr<const Topology> topo) {
  GraphVars gv;
  gv.topo = std::move(topo);
  gv.nodes = tape.constant(rows_to_tensor(g.nodes, g.node_dim()));
  gv.edges = tape.constant(edge_tensor(g));
  gv.globals = tape.constant(Tensor::row(g.global_attr));
  return gv;
}

GraphVars to_vars(Tape& tape, const Graph& g) { return to_vars(tape, g, make_topology(g)); }

GraphVars to_vars(Tape& tape, const BatchedGraph& bg) {
  GraphVars gv;
  gv.topo = make_topology(bg);
  gv.nodes = tape.constant(rows_to_tensor(bg.merged.nodes, bg.merged.node_dim()));
  gv.edges = tape.constant(edge_tensor(bg.merged));
  const std::size_t gdim = bg.globals.empty() ? 0 : bg.globals.front().size();
  gv.globals = tape.constant(rows_to_tensor(bg.globals, gdim));
  return gv;
}

Graph to_graph(const GraphVars& gv, const Graph& structure) {
  if (gv.topo->n_graphs != 1) throw ShapeError("to_graph: tensors hold a batch of graphs");
  const Tensor& nodes = gv.nodes.value();
  const Tensor& edges = gv.edges.value();
  if (nodes.rows() != structure.nodes.size() || edges.rows() != structure.edges.size()) {
    throw ShapeError("to_graph: tensor rows do not match the structure graph");
  }
  Graph out;
  out.global_attr = row_vector(gv.globals.value(), 0);
  out.nodes.reserve(nodes.rows());
  for (std::size_t i = 0; i < nodes.rows(); ++i) out.nodes.push_back(row_vector(nodes, i));
  out.edges.reserve(edges.rows());
  for (std::size_t k = 0; k < edges.rows(); ++k) {
    Edge e = structure.edges[k];
    e.attr = row_vector(edges, k);
    out.edges.push_back(std::move(e));
  }
  return out;
}

BatchedGraph to_batched(const GraphVars& gv, const BatchedGraph& structure) {
  if (gv.topo->n_graphs != structure.num_members()) throw ShapeError("to_batched: member count mismatch");
  BatchedGraph out;
  out.node_offsets = structure.node_offsets;
  out.edge_offsets = structure.edge_offsets;
  const Tensor& globals = gv.globals.value();
  for (std::size_t m = 0; m < globals.rows(); ++m) out.globals.push_back(row_vector(globals, m));

  const Tensor& nodes = gv.nodes.value();
  const Tensor& edges = gv.edges.value();
  if (nodes.rows() != structure.merged.nodes.size() || edges.rows() != structure.merged.edges.size()) {
    throw ShapeError("to_batched: tensor rows do not match the structure graph");
  }
  for (std::size_t i = 0; i < nodes.rows(); ++i) out.merged.nodes.push_back(row_vector(nodes, i));
  for (std::size_t k = 0; k < edges.rows(); ++k) {
    Edge e = structure.merged.edges[k];
    e.attr = row_vector(edges, k);
    out.merged.edges.push_back(std::move(e));
  }
  if (out.globals.size() == 1) out.merged.global_attr = out.globals.front();
  return out;
}

Var fit_width(Var x, std::size_t width) {
  if (x.rows() != 0 || x.cols() == width) return x;
  return x.tape->constant(Tensor(0, width));
}

}  // namespace gn
