#include "gn/variants.hpp"

#include <algorithm>

namespace gn {
namespace {

PhiSignature sig(Form form, std::initializer_list<const char*> inputs) {
  PhiSignature s;
  s.form = form;
  for (std::string in : inputs) {
    if (in == "edge") s.edge = true;
    else if (in == "receiver") s.receiver = true;
    else if (in == "sender") s.sender = true;
    else if (in == "node") s.node = true;
    else if (in == "edge_agg") s.edge_agg = true;
    else if (in == "node_agg") s.node_agg = true;
    else if (in == "global") s.global = true;
  }
  return s;
}

void attention(GNConfig& c, AttentionKind kind, bool multi) {
  c.phi_e = sig(Form::Attention, {"receiver", "sender"});
  c.rho_ev = Aggregator::Attention;
  c.hyper.attention = kind;
  if (!multi) c.hyper.heads = 1;
  else if (c.hyper.heads < 2) c.hyper.heads = 2;
}

}  // namespace

const std::vector<std::string>& variant_names() {
  static const std::vector<std::string> names = {
      "full_gn",         "interaction_network", "mpnn",          "nlnn_single",      "nlnn_multi",
      "vertex_attention", "graph_attention",    "relative_attention", "relation_network", "deep_set",
      "pointnet_style",  "ggsnn",               "commnet",       "struct2vec",       "independent"};
  return names;
}

GNConfig make_variant(const std::string& name, const BlockDims& dims, const BlockHyper& hyper) {
  GNConfig c;
  c.preset = name;
  c.dims = dims;
  c.hyper = hyper;

  if (name == "full_gn") {
    c.phi_e = sig(Form::Mlp, {"edge", "receiver", "sender", "global"});
    c.phi_v = sig(Form::Mlp, {"edge_agg", "node", "global"});
    c.phi_u = sig(Form::Mlp, {"edge_agg", "node_agg", "global"});
  } else if (name == "interaction_network") {
    c.phi_e = sig(Form::Mlp, {"edge", "receiver", "sender"});
    c.phi_v = sig(Form::Mlp, {"edge_agg", "node", "global"});
    if (hyper.global_output) c.phi_u = sig(Form::Mlp, {"node_agg", "global"});
  } else if (name == "mpnn") {
    c.phi_e = sig(Form::Mlp, {"edge", "receiver", "sender"});
    c.phi_v = sig(Form::Mlp, {"edge_agg", "node"});
    c.phi_u = sig(Form::Mlp, {"node_agg"});
  } else if (name == "nlnn_single" || name == "nlnn_multi") {
    attention(c, AttentionKind::DotProduct, name == "nlnn_multi");
    c.phi_v = sig(Form::Mlp, {"edge_agg"});
  } else if (name == "vertex_attention") {
    attention(c, AttentionKind::Euclidean, false);
    c.phi_v = sig(Form::Mlp, {"edge_agg", "node"});
  } else if (name == "graph_attention") {
    attention(c, AttentionKind::Learned, true);
    c.phi_v = sig(Form::Mlp, {"edge_agg"});
  } else if (name == "relative_attention") {
    attention(c, AttentionKind::DotProduct, true);
    c.phi_e.edge = true;
    c.hyper.relative_positions = true;
    // b'_k = NN(v_s) + e_k only type-checks when the value width is the edge width.
    c.hyper.head_dim = dims.edge_in;
    c.phi_v = sig(Form::Mlp, {"edge_agg"});
  } else if (name == "relation_network") {
    c.phi_e = sig(Form::Mlp, {"receiver", "sender"});
    c.phi_u = sig(Form::Mlp, {"edge_agg"});
  } else if (name == "deep_set") {
    c.phi_v = sig(Form::Mlp, {"node", "global"});
    c.phi_u = sig(Form::Mlp, {"node_agg"});
  } else if (name == "pointnet_style") {
    c.phi_v = sig(Form::TwoStage, {"node", "global"});
    c.phi_u = sig(Form::Mlp, {"node_agg"});
    c.rho_vu = Aggregator::Max;
  } else if (name == "ggsnn") {
    c.phi_e = sig(Form::TypedMlp, {"sender"});
    c.phi_v = sig(Form::Gru, {"edge_agg", "node"});
  } else if (name == "commnet") {
    c.phi_e = sig(Form::Mlp, {"sender"});
    c.phi_v = sig(Form::CommNet, {"edge_agg", "node"});
    c.rho_ev = Aggregator::Mean;
  } else if (name == "struct2vec") {
    c.phi_e = sig(Form::S2V, {"edge"});
    c.phi_v = sig(Form::S2V, {"edge_agg"});
  } else if (name == "independent") {
    // Each element is mapped on its own; used for encoders and decoders.
    if (dims.edge_out > 0) c.phi_e = sig(Form::Mlp, {"edge"});
    if (dims.node_out > 0) c.phi_v = sig(Form::Mlp, {"node"});
    if (dims.global_out > 0) c.phi_u = sig(Form::Mlp, {"global"});
  } else {
    std::string valid;
    for (const auto& n : variant_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "'; valid presets: " + valid);
  }
  validate_config(c);
  return c;
}

Graph add_master_node(const Graph& g, const AttrVector& node_attr, const AttrVector& edge_attr) {
  Graph out = g;
  const int master = static_cast<int>(g.nodes.size());
  out.nodes.push_back(node_attr);
  for (int i = 0; i < master; ++i) {
    out.edges.push_back(Edge{edge_attr, i, master, 0});
    out.edges.push_back(Edge{edge_attr, master, i, 0});
  }
  return out;
}

}  // namespace gn
