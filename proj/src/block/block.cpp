#include "gn/block.hpp"

#include <utility>

namespace gn {
namespace {

bool in(Form f, std::initializer_list<Form> allowed) {
  for (Form a : allowed)
    if (f == a) return true;
  return false;
}

Var concat_inputs(Tape& tape, std::size_t rows, const std::vector<Var>& parts) {
  if (parts.empty()) return tape.constant(Tensor(rows, 0));
  if (parts.size() == 1) return parts.front();
  return concat_cols(parts);
}

template <typename F>
auto step(const std::string& prefix, const char* label, F&& f) {
  try {
    return f();
  } catch (const ShapeError& e) {
    throw ShapeError(prefix + label + ": " + e.what());
  }
}

}  // namespace

BlockCounters& block_counters() {
  static BlockCounters counters;
  return counters;
}

bool GNConfig::dims_agnostic() const {
  auto free = [](const PhiSignature& p) { return p.form == Form::Disabled || p.form == Form::Identity; };
  return free(phi_e) && free(phi_v) && free(phi_u);
}

FlowDims flow_dims(const GNConfig& cfg, std::size_t ein, std::size_t vin, std::size_t gin) {
  FlowDims f{ein, vin, gin, 0, 0, 0, 0};
  const auto& h = cfg.hyper;
  const auto& pe = cfg.phi_e;
  switch (pe.form) {
    case Form::Disabled: f.edge_out = ein; break;
    case Form::Identity:
      f.edge_out = (pe.edge ? ein : 0) + (pe.receiver ? vin : 0) + (pe.sender ? vin : 0) + (pe.global ? gin : 0);
      break;
    case Form::SenderPlusMlp: f.edge_out = vin; break;
    case Form::Attention: f.edge_out = h.heads * (1 + h.head_dim); break;
    case Form::S2V: f.edge_out = ein; break;
    default: f.edge_out = cfg.dims.edge_out; break;
  }
  f.edge_agg = pe.form == Form::Attention ? h.heads * h.head_dim : f.edge_out;

  const auto& pv = cfg.phi_v;
  switch (pv.form) {
    case Form::Disabled: f.node_out = vin; break;
    case Form::Identity:
      f.node_out = (pv.edge_agg ? f.edge_agg : 0) + (pv.node ? vin : 0) + (pv.global ? gin : 0);
      break;
    case Form::Gru: f.node_out = vin; break;
    case Form::S2V: f.node_out = ein; break;
    default: f.node_out = cfg.dims.node_out; break;
  }

  const auto& pu = cfg.phi_u;
  switch (pu.form) {
    case Form::Disabled: f.global_out = gin; break;
    case Form::Identity:
      f.global_out = (pu.edge_agg ? f.edge_out : 0) + (pu.node_agg ? f.node_out : 0) + (pu.global ? gin : 0);
      break;
    default: f.global_out = cfg.dims.global_out; break;
  }
  return f;
}

void validate_config(const GNConfig& cfg) {
  const std::string where = "config '" + cfg.preset + "': ";
  auto fail = [&](const std::string& m) { throw ConfigError(where + m); };
  const auto& h = cfg.hyper;

  if (!in(cfg.phi_e.form, {Form::Disabled, Form::Identity, Form::Mlp, Form::TypedMlp, Form::SenderPlusMlp,
                           Form::Attention, Form::S2V})) {
    fail("form not valid for the edge update");
  }
  if (!in(cfg.phi_v.form, {Form::Disabled, Form::Identity, Form::Mlp, Form::Gru, Form::CommNet, Form::TwoStage,
                           Form::S2V})) {
    fail("form not valid for the node update");
  }
  if (!in(cfg.phi_u.form, {Form::Disabled, Form::Identity, Form::Mlp})) fail("form not valid for the global update");

  if ((cfg.phi_e.form == Form::Attention) != (cfg.rho_ev == Aggregator::Attention)) {
    fail("attention edge update and attention edge->node aggregation go together");
  }
  if (cfg.rho_eu == Aggregator::Attention || cfg.rho_vu == Aggregator::Attention) {
    fail("attention aggregation is only defined for edge->node");
  }
  if ((cfg.phi_e.form == Form::S2V) != (cfg.phi_v.form == Form::S2V)) {
    fail("structure2vec edge and node updates share one network and go together");
  }
  if (cfg.phi_v.form == Form::Gru && !cfg.phi_v.node) fail("GRU node update needs the node attribute as state");
  if (cfg.phi_v.form == Form::CommNet && !(cfg.phi_v.edge_agg && cfg.phi_v.node)) {
    fail("CommNet node update reads the edge aggregate and the node attribute");
  }
  for (std::size_t w : h.hidden)
    if (w == 0) fail("hidden widths must be positive");
  if (h.edge_types == 0) fail("edge_types must be positive");
  if (cfg.phi_e.form == Form::Attention) {
    if (h.heads == 0 || h.head_dim == 0 || h.key_dim == 0) fail("attention needs positive heads, head_dim, key_dim");
    if (h.relative_positions && cfg.dims.edge_in != h.head_dim) {
      fail("relative position encodings need edge_in == head_dim");
    }
  }
  if (cfg.phi_e.form == Form::S2V && cfg.dims.edge_in == 0) fail("structure2vec needs edge_in > 0");
  if (in(cfg.phi_e.form, {Form::Mlp, Form::TypedMlp}) && cfg.dims.edge_out == 0) fail("edge_out must be positive");
  if (in(cfg.phi_v.form, {Form::Mlp, Form::CommNet, Form::TwoStage}) && cfg.dims.node_out == 0) {
    fail("node_out must be positive");
  }
  if (cfg.phi_v.form == Form::Gru && cfg.dims.node_in == 0) fail("GRU node update needs node_in > 0");
  if (cfg.phi_u.form == Form::Mlp && cfg.dims.global_out == 0) fail("global_out must be positive");
}

GNBlock::GNBlock(GNConfig cfg, std::string prefix) : cfg_(std::move(cfg)), prefix_(std::move(prefix)) {
  validate_config(cfg_);
}

MLPSpec GNBlock::mlp(std::size_t in_dim, std::size_t out_dim) const {
  MLPSpec s;
  s.input = in_dim;
  s.widths = cfg_.hyper.hidden;
  s.widths.push_back(out_dim);
  s.hidden = cfg_.hyper.activation;
  s.output = Activation::Identity;
  return s;
}

void GNBlock::init(ParameterStore& ps, Rng& rng) const {
  const auto& d = cfg_.dims;
  const auto& h = cfg_.hyper;
  const FlowDims f = flow_dims(cfg_);
  const auto& pe = cfg_.phi_e;
  const std::size_t e_in = (pe.edge ? d.edge_in : 0) + (pe.receiver ? d.node_in : 0) + (pe.sender ? d.node_in : 0) +
                           (pe.global ? d.global_in : 0);

  switch (pe.form) {
    case Form::Mlp: mlp_init(mlp(e_in, d.edge_out), ps, name("edge/mlp"), rng); break;
    case Form::TypedMlp:
      for (std::size_t t = 0; t < h.edge_types; ++t) {
        mlp_init(mlp(e_in, d.edge_out), ps, name("edge/type" + std::to_string(t)), rng);
      }
      break;
    case Form::SenderPlusMlp: mlp_init(mlp(d.edge_in, d.node_in), ps, name("edge/mlp"), rng); break;
    case Form::Attention:
      for (std::size_t hd = 0; hd < h.heads; ++hd) {
        const std::string head = "/h" + std::to_string(hd);
        switch (h.attention) {
          case AttentionKind::DotProduct:
            mlp_init(mlp(d.node_in, h.key_dim), ps, name("edge/query" + head), rng);
            mlp_init(mlp(d.node_in, h.key_dim), ps, name("edge/key" + head), rng);
            break;
          case AttentionKind::Euclidean:
            mlp_init(mlp(d.node_in, h.key_dim), ps, name("edge/embed" + head), rng);
            break;
          case AttentionKind::Learned:
            mlp_init(mlp(d.node_in, h.key_dim), ps, name("edge/embed" + head), rng);
            mlp_init(mlp(2 * h.key_dim, 1), ps, name("edge/score" + head), rng);
            break;
        }
        mlp_init(mlp(d.node_in, h.head_dim), ps, name("edge/value" + head), rng);
      }
      break;
    case Form::S2V: mlp_init(mlp(d.edge_in, d.edge_in), ps, name("s2v"), rng); break;
    default: break;
  }

  const auto& pv = cfg_.phi_v;
  const std::size_t v_in = (pv.edge_agg ? f.edge_agg : 0) + (pv.node ? d.node_in : 0) + (pv.global ? d.global_in : 0);
  switch (pv.form) {
    case Form::Mlp: mlp_init(mlp(v_in, d.node_out), ps, name("node/mlp"), rng); break;
    case Form::Gru:
      gru_init(GRUSpec{v_in - d.node_in, d.node_in}, ps, name("node/gru"), rng);
      break;
    case Form::CommNet:
      mlp_init(mlp(d.node_in, d.node_out), ps, name("node/pre"), rng);
      mlp_init(mlp(v_in - d.node_in + d.node_out, d.node_out), ps, name("node/mlp"), rng);
      break;
    case Form::TwoStage:
      mlp_init(mlp(v_in, d.node_out), ps, name("node/stage1"), rng);
      mlp_init(mlp(d.node_out, d.node_out), ps, name("node/stage2"), rng);
      break;
    default: break;
  }

  const auto& pu = cfg_.phi_u;
  if (pu.form == Form::Mlp) {
    const std::size_t u_in = (pu.edge_agg ? f.edge_out : 0) + (pu.node_agg ? f.node_out : 0) + (pu.global ? d.global_in : 0);
    mlp_init(mlp(u_in, d.global_out), ps, name("global/mlp"), rng);
  }
}

EdgeUpdate GNBlock::edge_update_all(const GraphVars& g, ParameterStore& ps) const {
  const Topology& topo = *g.topo;
  const auto& pe = cfg_.phi_e;
  const auto& h = cfg_.hyper;
  Tape& tape = *g.nodes.tape;
  EdgeUpdate out;

  if (pe.form == Form::Disabled) {
    out.edges = g.edges;
    return out;
  }
  block_counters().edge_updates += topo.n_edges;

  auto gather_inputs = [&]() {
    std::vector<Var> parts;
    if (pe.edge) parts.push_back(g.edges);
    if (pe.receiver) parts.push_back(gather_rows(g.nodes, topo.by_receiver));
    if (pe.sender) parts.push_back(gather_rows(g.nodes, topo.by_sender));
    if (pe.global) parts.push_back(gather_rows(g.globals, topo.edge_graph));
    return concat_inputs(tape, topo.n_edges, parts);
  };

  switch (pe.form) {
    case Form::Identity: out.edges = gather_inputs(); break;

    case Form::Mlp: {
      Var x = gather_inputs();
      out.edges = mlp_apply(mlp(x.cols(), cfg_.dims.edge_out), ps, name("edge/mlp"), x);
      break;
    }

    case Form::TypedMlp: {
      Var x = gather_inputs();
      std::vector<std::vector<int>> rows(h.edge_types);
      for (std::size_t k = 0; k < topo.n_edges; ++k) {
        const int t = topo.types[k];
        if (t < 0 || static_cast<std::size_t>(t) >= h.edge_types) {
          throw ShapeError("edge " + std::to_string(k) + " has type " + std::to_string(t) + " but only " +
                           std::to_string(h.edge_types) + " parameter banks exist");
        }
        rows[static_cast<std::size_t>(t)].push_back(static_cast<int>(k));
      }
      std::vector<Var> parts;
      std::vector<std::vector<int>> dest;
      for (std::size_t t = 0; t < h.edge_types; ++t) {
        if (rows[t].empty()) continue;
        Var xt = gather_rows(x, make_grouping(rows[t], topo.n_edges));
        parts.push_back(mlp_apply(mlp(x.cols(), cfg_.dims.edge_out), ps, name("edge/type" + std::to_string(t)), xt));
        dest.push_back(rows[t]);
      }
      out.edges = parts.empty() ? tape.constant(Tensor(0, cfg_.dims.edge_out))
                                : assemble_rows(parts, dest, topo.n_edges, cfg_.dims.edge_out);
      break;
    }

    case Form::SenderPlusMlp: {
      Var f = mlp_apply(mlp(cfg_.dims.edge_in, cfg_.dims.node_in), ps, name("edge/mlp"), g.edges);
      out.edges = add(gather_rows(g.nodes, topo.by_sender), f);
      break;
    }

    case Form::Attention: {
      std::vector<Var> pieces;
      for (std::size_t hd = 0; hd < h.heads; ++hd) {
        const std::string head = "/h" + std::to_string(hd);
        Var logit;
        switch (h.attention) {
          case AttentionKind::DotProduct: {
            Var q = mlp_apply(mlp(cfg_.dims.node_in, h.key_dim), ps, name("edge/query" + head), g.nodes);
            Var k = mlp_apply(mlp(cfg_.dims.node_in, h.key_dim), ps, name("edge/key" + head), g.nodes);
            logit = row_dot(gather_rows(q, topo.by_receiver), gather_rows(k, topo.by_sender));
            break;
          }
          case AttentionKind::Euclidean: {
            Var emb = mlp_apply(mlp(cfg_.dims.node_in, h.key_dim), ps, name("edge/embed" + head), g.nodes);
            Var diff = sub(gather_rows(emb, topo.by_receiver), gather_rows(emb, topo.by_sender));
            logit = affine(row_sqnorm(diff), -1.0, 0.0);
            break;
          }
          case AttentionKind::Learned: {
            Var emb = mlp_apply(mlp(cfg_.dims.node_in, h.key_dim), ps, name("edge/embed" + head), g.nodes);
            Var pair = concat_cols({gather_rows(emb, topo.by_receiver), gather_rows(emb, topo.by_sender)});
            logit = mlp_apply(mlp(2 * h.key_dim, 1), ps, name("edge/score" + head), pair);
            break;
          }
        }
        // Logits are clamped so exp stays finite.
        Var a = exp(clamp(logit, -30.0, 30.0));
        Var b = gather_rows(mlp_apply(mlp(cfg_.dims.node_in, h.head_dim), ps, name("edge/value" + head), g.nodes),
                            topo.by_sender);
        if (h.relative_positions) b = add(b, g.edges);
        out.weights.push_back(a);
        out.values.push_back(b);
        pieces.push_back(a);
        pieces.push_back(b);
      }
      out.edges = concat_cols(pieces);
      break;
    }

    case Form::S2V: {
      Var msg = s2v_aggregate(g.edges, topo);
      out.edges = mlp_apply(mlp(cfg_.dims.edge_in, cfg_.dims.edge_in), ps, name("s2v"), msg);
      break;
    }

    default: throw ConfigError("unsupported edge update form");
  }
  return out;
}

Var aggregate(Var x, Aggregator kind, const std::shared_ptr<const Grouping>& seg) {
  switch (kind) {
    case Aggregator::Sum: return segment_sum(x, seg);
    case Aggregator::Mean: return segment_mean(x, seg);
    case Aggregator::Max: {
      std::size_t empty = 0;
      Var out = segment_max(x, seg, &empty);
      block_counters().empty_max += empty;
      return out;
    }
    case Aggregator::Attention: break;
  }
  throw ConfigError("attention aggregation needs per-edge weights");
}

Var attention_aggregate(Var weights, Var values, const std::shared_ptr<const Grouping>& by_receiver) {
  // Normalising each weight first makes a lone incoming edge contribute b'_k exactly.
  Var den = gather_rows(segment_sum(weights, by_receiver), by_receiver);
  return segment_sum(mul_col(values, div_col(weights, den)), by_receiver);
}

Var s2v_aggregate(Var edges, const Topology& topo) {
  return segment_sum(gather_rows(edges, topo.s2v_pairs.source), topo.s2v_pairs.target);
}

Var GNBlock::aggregate_edges_per_node(const EdgeUpdate& e, const Topology& topo) const {
  if (cfg_.rho_ev != Aggregator::Attention) return aggregate(e.edges, cfg_.rho_ev, topo.by_receiver);
  std::vector<Var> heads;
  for (std::size_t h = 0; h < e.weights.size(); ++h) {
    heads.push_back(attention_aggregate(e.weights[h], e.values[h], topo.by_receiver));
  }
  return heads.size() == 1 ? heads.front() : concat_cols(heads);
}

Var GNBlock::node_update_all(const GraphVars& g, Var edge_agg, ParameterStore& ps) const {
  const auto& pv = cfg_.phi_v;
  if (pv.form == Form::Disabled) return g.nodes;
  const Topology& topo = *g.topo;
  Tape& tape = *g.nodes.tape;
  block_counters().node_updates += topo.n_nodes;

  std::vector<Var> parts;
  if (pv.edge_agg) parts.push_back(edge_agg);
  if (pv.node) parts.push_back(g.nodes);
  if (pv.global) parts.push_back(gather_rows(g.globals, topo.node_graph));
  const auto& d = cfg_.dims;

  switch (pv.form) {
    case Form::Identity: return concat_inputs(tape, topo.n_nodes, parts);
    case Form::Mlp: {
      Var x = concat_inputs(tape, topo.n_nodes, parts);
      return mlp_apply(mlp(x.cols(), d.node_out), ps, name("node/mlp"), x);
    }
    case Form::Gru: {
      std::vector<Var> xs;
      if (pv.edge_agg) xs.push_back(edge_agg);
      if (pv.global) xs.push_back(gather_rows(g.globals, topo.node_graph));
      Var x = concat_inputs(tape, topo.n_nodes, xs);
      return gru_apply(GRUSpec{x.cols(), d.node_in}, ps, name("node/gru"), x, g.nodes);
    }
    case Form::CommNet: {
      Var pre = mlp_apply(mlp(d.node_in, d.node_out), ps, name("node/pre"), g.nodes);
      std::vector<Var> xs{edge_agg, pre};
      if (pv.global) xs.push_back(gather_rows(g.globals, topo.node_graph));
      Var x = concat_cols(xs);
      return mlp_apply(mlp(x.cols(), d.node_out), ps, name("node/mlp"), x);
    }
    case Form::TwoStage: {
      Var x = concat_inputs(tape, topo.n_nodes, parts);
      Var hidden = mlp_apply(mlp(x.cols(), d.node_out), ps, name("node/stage1"), x);
      return mlp_apply(mlp(d.node_out, d.node_out), ps, name("node/stage2"), hidden);
    }
    case Form::S2V: return mlp_apply(mlp(d.edge_in, d.edge_in), ps, name("s2v"), edge_agg);
    default: break;
  }
  throw ConfigError("unsupported node update form");
}

std::pair<Var, Var> GNBlock::aggregate_global(Var edges, Var nodes, const Topology& topo) const {
  return {aggregate(edges, cfg_.rho_eu, topo.edge_graph), aggregate(nodes, cfg_.rho_vu, topo.node_graph)};
}

Var GNBlock::global_update(Var edge_agg, Var node_agg, Var globals, ParameterStore& ps) const {
  const auto& pu = cfg_.phi_u;
  if (pu.form == Form::Disabled) return globals;
  block_counters().global_updates += globals.rows();
  std::vector<Var> parts;
  if (pu.edge_agg) parts.push_back(edge_agg);
  if (pu.node_agg) parts.push_back(node_agg);
  if (pu.global) parts.push_back(globals);
  Var x = concat_inputs(*globals.tape, globals.rows(), parts);
  if (pu.form == Form::Identity) return x;
  return mlp_apply(mlp(x.cols(), cfg_.dims.global_out), ps, name("global/mlp"), x);
}

GraphVars GNBlock::apply(const GraphVars& in, ParameterStore& ps) const {
  GraphVars g = in;
  if (!cfg_.dims_agnostic()) {
    g.edges = fit_width(g.edges, cfg_.dims.edge_in);
    g.nodes = fit_width(g.nodes, cfg_.dims.node_in);
    g.globals = fit_width(g.globals, cfg_.dims.global_in);
  }
  const Topology& topo = *g.topo;

  EdgeUpdate e = step(prefix_, "step 1 (edge update)", [&] { return edge_update_all(g, ps); });

  Var nodes = g.nodes;
  if (cfg_.phi_v.enabled()) {
    Var agg;
    if (cfg_.phi_v.edge_agg || cfg_.phi_v.form == Form::S2V) {
      agg = step(prefix_, "step 2 (edge aggregation per node)", [&] { return aggregate_edges_per_node(e, topo); });
    }
    nodes = step(prefix_, "step 3 (node update)", [&] { return node_update_all(g, agg, ps); });
  }

  Var globals = g.globals;
  if (cfg_.phi_u.enabled()) {
    Var eagg, vagg;
    if (cfg_.phi_u.edge_agg) {
      eagg = step(prefix_, "step 4 (global edge aggregation)",
                  [&] { return aggregate(e.edges, cfg_.rho_eu, topo.edge_graph); });
    }
    if (cfg_.phi_u.node_agg) {
      vagg = step(prefix_, "step 5 (global node aggregation)",
                  [&] { return aggregate(nodes, cfg_.rho_vu, topo.node_graph); });
    }
    globals = step(prefix_, "step 6 (global update)", [&] { return global_update(eagg, vagg, g.globals, ps); });
  }

  return GraphVars{e.edges, nodes, globals, g.topo};
}

Graph GNBlock::apply(const Graph& g, ParameterStore& ps) const {
  Tape tape;
  return to_graph(apply(to_vars(tape, g), ps), g);
}

BatchedGraph GNBlock::apply(const BatchedGraph& bg, ParameterStore& ps) const {
  Tape tape;
  return to_batched(apply(to_vars(tape, bg), ps), bg);
}

Graph apply_block(const Graph& g, const GNConfig& cfg, ParameterStore& ps, const std::string& prefix) {
  return GNBlock(cfg, prefix).apply(g, ps);
}

}  // namespace gn
