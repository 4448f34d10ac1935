#pragma once

// One graph network block: edge update, per-node edge aggregation, node
// update, global edge and node aggregation, global update, in that order.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gn/graph.hpp"
#include "gn/nn.hpp"
#include "gn/params.hpp"
#include "gn/random.hpp"
#include "gn/topology.hpp"

namespace gn {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// How an update function turns its inputs into an output.
enum class Form {
  Disabled,       // element passes through unchanged
  Identity,       // concatenation of the consumed inputs
  Mlp,            // NN([inputs])
  TypedMlp,       // NN_{t_k}([inputs]), one bank per edge type (edges only)
  SenderPlusMlp,  // v_s + NN(e_k) (edges only)
  Attention,      // (a'_k, b'_k) per head (edges only)
  Gru,            // GRU(x = [non-node inputs], h = v_i) (nodes only)
  CommNet,        // NN([ebar'_i, NN'(v_i)]) (nodes only)
  TwoStage,       // NN2(NN1([inputs])) (nodes only)
  S2V,            // shared NN over structure2vec messages (edges and nodes)
};

/// Pairwise score used by an attention edge update.
enum class AttentionKind {
  DotProduct,   // exp(q(v_r) . k(v_s))
  Euclidean,    // exp(-|emb(v_r) - emb(v_s)|^2)
  Learned,      // exp(score([emb(v_r), emb(v_s)]))
};

enum class Aggregator { Sum, Mean, Max, Attention };

/// Which inputs an update function reads. Edge updates use edge, receiver,
/// sender and global; node updates use edge_agg, node and global; the
/// global update uses edge_agg, node_agg and global.
struct PhiSignature {
  Form form = Form::Disabled;
  bool edge = false;
  bool receiver = false;
  bool sender = false;
  bool node = false;
  bool edge_agg = false;
  bool node_agg = false;
  bool global = false;

  bool enabled() const { return form != Form::Disabled; }
  bool operator==(const PhiSignature&) const = default;
};

struct BlockDims {
  std::size_t edge_in = 0;
  std::size_t node_in = 0;
  std::size_t global_in = 0;
  std::size_t edge_out = 0;
  std::size_t node_out = 0;
  std::size_t global_out = 0;

  bool operator==(const BlockDims&) const = default;
};

struct BlockHyper {
  std::vector<std::size_t> hidden = {16, 16};
  Activation activation = Activation::Relu;
  std::size_t heads = 1;
  std::size_t key_dim = 8;
  std::size_t head_dim = 8;
  std::size_t edge_types = 1;
  AttentionKind attention = AttentionKind::DotProduct;
  bool relative_positions = false;
  bool global_output = false;

  bool operator==(const BlockHyper&) const = default;
};

struct GNConfig {
  std::string preset = "custom";
  BlockDims dims;
  BlockHyper hyper;
  PhiSignature phi_e;
  PhiSignature phi_v;
  PhiSignature phi_u;
  Aggregator rho_ev = Aggregator::Sum;
  Aggregator rho_eu = Aggregator::Sum;
  Aggregator rho_vu = Aggregator::Sum;

  bool operator==(const GNConfig&) const = default;

  /// True when no update function has parameters or fixed widths, so the
  /// block accepts graphs of any attribute dims.
  bool dims_agnostic() const;
};

/// Attribute widths flowing through a block for given input widths.
struct FlowDims {
  std::size_t edge_in, node_in, global_in;
  std::size_t edge_out;  // width of E'
  std::size_t edge_agg;  // width of ebar'_i and ebar'
  std::size_t node_out;  // width of V'
  std::size_t global_out;
};
FlowDims flow_dims(const GNConfig& cfg, std::size_t edge_in, std::size_t node_in, std::size_t global_in);
inline FlowDims flow_dims(const GNConfig& cfg) {
  return flow_dims(cfg, cfg.dims.edge_in, cfg.dims.node_in, cfg.dims.global_in);
}

/// Throws ConfigError when forms, signatures and aggregators do not fit together.
void validate_config(const GNConfig& cfg);

/// Counters for instrumentation: update-function applications per element
/// and max-aggregations over empty sets.
struct BlockCounters {
  std::atomic<std::uint64_t> edge_updates{0};
  std::atomic<std::uint64_t> node_updates{0};
  std::atomic<std::uint64_t> global_updates{0};
  std::atomic<std::uint64_t> empty_max{0};

  void reset() {
    edge_updates = 0;
    node_updates = 0;
    global_updates = 0;
    empty_max = 0;
  }
};
BlockCounters& block_counters();

/// Per-edge outputs. For attention blocks `weights[h]` holds a'_k and
/// `values[h]` holds b'_k of head h; `edges` is [a'_1, b'_1, ..., a'_H, b'_H].
struct EdgeUpdate {
  Var edges;
  std::vector<Var> weights;
  std::vector<Var> values;
};

/// A configured block bound to a parameter-name prefix.
class GNBlock {
 public:
  GNBlock(GNConfig cfg, std::string prefix);

  const GNConfig& config() const { return cfg_; }
  const std::string& prefix() const { return prefix_; }

  /// Registers this block's parameters.
  void init(ParameterStore& ps, Rng& rng) const;

  // 1. e'_k = phi_e(e_k, v_rk, v_sk, u)
  EdgeUpdate edge_update_all(const GraphVars& g, ParameterStore& ps) const;
  // 2. ebar'_i = rho_ev(E'_i)
  Var aggregate_edges_per_node(const EdgeUpdate& e, const Topology& topo) const;
  // 3. v'_i = phi_v(ebar'_i, v_i, u)
  Var node_update_all(const GraphVars& g, Var edge_agg, ParameterStore& ps) const;
  // 4-5. ebar' = rho_eu(E'), vbar' = rho_vu(V')
  std::pair<Var, Var> aggregate_global(Var edges, Var nodes, const Topology& topo) const;
  // 6. u' = phi_u(ebar', vbar', u)
  Var global_update(Var edge_agg, Var node_agg, Var globals, ParameterStore& ps) const;

  GraphVars apply(const GraphVars& g, ParameterStore& ps) const;
  Graph apply(const Graph& g, ParameterStore& ps) const;
  BatchedGraph apply(const BatchedGraph& bg, ParameterStore& ps) const;

 private:
  std::string name(const std::string& part) const { return prefix_ + part; }
  MLPSpec mlp(std::size_t in, std::size_t out) const;

  GNConfig cfg_;
  std::string prefix_;
};

/// Free-function form of GNBlock::apply.
Graph apply_block(const Graph& g, const GNConfig& cfg, ParameterStore& ps, const std::string& prefix = "");

/// Aggregates rows of `x` into `seg.n_groups` groups; empty groups give zeros.
Var aggregate(Var x, Aggregator kind, const std::shared_ptr<const Grouping>& seg);

/// sum_k a_k b_k / sum_k a_k over each receiver's incoming edges (zero when
/// a node has none).
Var attention_aggregate(Var weights, Var values, const std::shared_ptr<const Grouping>& by_receiver);

/// structure2vec message input: for each edge k, the sum of e_l over edges
/// l with r_l == s_k and s_l != r_k.
Var s2v_aggregate(Var edges, const Topology& topo);

}  // namespace gn
