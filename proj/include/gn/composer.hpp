#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gn/block.hpp"
#include "gn/variants.hpp"

namespace gn {

/// M processing steps. Shared cores hold one config applied M times;
/// unshared cores hold M configs, one per step.
struct CoreSpec {
  std::vector<GNConfig> configs;
  std::size_t steps = 1;
  bool shared = true;
};

enum class OutputFocus { Edges, Nodes, Globals, Mix };
std::string to_string(OutputFocus f);
OutputFocus output_focus_from_string(const std::string& s);

/// Encoder -> core^M -> decoder. A missing encoder or decoder is the
/// identity. With `skip`, every core step reads the concatenation of the
/// encoded graph and the previous latent graph.
struct EPDSpec {
  std::optional<GNConfig> encoder;
  CoreSpec core;
  std::optional<GNConfig> decoder;
  OutputFocus output_focus = OutputFocus::Mix;
  bool skip = false;
  /// Core input is the encoded input concatenated with a hidden graph whose
  /// widths are the core's output widths (recurrent_step).
  bool recurrent = false;
};

struct AttrWidths {
  std::size_t edge = 0, node = 0, global = 0;
  bool operator==(const AttrWidths&) const = default;
};

/// Throws ConfigError if M < 1 or an unshared core has the wrong number of configs.
void validate_core(const CoreSpec& core);

/// Attribute-wise concatenation of two graphs over the same structure
/// (skip connections and the recurrent merge).
GraphVars concat_vars(const GraphVars& a, const GraphVars& b);
Graph skip_connect(const Graph& a, const Graph& b);

/// Sequential composition of blocks as an unshared core.
CoreSpec compose_sequential(const std::vector<GNConfig>& blocks);

class Core {
 public:
  Core(CoreSpec spec, std::string prefix = "core/");
  void init(ParameterStore& ps, Rng& rng) const;
  const GNBlock& block(std::size_t step) const { return blocks_[spec_.shared ? 0 : step]; }
  std::size_t steps() const { return spec_.steps; }
  const CoreSpec& spec() const { return spec_; }

  GraphVars apply(const GraphVars& g, ParameterStore& ps) const;
  Graph apply(const Graph& g, ParameterStore& ps) const;

 private:
  CoreSpec spec_;
  std::vector<GNBlock> blocks_;
};

Graph run_core(const Graph& g, const CoreSpec& core, ParameterStore& ps, const std::string& prefix = "core/");

class Architecture {
 public:
  explicit Architecture(EPDSpec spec);

  const EPDSpec& spec() const { return spec_; }
  void init(ParameterStore& ps, Rng& rng) const;

  GraphVars encode(const GraphVars& in, ParameterStore& ps) const;
  GraphVars decode(const GraphVars& latent, ParameterStore& ps) const;

  /// Decoded output after every core step when `all_steps`, otherwise only
  /// after the last one.
  std::vector<GraphVars> forward(const GraphVars& in, ParameterStore& ps, bool all_steps = false) const;

  Graph apply(const Graph& g, ParameterStore& ps) const;
  BatchedGraph apply(const BatchedGraph& bg, ParameterStore& ps) const;

  /// One step of the recurrent form: merge the encoded input with the hidden
  /// graph, run the core, keep the result as the next hidden graph and decode
  /// a copy of it. Returns (output, next hidden).
  std::pair<GraphVars, GraphVars> recurrent_step(const GraphVars& in, const GraphVars& hidden,
                                                 ParameterStore& ps) const;
  std::pair<Graph, Graph> recurrent_step(const Graph& in, const Graph& hidden, ParameterStore& ps) const;

  /// Widths of the hidden graph of a recurrent model (the core's output).
  /// Zero for a dims-agnostic core.
  AttrWidths hidden_widths() const;

 private:
  EPDSpec spec_;
  std::optional<GNBlock> encoder_;
  Core core_;
  std::optional<GNBlock> decoder_;
};

/// Graph with the structure of `g` and all-zero attributes of the given widths.
Graph zero_hidden(const Graph& g, std::size_t edge_dim, std::size_t node_dim, std::size_t global_dim);

/// {encoder, core:{config, M, shared}, decoder, output_focus, skip}. `config`
/// is one block config, or an array of M configs for an unshared core.
Json architecture_to_json(const EPDSpec& spec);
EPDSpec architecture_from_json(const Json& j);
EPDSpec load_architecture(const std::string& path);

}  // namespace gn
