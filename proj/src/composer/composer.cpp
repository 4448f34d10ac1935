#include "gn/composer.hpp"

#include <fstream>
#include <sstream>

namespace gn {
namespace {

using Widths = AttrWidths;

bool consumes_edges(const GNConfig& c) {
  return c.phi_e.edge || c.phi_e.form == Form::SenderPlusMlp || c.phi_e.form == Form::S2V;
}

bool consumes_nodes(const GNConfig& c) {
  return c.phi_e.receiver || c.phi_e.sender || c.phi_e.form == Form::Attention ||
         c.phi_e.form == Form::SenderPlusMlp || c.phi_v.node || c.phi_v.form == Form::Gru;
}

bool consumes_globals(const GNConfig& c) { return c.phi_e.global || c.phi_v.global || c.phi_u.global; }

void check_inputs(const GNConfig& c, const Widths& w, const std::string& where) {
  if (c.dims_agnostic()) return;
  auto check = [&](bool used, std::size_t got, std::size_t want, const char* what) {
    if (used && got != want) {
      throw ConfigError("dim chain mismatch at " + where + ": " + what + " width " + std::to_string(got) +
                        " but the block expects " + std::to_string(want));
    }
  };
  check(consumes_edges(c), w.edge, c.dims.edge_in, "edge");
  check(consumes_nodes(c), w.node, c.dims.node_in, "node");
  check(consumes_globals(c), w.global, c.dims.global_in, "global");
}

Widths flow(const GNConfig& c, const Widths& w) {
  const FlowDims f = flow_dims(c, w.edge, w.node, w.global);
  return {f.edge_out, f.node_out, f.global_out};
}

GNConfig focus_decoder(GNConfig c, OutputFocus focus) {
  if (focus == OutputFocus::Mix) return c;
  if (focus != OutputFocus::Edges) c.phi_e = PhiSignature{};
  if (focus != OutputFocus::Nodes) c.phi_v = PhiSignature{};
  if (focus != OutputFocus::Globals) c.phi_u = PhiSignature{};
  if (c.rho_ev == Aggregator::Attention && c.phi_e.form != Form::Attention) c.rho_ev = Aggregator::Sum;
  return c;
}

std::vector<GNBlock> make_blocks(const CoreSpec& spec, const std::string& prefix) {
  validate_core(spec);
  std::vector<GNBlock> blocks;
  if (spec.shared) {
    blocks.emplace_back(spec.configs.front(), prefix);
  } else {
    for (std::size_t m = 0; m < spec.steps; ++m) blocks.emplace_back(spec.configs[m], prefix + std::to_string(m) + "/");
  }
  return blocks;
}

}  // namespace

std::string to_string(OutputFocus f) {
  switch (f) {
    case OutputFocus::Edges: return "edges";
    case OutputFocus::Nodes: return "nodes";
    case OutputFocus::Globals: return "globals";
    case OutputFocus::Mix: return "mix";
  }
  return "mix";
}

OutputFocus output_focus_from_string(const std::string& s) {
  if (s == "edges") return OutputFocus::Edges;
  if (s == "nodes") return OutputFocus::Nodes;
  if (s == "globals") return OutputFocus::Globals;
  if (s == "mix") return OutputFocus::Mix;
  throw ConfigError("unknown output focus '" + s + "' (edges, nodes, globals, mix)");
}

void validate_core(const CoreSpec& core) {
  if (core.steps < 1) throw ConfigError("core needs M >= 1 processing steps");
  if (core.configs.empty()) throw ConfigError("core has no block config");
  if (core.shared && core.configs.size() != 1) throw ConfigError("shared core takes exactly one block config");
  if (!core.shared && core.configs.size() != core.steps) {
    throw ConfigError("unshared core with M=" + std::to_string(core.steps) + " needs " + std::to_string(core.steps) +
                      " configs, got " + std::to_string(core.configs.size()));
  }
}

GraphVars concat_vars(const GraphVars& a, const GraphVars& b) {
  const Topology& ta = *a.topo;
  const Topology& tb = *b.topo;
  if (a.topo != b.topo &&
      (ta.n_nodes != tb.n_nodes || ta.n_graphs != tb.n_graphs || ta.senders() != tb.senders() ||
       ta.receivers() != tb.receivers() || ta.types != tb.types)) {
    throw IncompatibleStructure("concatenated graphs must have the same structure");
  }
  return GraphVars{concat_cols({a.edges, b.edges}), concat_cols({a.nodes, b.nodes}),
                   concat_cols({a.globals, b.globals}), a.topo};
}

Graph skip_connect(const Graph& a, const Graph& b) { return concat_attributes(a, b); }

CoreSpec compose_sequential(const std::vector<GNConfig>& blocks) {
  return CoreSpec{blocks, blocks.size(), false};
}

Core::Core(CoreSpec spec, std::string prefix) : spec_(std::move(spec)), blocks_(make_blocks(spec_, prefix)) {}

void Core::init(ParameterStore& ps, Rng& rng) const {
  for (const GNBlock& b : blocks_) b.init(ps, rng);
}

GraphVars Core::apply(const GraphVars& g, ParameterStore& ps) const {
  GraphVars cur = g;
  for (std::size_t m = 0; m < spec_.steps; ++m) cur = block(m).apply(cur, ps);
  return cur;
}

Graph Core::apply(const Graph& g, ParameterStore& ps) const {
  Tape tape;
  return to_graph(apply(to_vars(tape, g), ps), g);
}

Graph run_core(const Graph& g, const CoreSpec& core, ParameterStore& ps, const std::string& prefix) {
  return Core(core, prefix).apply(g, ps);
}

Architecture::Architecture(EPDSpec spec) : spec_(std::move(spec)), core_(spec_.core, "core/") {
  if (spec_.encoder) encoder_.emplace(*spec_.encoder, "encoder/");
  if (spec_.decoder) decoder_.emplace(focus_decoder(*spec_.decoder, spec_.output_focus), "decoder/");

  // Static dim chain check, possible whenever the first stage fixes its input widths.
  const GNConfig& first = spec_.encoder ? *spec_.encoder : spec_.core.configs.front();
  if (first.dims_agnostic()) return;
  Widths w{first.dims.edge_in, first.dims.node_in, first.dims.global_in};
  if (spec_.encoder) w = flow(*spec_.encoder, w);
  const Widths encoded = w;
  if (spec_.recurrent) {
    const Widths h = hidden_widths();
    w = {encoded.edge + h.edge, encoded.node + h.node, encoded.global + h.global};
  }
  for (std::size_t m = 0; m < core_.steps(); ++m) {
    const GNConfig& c = core_.block(m).config();
    Widths in = w;
    if (spec_.skip) in = {encoded.edge + w.edge, encoded.node + w.node, encoded.global + w.global};
    check_inputs(c, in, "core step " + std::to_string(m + 1));
    w = flow(c, in);
  }
  if (decoder_) check_inputs(decoder_->config(), w, "decoder");
}

AttrWidths Architecture::hidden_widths() const {
  const GNConfig& last = core_.block(core_.steps() - 1).config();
  if (last.dims_agnostic()) return {};
  return flow(last, {last.dims.edge_in, last.dims.node_in, last.dims.global_in});
}

void Architecture::init(ParameterStore& ps, Rng& rng) const {
  if (encoder_) encoder_->init(ps, rng);
  core_.init(ps, rng);
  if (decoder_) decoder_->init(ps, rng);
}

GraphVars Architecture::encode(const GraphVars& in, ParameterStore& ps) const {
  if (!encoder_) return in;
  return encoder_->apply(in, ps);
}

GraphVars Architecture::decode(const GraphVars& latent, ParameterStore& ps) const {
  if (!decoder_) return latent;
  return decoder_->apply(latent, ps);
}

std::vector<GraphVars> Architecture::forward(const GraphVars& in, ParameterStore& ps, bool all_steps) const {
  std::vector<GraphVars> outputs;
  const GraphVars encoded = encode(in, ps);
  GraphVars latent = encoded;
  for (std::size_t m = 0; m < core_.steps(); ++m) {
    GraphVars core_in = spec_.skip ? concat_vars(encoded, latent) : latent;
    latent = core_.block(m).apply(core_in, ps);
    if (all_steps || m + 1 == core_.steps()) outputs.push_back(decode(latent, ps));
  }
  return outputs;
}

Graph Architecture::apply(const Graph& g, ParameterStore& ps) const {
  Tape tape;
  return to_graph(forward(to_vars(tape, g), ps).back(), g);
}

BatchedGraph Architecture::apply(const BatchedGraph& bg, ParameterStore& ps) const {
  Tape tape;
  return to_batched(forward(to_vars(tape, bg), ps).back(), bg);
}

std::pair<GraphVars, GraphVars> Architecture::recurrent_step(const GraphVars& in, const GraphVars& hidden,
                                                             ParameterStore& ps) const {
  GraphVars merged = concat_vars(encode(in, ps), hidden);
  GraphVars next = core_.apply(merged, ps);
  // The decoder reads a copy; the hidden graph itself is never modified.
  GraphVars out = decode(next, ps);
  return {out, next};
}

std::pair<Graph, Graph> Architecture::recurrent_step(const Graph& in, const Graph& hidden, ParameterStore& ps) const {
  if (!same_structure(in, hidden)) {
    throw IncompatibleStructure("recurrent step: input and hidden graphs must have the same structure");
  }
  Tape tape;
  auto topo = make_topology(in);
  auto [out, next] = recurrent_step(to_vars(tape, in, topo), to_vars(tape, hidden, topo), ps);
  return {to_graph(out, in), to_graph(next, in)};
}

Graph zero_hidden(const Graph& g, std::size_t edge_dim, std::size_t node_dim, std::size_t global_dim) {
  Graph h = g;
  h.global_attr.assign(global_dim, 0.0);
  for (auto& v : h.nodes) v.assign(node_dim, 0.0);
  for (auto& e : h.edges) e.attr.assign(edge_dim, 0.0);
  return h;
}

Json architecture_to_json(const EPDSpec& spec) {
  Json j;
  j["encoder"] = spec.encoder ? config_to_json(*spec.encoder) : Json(nullptr);
  Json core;
  if (spec.core.shared) {
    core["config"] = config_to_json(spec.core.configs.front());
  } else {
    core["config"] = Json::array();
    for (const auto& c : spec.core.configs) core["config"].push_back(config_to_json(c));
  }
  core["M"] = spec.core.steps;
  core["shared"] = spec.core.shared;
  j["core"] = core;
  j["decoder"] = spec.decoder ? config_to_json(*spec.decoder) : Json(nullptr);
  j["output_focus"] = to_string(spec.output_focus);
  j["skip"] = spec.skip;
  j["recurrent"] = spec.recurrent;
  return j;
}

EPDSpec architecture_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("architecture must be a JSON object");
  if (!j.contains("core")) throw ConfigError("architecture: missing \"core\"");
  EPDSpec spec;
  try {
    if (j.contains("encoder") && !j["encoder"].is_null()) spec.encoder = config_from_json(j["encoder"]);
    if (j.contains("decoder") && !j["decoder"].is_null()) spec.decoder = config_from_json(j["decoder"]);
    const Json& core = j["core"];
    if (!core.contains("config")) throw ConfigError("architecture: core needs \"config\"");
    spec.core.steps = core.value("M", std::size_t{1});
    spec.core.shared = core.value("shared", true);
    if (core["config"].is_array()) {
      for (const auto& c : core["config"]) spec.core.configs.push_back(config_from_json(c));
    } else {
      spec.core.configs.push_back(config_from_json(core["config"]));
    }
    spec.output_focus = output_focus_from_string(j.value("output_focus", std::string("mix")));
    spec.skip = j.value("skip", false);
    spec.recurrent = j.value("recurrent", false);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("architecture: ") + e.what());
  }
  validate_core(spec.core);
  return spec;
}

EPDSpec load_architecture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open architecture file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return architecture_from_json(Json::parse(ss.str()));
  } catch (const Json::parse_error& e) {
    throw ConfigError("architecture file '" + path + "': " + e.what());
  }
}

}  // namespace gn
