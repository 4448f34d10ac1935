#include <utility>

#include "gn/variants.hpp"

namespace gn {
namespace {

const std::pair<Form, const char*> kForms[] = {
    {Form::Disabled, "disabled"}, {Form::Identity, "identity"},   {Form::Mlp, "mlp"},
    {Form::TypedMlp, "typed_mlp"}, {Form::SenderPlusMlp, "sender_plus_mlp"}, {Form::Attention, "attention"},
    {Form::Gru, "gru"},           {Form::CommNet, "commnet"},     {Form::TwoStage, "two_stage"},
    {Form::S2V, "s2v"}};

const std::pair<Aggregator, const char*> kAggregators[] = {
    {Aggregator::Sum, "sum"}, {Aggregator::Mean, "mean"}, {Aggregator::Max, "max"},
    {Aggregator::Attention, "attention"}};

const std::pair<AttentionKind, const char*> kAttention[] = {
    {AttentionKind::DotProduct, "dot_product"}, {AttentionKind::Euclidean, "euclidean"},
    {AttentionKind::Learned, "learned"}};

template <typename E, std::size_t N>
std::string name_of(const std::pair<E, const char*> (&table)[N], E value) {
  for (const auto& [v, n] : table)
    if (v == value) return n;
  return "?";
}

template <typename E, std::size_t N>
E value_of(const std::pair<E, const char*> (&table)[N], const std::string& s, const char* what) {
  std::string valid;
  for (const auto& [v, n] : table) {
    if (s == n) return v;
    valid += (valid.empty() ? "" : ", ") + std::string(n);
  }
  throw ConfigError(std::string("unknown ") + what + " '" + s + "' (" + valid + ")");
}

template <typename T>
T get(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

const char* const kInputs[] = {"edge", "receiver", "sender", "node", "edge_agg", "node_agg", "global"};

bool* flag(PhiSignature& s, const std::string& in) {
  if (in == "edge") return &s.edge;
  if (in == "receiver") return &s.receiver;
  if (in == "sender") return &s.sender;
  if (in == "node") return &s.node;
  if (in == "edge_agg") return &s.edge_agg;
  if (in == "node_agg") return &s.node_agg;
  if (in == "global") return &s.global;
  return nullptr;
}

Json sig_to_json(PhiSignature s) {
  Json inputs = Json::array();
  for (const char* in : kInputs)
    if (*flag(s, in)) inputs.push_back(in);
  return Json{{"form", to_string(s.form)}, {"inputs", inputs}};
}

PhiSignature sig_from_json(const Json& j, const char* key) {
  PhiSignature s;
  if (!j.contains(key)) return s;
  const Json& o = j.at(key);
  if (!o.is_object()) throw ConfigError(std::string("'") + key + "' must be an object");
  s.form = form_from_string(get<std::string>(o, "form", "disabled"));
  for (const auto& in : get<std::vector<std::string>>(o, "inputs", {})) {
    bool* f = flag(s, in);
    if (!f) throw ConfigError(std::string("'") + key + "': unknown input '" + in + "'");
    *f = true;
  }
  return s;
}

}  // namespace

std::string to_string(Form f) { return name_of(kForms, f); }
std::string to_string(Aggregator a) { return name_of(kAggregators, a); }
std::string to_string(AttentionKind k) { return name_of(kAttention, k); }
Form form_from_string(const std::string& s) { return value_of(kForms, s, "form"); }
Aggregator aggregator_from_string(const std::string& s) { return value_of(kAggregators, s, "aggregator"); }
AttentionKind attention_kind_from_string(const std::string& s) { return value_of(kAttention, s, "attention kind"); }

Json config_to_json(const GNConfig& cfg) {
  const auto& d = cfg.dims;
  const auto& h = cfg.hyper;
  Json j;
  j["preset"] = cfg.preset;
  j["dims"] = Json{{"edge_in", d.edge_in},   {"node_in", d.node_in},   {"global_in", d.global_in},
                   {"edge_out", d.edge_out}, {"node_out", d.node_out}, {"global_out", d.global_out}};
  j["hyper"] = Json{{"hidden", h.hidden},
                    {"activation", to_string(h.activation)},
                    {"heads", h.heads},
                    {"key_dim", h.key_dim},
                    {"head_dim", h.head_dim},
                    {"edge_types", h.edge_types},
                    {"attention", to_string(h.attention)},
                    {"relative_positions", h.relative_positions},
                    {"global_output", h.global_output}};
  if (cfg.preset == "custom") {
    j["phi_e"] = sig_to_json(cfg.phi_e);
    j["phi_v"] = sig_to_json(cfg.phi_v);
    j["phi_u"] = sig_to_json(cfg.phi_u);
    j["rho_ev"] = to_string(cfg.rho_ev);
    j["rho_eu"] = to_string(cfg.rho_eu);
    j["rho_vu"] = to_string(cfg.rho_vu);
  }
  return j;
}

GNConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("block config must be a JSON object");
  BlockDims d;
  if (j.contains("dims")) {
    const Json& o = j.at("dims");
    d.edge_in = get<std::size_t>(o, "edge_in", 0);
    d.node_in = get<std::size_t>(o, "node_in", 0);
    d.global_in = get<std::size_t>(o, "global_in", 0);
    d.edge_out = get<std::size_t>(o, "edge_out", 0);
    d.node_out = get<std::size_t>(o, "node_out", 0);
    d.global_out = get<std::size_t>(o, "global_out", 0);
  }
  BlockHyper h;
  if (j.contains("hyper")) {
    const Json& o = j.at("hyper");
    h.hidden = get<std::vector<std::size_t>>(o, "hidden", h.hidden);
    try {
      h.activation = activation_from_string(get<std::string>(o, "activation", to_string(h.activation)));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    h.heads = get<std::size_t>(o, "heads", h.heads);
    h.key_dim = get<std::size_t>(o, "key_dim", h.key_dim);
    h.head_dim = get<std::size_t>(o, "head_dim", h.head_dim);
    h.edge_types = get<std::size_t>(o, "edge_types", h.edge_types);
    h.attention = attention_kind_from_string(get<std::string>(o, "attention", to_string(h.attention)));
    h.relative_positions = get<bool>(o, "relative_positions", h.relative_positions);
    h.global_output = get<bool>(o, "global_output", h.global_output);
  }
  const std::string preset = get<std::string>(j, "preset", "custom");
  if (preset != "custom") return make_variant(preset, d, h);

  GNConfig c;
  c.dims = d;
  c.hyper = h;
  c.phi_e = sig_from_json(j, "phi_e");
  c.phi_v = sig_from_json(j, "phi_v");
  c.phi_u = sig_from_json(j, "phi_u");
  c.rho_ev = aggregator_from_string(get<std::string>(j, "rho_ev", "sum"));
  c.rho_eu = aggregator_from_string(get<std::string>(j, "rho_eu", "sum"));
  c.rho_vu = aggregator_from_string(get<std::string>(j, "rho_vu", "sum"));
  validate_config(c);
  return c;
}

}  // namespace gn
