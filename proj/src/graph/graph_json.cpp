#include "gn/graph_json.hpp"

#include <cstdint>

namespace gn {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what, 0);
}

const Json& require(const Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, std::string("missing \"") + key + "\"");
  return *it;
}

int int_from_json(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected integer");
  const auto v = j.get<long long>();
  if (v < INT32_MIN || v > INT32_MAX) schema_error(path, "integer out of range");
  return static_cast<int>(v);
}

}  // namespace

AttrVector attr_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected array of numbers");
  AttrVector out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) schema_error(path + "[" + std::to_string(i) + "]", "expected number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

Json graph_to_json(const Graph& g) {
  Json nodes = Json::array();
  for (const auto& v : g.nodes) nodes.push_back(v);
  Json edges = Json::array();
  for (const auto& e : g.edges) {
    edges.push_back(Json{{"attr", e.attr}, {"sender", e.sender}, {"receiver", e.receiver}, {"type", e.type}});
  }
  Json out = Json::object();
  out["u"] = g.global_attr;
  out["nodes"] = std::move(nodes);
  out["edges"] = std::move(edges);
  return out;
}

Graph graph_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected graph object");
  Graph g;
  g.global_attr = attr_from_json(require(j, "u", path), path + ".u");

  const Json& nodes = require(j, "nodes", path);
  if (!nodes.is_array()) schema_error(path + ".nodes", "expected array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    g.nodes.push_back(attr_from_json(nodes[i], path + ".nodes[" + std::to_string(i) + "]"));
  }

  const Json& edges = require(j, "edges", path);
  if (!edges.is_array()) schema_error(path + ".edges", "expected array");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string ep = path + ".edges[" + std::to_string(k) + "]";
    const Json& ej = edges[k];
    if (!ej.is_object()) schema_error(ep, "expected edge object");
    Edge e;
    e.attr = attr_from_json(require(ej, "attr", ep), ep + ".attr");
    e.sender = int_from_json(require(ej, "sender", ep), ep + ".sender");
    e.receiver = int_from_json(require(ej, "receiver", ep), ep + ".receiver");
    if (auto it = ej.find("type"); it != ej.end()) e.type = int_from_json(*it, ep + ".type");
    g.edges.push_back(std::move(e));
  }
  return g;
}

std::string serialize(const Graph& g) { return graph_to_json(g).dump(); }

Graph deserialize(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
  return graph_from_json(j);
}

}  // namespace gn
