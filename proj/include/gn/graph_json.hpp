#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "gn/graph.hpp"

namespace gn {

// Insertion-ordered so written files keep the documented key order.
using Json = nlohmann::ordered_json;

/// Malformed graph text. `position` is the byte offset for syntax errors
/// and 0 for schema errors, whose message carries the JSON path instead.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Graph text format:
//   {"u":[...],"nodes":[[...],...],"edges":[{"attr":[...],"sender":s,"receiver":r,"type":t},...]}
// Numbers are written as the shortest decimal that round-trips binary64.

Json graph_to_json(const Graph& g);
Graph graph_from_json(const Json& j, const std::string& path = "$");

std::string serialize(const Graph& g);
Graph deserialize(std::string_view text);

AttrVector attr_from_json(const Json& j, const std::string& path);

}  // namespace gn
