#pragma once

#include <string>
#include <vector>

#include "gn/block.hpp"
#include "gn/graph_json.hpp"

namespace gn {

/// Names accepted by make_variant, in a fixed order.
const std::vector<std::string>& variant_names();

/// Builds the block configuration of a named architecture. Throws
/// ConfigError naming the valid presets when `name` is unknown.
GNConfig make_variant(const std::string& name, const BlockDims& dims, const BlockHyper& hyper = {});

/// Appends a master node connected to and from every other node, the way an
/// MPNN's d_master is carried inside V.
Graph add_master_node(const Graph& g, const AttrVector& node_attr, const AttrVector& edge_attr);

std::string to_string(Form f);
std::string to_string(Aggregator a);
std::string to_string(AttentionKind k);
Form form_from_string(const std::string& s);
Aggregator aggregator_from_string(const std::string& s);
AttentionKind attention_kind_from_string(const std::string& s);

/// {"preset", "dims", "hyper"}; "custom" configs also carry phi_e, phi_v,
/// phi_u and the three aggregators.
Json config_to_json(const GNConfig& cfg);
GNConfig config_from_json(const Json& j);

}  // namespace gn
