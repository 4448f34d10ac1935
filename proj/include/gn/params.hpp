#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "gn/graph_json.hpp"
#include "gn/random.hpp"
#include "gn/tensor.hpp"

namespace gn {

/// Named parameter tensors with gradient accumulators. Iteration follows
/// insertion order.
class ParameterStore {
 public:
  struct Entry {
    std::string name;
    Tensor value;
    Tensor grad;
  };

  /// Adds a parameter; throws std::invalid_argument on a duplicate name.
  std::size_t add(const std::string& name, Tensor value);
  /// Adds a parameter initialised uniformly in [-s, s], s = sqrt(6/(fan_in+fan_out)).
  std::size_t add_glorot(const std::string& name, std::size_t rows, std::size_t cols,
                         std::size_t fan_in, std::size_t fan_out, Rng& rng);

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  std::size_t index_of(const std::string& name) const;

  Entry& at(std::size_t i) { return entries_[i]; }
  const Entry& at(std::size_t i) const { return entries_[i]; }
  Tensor& value(const std::string& name) { return entries_[index_of(name)].value; }
  const Tensor& value(const std::string& name) const { return entries_[index_of(name)].value; }
  const Tensor& grad(const std::string& name) const { return entries_[index_of(name)].grad; }

  std::size_t size() const { return entries_.size(); }
  std::size_t num_scalars() const;
  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  void zero_grad();

  bool operator==(const ParameterStore& o) const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Checkpoint file: {"<name>": {"shape": [rows, cols], "values": [...]}, ...}
Json params_to_json(const ParameterStore& ps);
ParameterStore params_from_json(const Json& j);
void save_params(const ParameterStore& ps, const std::string& path);
ParameterStore load_params(const std::string& path);

}  // namespace gn
