#include "gn/params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gn {

std::size_t ParameterStore::add(const std::string& name, Tensor value) {
  if (contains(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  const std::size_t i = entries_.size();
  Tensor grad(value.rows(), value.cols());
  entries_.push_back({name, std::move(value), std::move(grad)});
  index_.emplace(name, i);
  return i;
}

std::size_t ParameterStore::add_glorot(const std::string& name, std::size_t rows, std::size_t cols,
                                       std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  Tensor t(rows, cols);
  const std::size_t fan = fan_in + fan_out;
  const double s = fan == 0 ? 0.0 : std::sqrt(6.0 / static_cast<double>(fan));
  for (auto& x : t.values()) x = rng.uniform(-s, s);
  return add(name, std::move(t));
}

std::size_t ParameterStore::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
  return it->second;
}

std::size_t ParameterStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& e : entries_) std::fill(e.grad.values().begin(), e.grad.values().end(), 0.0);
}

bool ParameterStore::operator==(const ParameterStore& o) const {
  if (entries_.size() != o.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name != o.entries_[i].name || !(entries_[i].value == o.entries_[i].value)) return false;
  }
  return true;
}

Json params_to_json(const ParameterStore& ps) {
  Json out = Json::object();
  for (const auto& e : ps) {
    out[e.name] = Json{{"shape", {e.value.rows(), e.value.cols()}}, {"values", e.value.values()}};
  }
  return out;
}

ParameterStore params_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("checkpoint: expected object", 0);
  ParameterStore ps;
  for (const auto& [name, entry] : j.items()) {
    const std::string path = "checkpoint." + name;
    if (!entry.is_object() || !entry.contains("shape") || !entry.contains("values")) {
      throw ParseError(path + ": expected {shape, values}", 0);
    }
    const Json& shape = entry["shape"];
    if (!shape.is_array() || shape.size() != 2 || !shape[0].is_number_unsigned() ||
        !shape[1].is_number_unsigned()) {
      throw ParseError(path + ".shape: expected [rows, cols]", 0);
    }
    const auto rows = shape[0].get<std::size_t>();
    const auto cols = shape[1].get<std::size_t>();
    AttrVector values = attr_from_json(entry["values"], path + ".values");
    if (values.size() != rows * cols) throw ParseError(path + ": value count does not match shape", 0);
    ps.add(name, Tensor(rows, cols, std::move(values)));
  }
  return ps;
}

void save_params(const ParameterStore& ps, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << params_to_json(ps).dump() << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

ParameterStore load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
  return params_from_json(j);
}

}  // namespace gn
