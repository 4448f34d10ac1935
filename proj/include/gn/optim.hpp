#pragma once

#include <cstdint>
#include <string>

#include "gn/params.hpp"

namespace gn {

struct OptimizerConfig {
  enum class Kind { Sgd, Adam };
  Kind kind = Kind::Adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

OptimizerConfig::Kind optimizer_kind_from_string(const std::string& s);

/// SGD or Adam over every parameter of a store. Adam moments are keyed by
/// parameter name so the state can be saved and restored with the store.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg) : cfg_(cfg) {}

  /// Applies one update from the accumulated gradients, then zeroes them.
  void step(ParameterStore& ps);

  std::uint64_t steps_taken() const { return t_; }
  const OptimizerConfig& config() const { return cfg_; }

  /// Moments in checkpoint format ("m/<name>", "v/<name>") plus "t".
  Json state_to_json() const;
  void load_state(const Json& j);

 private:
  void ensure_state(const ParameterStore& ps);

  OptimizerConfig cfg_;
  std::uint64_t t_ = 0;
  ParameterStore m_;
  ParameterStore v_;
};

}  // namespace gn
