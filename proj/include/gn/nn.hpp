#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gn/params.hpp"
#include "gn/random.hpp"
#include "gn/tape.hpp"

namespace gn {

enum class Activation { Identity, Relu, Tanh, Sigmoid };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);
Var activate(Var x, Activation a);

/// Affine layers of the given output widths; the last width is the output
/// dimension. Hidden layers use `hidden`, the last layer uses `output`.
struct MLPSpec {
  std::size_t input = 0;
  std::vector<std::size_t> widths;
  Activation hidden = Activation::Relu;
  Activation output = Activation::Identity;

  std::size_t output_dim() const { return widths.empty() ? input : widths.back(); }
};

/// Registers `<prefix>/l<i>/w` and `<prefix>/l<i>/b` for every layer.
void mlp_init(const MLPSpec& spec, ParameterStore& ps, const std::string& prefix, Rng& rng);
Var mlp_apply(const MLPSpec& spec, ParameterStore& ps, const std::string& prefix, Var x);

/// Gated recurrent unit:
///   z  = sigmoid(x Wz + h Uz + bz)
///   r  = sigmoid(x Wr + h Ur + br)
///   n  = tanh(x Wn + (r * h) Un + bn)
///   h' = (1 - z) * h + z * n
struct GRUSpec {
  std::size_t input = 0;
  std::size_t hidden = 0;
};

void gru_init(const GRUSpec& spec, ParameterStore& ps, const std::string& prefix, Rng& rng);
Var gru_apply(const GRUSpec& spec, ParameterStore& ps, const std::string& prefix, Var x, Var h);

}  // namespace gn
