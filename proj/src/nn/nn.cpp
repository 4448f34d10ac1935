#include "gn/nn.hpp"

#include <stdexcept>

namespace gn {

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::Identity;
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  if (s == "sigmoid") return Activation::Sigmoid;
  throw std::invalid_argument("unknown activation '" + s + "' (identity, relu, tanh, sigmoid)");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "identity";
}

Var activate(Var x, Activation a) {
  switch (a) {
    case Activation::Identity: return x;
    case Activation::Relu: return relu(x);
    case Activation::Tanh: return tanh(x);
    case Activation::Sigmoid: return sigmoid(x);
  }
  return x;
}

void mlp_init(const MLPSpec& spec, ParameterStore& ps, const std::string& prefix, Rng& rng) {
  if (spec.widths.empty()) throw std::invalid_argument("MLP " + prefix + " needs at least one layer");
  std::size_t in = spec.input;
  for (std::size_t l = 0; l < spec.widths.size(); ++l) {
    const std::size_t out = spec.widths[l];
    if (out == 0) throw std::invalid_argument("MLP " + prefix + " has a zero-width layer");
    const std::string base = prefix + "/l" + std::to_string(l);
    ps.add_glorot(base + "/w", in, out, in, out, rng);
    ps.add(base + "/b", Tensor(1, out));
    in = out;
  }
}

Var mlp_apply(const MLPSpec& spec, ParameterStore& ps, const std::string& prefix, Var x) {
  if (x.cols() != spec.input) {
    throw ShapeError("MLP " + prefix + " expects input width " + std::to_string(spec.input) + ", got " +
                     shape_str(x.value()));
  }
  Tape& tape = *x.tape;
  Var h = x;
  for (std::size_t l = 0; l < spec.widths.size(); ++l) {
    const std::string base = prefix + "/l" + std::to_string(l);
    h = linear(h, tape.parameter(ps, base + "/w"), tape.parameter(ps, base + "/b"));
    h = activate(h, l + 1 == spec.widths.size() ? spec.output : spec.hidden);
  }
  return h;
}

void gru_init(const GRUSpec& spec, ParameterStore& ps, const std::string& prefix, Rng& rng) {
  if (spec.hidden == 0) throw std::invalid_argument("GRU " + prefix + " needs a positive hidden size");
  for (const char* gate : {"z", "r", "n"}) {
    const std::string g(gate);
    ps.add_glorot(prefix + "/w" + g, spec.input, spec.hidden, spec.input, spec.hidden, rng);
    ps.add_glorot(prefix + "/u" + g, spec.hidden, spec.hidden, spec.hidden, spec.hidden, rng);
    ps.add(prefix + "/b" + g, Tensor(1, spec.hidden));
  }
}

Var gru_apply(const GRUSpec& spec, ParameterStore& ps, const std::string& prefix, Var x, Var h) {
  if (x.cols() != spec.input || h.cols() != spec.hidden || x.rows() != h.rows()) {
    throw ShapeError("GRU " + prefix + " expects input [n x " + std::to_string(spec.input) + "] and state [n x " +
                     std::to_string(spec.hidden) + "], got " + shape_str(x.value()) + " and " +
                     shape_str(h.value()));
  }
  Tape& tape = *x.tape;
  auto p = [&](const std::string& n) { return tape.parameter(ps, prefix + "/" + n); };

  Var z = sigmoid(add(linear(x, p("wz"), p("bz")), matmul(h, p("uz"))));
  Var r = sigmoid(add(linear(x, p("wr"), p("br")), matmul(h, p("ur"))));
  Var n = tanh(add(linear(x, p("wn"), p("bn")), matmul(mul(r, h), p("un"))));
  // (1 - z) * h + z * n
  return add(mul(affine(z, -1.0, 1.0), h), mul(z, n));
}

}  // namespace gn
