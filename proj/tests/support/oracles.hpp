#pragma once

// Independent reference computations: plain loops over std::vector, no tape.

#include <cmath>
#include <string>
#include <vector>

#include "gn/block.hpp"
#include "gn/graph.hpp"
#include "gn/nn.hpp"
#include "gn/params.hpp"
#include "gn/random.hpp"
#include "gn/variants.hpp"

namespace gn::testing {

inline double act_ref(double x, Activation a) {
  switch (a) {
    case Activation::Relu: return x > 0 ? x : 0.0;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::Identity: return x;
  }
  return x;
}

/// Evaluates the MLP stored under `prefix` on one input row.
inline AttrVector mlp_ref(const ParameterStore& ps, const std::string& prefix, AttrVector x,
                          Activation hidden = Activation::Relu) {
  std::size_t layer = 0;
  while (ps.contains(prefix + "/l" + std::to_string(layer) + "/w")) ++layer;
  for (std::size_t l = 0; l < layer; ++l) {
    const Tensor& w = ps.value(prefix + "/l" + std::to_string(l) + "/w");
    const Tensor& b = ps.value(prefix + "/l" + std::to_string(l) + "/b");
    AttrVector y(w.cols());
    for (std::size_t c = 0; c < w.cols(); ++c) {
      double s = b(0, c);
      for (std::size_t k = 0; k < w.rows(); ++k) s += x.at(k) * w(k, c);
      y[c] = l + 1 < layer ? act_ref(s, hidden) : s;
    }
    x = std::move(y);
  }
  return x;
}

inline AttrVector cat(std::initializer_list<AttrVector> parts) {
  AttrVector out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline void add_into(AttrVector& acc, const AttrVector& x) {
  if (acc.empty()) acc.assign(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) acc[i] += x[i];
}

/// Moves every parameter off its initial value. Zero-initialised biases put
/// hidden units exactly on the ReLU kink for zero inputs, where central
/// differences are meaningless.
inline void jitter_params(ParameterStore& ps, Rng& rng, double scale = 0.1) {
  for (auto& e : ps)
    for (double& v : e.value.values()) v += rng.uniform(-scale, scale);
}

/// Attribute widths used for every preset in generic property tests.
inline BlockDims preset_dims() { return BlockDims{2, 3, 2, 4, 3, 2}; }

inline GNConfig preset_config(const std::string& name, std::vector<std::size_t> hidden = {16, 16}) {
  BlockHyper h;
  h.hidden = std::move(hidden);
  h.heads = 2;
  h.key_dim = 3;
  h.head_dim = 2;
  h.edge_types = 3;
  h.global_output = true;
  BlockDims d = preset_dims();
  if (name == "ggsnn") d.node_out = d.node_in;
  if (name == "struct2vec") d.edge_out = d.node_out = d.edge_in;
  return make_variant(name, d, h);
}

}  // namespace gn::testing
