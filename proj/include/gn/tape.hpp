#pragma once

// Reverse-mode differentiation over Tensor-valued operations.
//
// A Tape records every operation applied to its variables. Parameters enter
// through Tape::parameter(); backward() pushes d(loss)/d(value) through the
// recorded operations in reverse order and adds the result into the
// ParameterStore gradient of every parameter that was read.

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gn/kernels.hpp"
#include "gn/params.hpp"
#include "gn/tensor.hpp"

namespace gn {

class Tape;

/// Handle to a value recorded on a tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, const Tensor& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var parameter(ParameterStore& store, const std::string& name);

  /// Records an operation. `backward` runs only when one of `inputs` needs a
  /// gradient.
  Var record(Tensor value, std::vector<int> inputs, Backward backward);

  const Tensor& value(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].value; }
  bool needs_grad(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].needs_grad; }

  /// Adds `g` into the gradient slot of `v` (used by backward closures).
  Tensor& grad_slot(int id);

  /// Propagates d(loss)/d(.) from a 1x1 loss and accumulates parameter
  /// gradients into their stores. Clears the tape afterwards.
  void backward(Var loss);

  void clear();
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool has_grad = false;
    bool needs_grad = false;
    std::vector<int> inputs;
    Backward backward;
    ParameterStore* store = nullptr;
    std::size_t param_index = 0;
  };

  std::vector<Node> nodes_;
};

// Operations. Shapes are [rows x cols]; "col" arguments are [rows x 1]
// vectors broadcast across columns.

Var linear(Var x, Var w, Var b);
Var matmul(Var x, Var w);
Var relu(Var x);
Var tanh(Var x);
Var sigmoid(Var x);
Var exp(Var x);
Var clamp(Var x, double lo, double hi);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
/// a * x + b elementwise.
Var affine(Var x, double a, double b);
Var concat_cols(const std::vector<Var>& parts);
Var slice_cols(Var x, std::size_t start, std::size_t len);
/// Row r of the result is row idx.ids[r] of x.
Var gather_rows(Var x, std::shared_ptr<const Grouping> idx);
Var segment_sum(Var x, std::shared_ptr<const Grouping> seg);
Var segment_mean(Var x, std::shared_ptr<const Grouping> seg);
/// Empty groups produce zeros; `empty_groups` (if given) receives their count.
Var segment_max(Var x, std::shared_ptr<const Grouping> seg, std::size_t* empty_groups = nullptr);
/// Row-wise dot product -> [rows x 1].
Var row_dot(Var a, Var b);
/// Row-wise squared norm -> [rows x 1].
Var row_sqnorm(Var a);
/// x[r, :] * c[r].
Var mul_col(Var x, Var c);
/// x[r, :] / c[r]; rows with c[r] == 0 give 0.
Var div_col(Var x, Var c);
/// Places part p's rows at positions dest[p] of an n-row result.
Var assemble_rows(const std::vector<Var>& parts, const std::vector<std::vector<int>>& dest, std::size_t n,
                  std::size_t cols);
Var sum_all(Var x);
Var mean_all(Var x);
/// Mean binary cross-entropy of sigmoid(logits) against 0/1 targets.
Var bce_with_logits(Var logits, const Tensor& targets);
/// Mean squared error.
Var mse(Var pred, const Tensor& target);

}  // namespace gn
