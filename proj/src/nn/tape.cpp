#include "gn/tape.hpp"

#include <algorithm>
#include <cmath>

namespace gn {

const Tensor& Var::value() const { return tape->value(*this); }

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size() - 1)};
}

Var Tape::parameter(ParameterStore& store, const std::string& name) {
  const std::size_t idx = store.index_of(name);
  Node n;
  n.value = store.at(idx).value;
  n.needs_grad = true;
  n.store = &store;
  n.param_index = idx;
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size() - 1)};
}

Var Tape::record(Tensor value, std::vector<int> inputs, Backward backward) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = std::any_of(inputs.begin(), inputs.end(),
                             [this](int i) { return nodes_[static_cast<std::size_t>(i)].needs_grad; });
  if (n.needs_grad) {
    n.inputs = std::move(inputs);
    n.backward = std::move(backward);
  }
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size() - 1)};
}

Tensor& Tape::grad_slot(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.has_grad) {
    n.grad = Tensor(n.value.rows(), n.value.cols());
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw std::invalid_argument("backward: loss recorded on another tape");
  if (value(loss).size() != 1) {
    throw ShapeError("backward: loss must be a scalar, got " + shape_str(value(loss)));
  }
  grad_slot(loss.id)[0] = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.has_grad || !n.needs_grad) continue;
    if (n.store) {
      Tensor& g = n.store->at(n.param_index).grad;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    } else if (n.backward) {
      n.backward(*this, n.grad);
    }
  }
  clear();
}

void Tape::clear() { nodes_.clear(); }

namespace {

void same_tape(Var a, Var b, const char* op) {
  if (a.tape != b.tape) throw std::invalid_argument(std::string(op) + ": operands on different tapes");
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shapes " + shape_str(a) + " and " + shape_str(b) + " differ");
  }
}

void require_col(const Tensor& x, const Tensor& c, const char* op) {
  if (c.cols() != 1 || c.rows() != x.rows()) {
    throw ShapeError(std::string(op) + ": column " + shape_str(c) + " does not match " + shape_str(x));
  }
}

template <typename F, typename D>
Var unary(Var x, F f, D dfdx_from_xy) {
  const Tensor& xv = x.value();
  Tensor y(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < xv.size(); ++i) y[i] = f(xv[i]);
  const int xi = x.id;
  const int yi = static_cast<int>(x.tape->size());
  return x.tape->record(std::move(y), {xi}, [xi, yi, dfdx_from_xy](Tape& t, const Tensor& g) {
    const Tensor& xv2 = t.value(Var{&t, xi});
    const Tensor& yv2 = t.value(Var{&t, yi});
    Tensor& gx = t.grad_slot(xi);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * dfdx_from_xy(xv2[i], yv2[i]);
  });
}

}  // namespace

Var matmul(Var x, Var w) {
  same_tape(x, w, "matmul");
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  Tensor y(xv.rows(), wv.cols());
  kernels::linear(xv, wv, nullptr, y);
  const int xi = x.id, wi = w.id;
  return x.tape->record(std::move(y), {xi, wi}, [xi, wi](Tape& t, const Tensor& g) {
    const Tensor& xv2 = t.value(Var{&t, xi});
    const Tensor& wv2 = t.value(Var{&t, wi});
    if (t.needs_grad(Var{&t, xi})) kernels::accumulate_a_bt(g, wv2, t.grad_slot(xi));
    if (t.needs_grad(Var{&t, wi})) kernels::accumulate_at_b(xv2, g, t.grad_slot(wi));
  });
}

Var linear(Var x, Var w, Var b) {
  same_tape(x, w, "linear");
  same_tape(x, b, "linear");
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  Tensor y(xv.rows(), wv.cols());
  kernels::linear(xv, wv, &b.value(), y);
  const int xi = x.id, wi = w.id, bi = b.id;
  return x.tape->record(std::move(y), {xi, wi, bi}, [xi, wi, bi](Tape& t, const Tensor& g) {
    const Tensor& xv2 = t.value(Var{&t, xi});
    const Tensor& wv2 = t.value(Var{&t, wi});
    if (t.needs_grad(Var{&t, xi})) kernels::accumulate_a_bt(g, wv2, t.grad_slot(xi));
    if (t.needs_grad(Var{&t, wi})) kernels::accumulate_at_b(xv2, g, t.grad_slot(wi));
    if (t.needs_grad(Var{&t, bi})) kernels::accumulate_col_sums(g, t.grad_slot(bi));
  });
}

Var relu(Var x) {
  return unary(x, [](double v) { return v > 0.0 ? v : 0.0; },
               [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var tanh(Var x) {
  return unary(x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Var x) {
  return unary(x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
               [](double, double y) { return y * (1.0 - y); });
}

Var exp(Var x) {
  return unary(x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Var clamp(Var x, double lo, double hi) {
  return unary(x, [lo, hi](double v) { return std::clamp(v, lo, hi); },
               [lo, hi](double v, double) { return (v >= lo && v <= hi) ? 1.0 : 0.0; });
}

Var affine(Var x, double a, double b) {
  return unary(x, [a, b](double v) { return a * v + b; }, [a](double, double) { return a; });
}

Var add(Var a, Var b) {
  same_tape(a, b, "add");
  require_same_shape(a.value(), b.value(), "add");
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
  const int ai = a.id, bi = b.id;
  return a.tape->record(std::move(y), {ai, bi}, [ai, bi](Tape& t, const Tensor& g) {
    for (int id : {ai, bi}) {
      if (!t.needs_grad(Var{&t, id})) continue;
      Tensor& s = t.grad_slot(id);
      for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i];
    }
  });
}

Var sub(Var a, Var b) {
  same_tape(a, b, "sub");
  require_same_shape(a.value(), b.value(), "sub");
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= bv[i];
  const int ai = a.id, bi = b.id;
  return a.tape->record(std::move(y), {ai, bi}, [ai, bi](Tape& t, const Tensor& g) {
    if (t.needs_grad(Var{&t, ai})) {
      Tensor& s = t.grad_slot(ai);
      for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i];
    }
    if (t.needs_grad(Var{&t, bi})) {
      Tensor& s = t.grad_slot(bi);
      for (std::size_t i = 0; i < g.size(); ++i) s[i] -= g[i];
    }
  });
}

Var mul(Var a, Var b) {
  same_tape(a, b, "mul");
  require_same_shape(a.value(), b.value(), "mul");
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
  const int ai = a.id, bi = b.id;
  return a.tape->record(std::move(y), {ai, bi}, [ai, bi](Tape& t, const Tensor& g) {
    const Tensor& av2 = t.value(Var{&t, ai});
    const Tensor& bv2 = t.value(Var{&t, bi});
    if (t.needs_grad(Var{&t, ai})) {
      Tensor& s = t.grad_slot(ai);
      for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i] * bv2[i];
    }
    if (t.needs_grad(Var{&t, bi})) {
      Tensor& s = t.grad_slot(bi);
      for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i] * av2[i];
    }
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no parts");
  Tape* tape = parts.front().tape;
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  std::vector<int> ids;
  std::vector<std::size_t> starts;
  for (const Var& p : parts) {
    if (p.tape != tape) throw std::invalid_argument("concat_cols: parts on different tapes");
    if (p.rows() != rows) {
      throw ShapeError("concat_cols: part with " + std::to_string(p.rows()) + " rows, expected " +
                       std::to_string(rows));
    }
    ids.push_back(p.id);
    starts.push_back(cols);
    cols += p.cols();
  }
  Tensor y(rows, cols);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const Tensor& v = parts[p].value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy(v.row_span(r).begin(), v.row_span(r).end(), y.row_span(r).begin() + static_cast<std::ptrdiff_t>(starts[p]));
    }
  }
  return tape->record(std::move(y), ids, [ids, starts](Tape& t, const Tensor& g) {
    for (std::size_t p = 0; p < ids.size(); ++p) {
      if (!t.needs_grad(Var{&t, ids[p]})) continue;
      Tensor& s = t.grad_slot(ids[p]);
      for (std::size_t r = 0; r < s.rows(); ++r) {
        for (std::size_t c = 0; c < s.cols(); ++c) s(r, c) += g(r, starts[p] + c);
      }
    }
  });
}

Var slice_cols(Var x, std::size_t start, std::size_t len) {
  const Tensor& xv = x.value();
  if (start + len > xv.cols()) throw ShapeError("slice_cols: range exceeds " + shape_str(xv));
  Tensor y(xv.rows(), len);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    for (std::size_t c = 0; c < len; ++c) y(r, c) = xv(r, start + c);
  }
  const int xi = x.id;
  return x.tape->record(std::move(y), {xi}, [xi, start](Tape& t, const Tensor& g) {
    Tensor& s = t.grad_slot(xi);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) s(r, start + c) += g(r, c);
    }
  });
}

Var gather_rows(Var x, std::shared_ptr<const Grouping> idx) {
  const Tensor& xv = x.value();
  if (xv.rows() != idx->n_groups) {
    throw ShapeError("gather_rows: source has " + std::to_string(xv.rows()) + " rows, index expects " +
                     std::to_string(idx->n_groups));
  }
  Tensor y(idx->n_rows(), xv.cols());
  kernels::gather_rows(xv, *idx, y);
  const int xi = x.id;
  return x.tape->record(std::move(y), {xi}, [xi, idx](Tape& t, const Tensor& g) {
    kernels::segment_sum(g, *idx, t.grad_slot(xi));
  });
}

Var segment_sum(Var x, std::shared_ptr<const Grouping> seg) {
  const Tensor& xv = x.value();
  if (xv.rows() != seg->n_rows()) {
    throw ShapeError("segment_sum: input has " + std::to_string(xv.rows()) + " rows, grouping covers " +
                     std::to_string(seg->n_rows()));
  }
  Tensor y(seg->n_groups, xv.cols());
  kernels::segment_sum(xv, *seg, y);
  const int xi = x.id;
  return x.tape->record(std::move(y), {xi}, [xi, seg](Tape& t, const Tensor& g) {
    Tensor& s = t.grad_slot(xi);
    for (std::size_t r = 0; r < seg->n_rows(); ++r) {
      const auto src = g.row_span(static_cast<std::size_t>(seg->ids[r]));
      const auto dst = s.row_span(r);
      for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
    }
  });
}

Var segment_mean(Var x, std::shared_ptr<const Grouping> seg) {
  Tape* tape = x.tape;
  Var sum = segment_sum(x, seg);
  Tensor inv(seg->n_groups, 1);
  for (std::size_t g = 0; g < seg->n_groups; ++g) {
    const std::size_t n = seg->group_size(g);
    inv[g] = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
  }
  return mul_col(sum, tape->constant(std::move(inv)));
}

Var segment_max(Var x, std::shared_ptr<const Grouping> seg, std::size_t* empty_groups) {
  const Tensor& xv = x.value();
  if (xv.rows() != seg->n_rows()) throw ShapeError("segment_max: row count does not match grouping");
  Tensor y(seg->n_groups, xv.cols());
  auto argmax = std::make_shared<std::vector<int>>();
  kernels::segment_max(xv, *seg, y, *argmax);
  if (empty_groups) {
    std::size_t n = 0;
    for (std::size_t g = 0; g < seg->n_groups; ++g) n += seg->group_size(g) == 0 ? 1 : 0;
    *empty_groups = n;
  }
  const int xi = x.id;
  const std::size_t d = xv.cols();
  return x.tape->record(std::move(y), {xi}, [xi, argmax, d](Tape& t, const Tensor& g) {
    Tensor& s = t.grad_slot(xi);
    for (std::size_t gi = 0; gi < g.rows(); ++gi) {
      for (std::size_t c = 0; c < d; ++c) {
        const int r = (*argmax)[gi * d + c];
        if (r >= 0) s(static_cast<std::size_t>(r), c) += g(gi, c);
      }
    }
  });
}

Var row_dot(Var a, Var b) {
  same_tape(a, b, "row_dot");
  require_same_shape(a.value(), b.value(), "row_dot");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Tensor y(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < av.cols(); ++c) acc += av(r, c) * bv(r, c);
    y[r] = acc;
  }
  const int ai = a.id, bi = b.id;
  return a.tape->record(std::move(y), {ai, bi}, [ai, bi](Tape& t, const Tensor& g) {
    const Tensor& av2 = t.value(Var{&t, ai});
    const Tensor& bv2 = t.value(Var{&t, bi});
    if (t.needs_grad(Var{&t, ai})) {
      Tensor& s = t.grad_slot(ai);
      for (std::size_t r = 0; r < s.rows(); ++r)
        for (std::size_t c = 0; c < s.cols(); ++c) s(r, c) += g[r] * bv2(r, c);
    }
    if (t.needs_grad(Var{&t, bi})) {
      Tensor& s = t.grad_slot(bi);
      for (std::size_t r = 0; r < s.rows(); ++r)
        for (std::size_t c = 0; c < s.cols(); ++c) s(r, c) += g[r] * av2(r, c);
    }
  });
}

Var row_sqnorm(Var a) {
  const Tensor& av = a.value();
  Tensor y(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < av.cols(); ++c) acc += av(r, c) * av(r, c);
    y[r] = acc;
  }
  const int ai = a.id;
  return a.tape->record(std::move(y), {ai}, [ai](Tape& t, const Tensor& g) {
    const Tensor& av2 = t.value(Var{&t, ai});
    Tensor& s = t.grad_slot(ai);
    for (std::size_t r = 0; r < s.rows(); ++r)
      for (std::size_t c = 0; c < s.cols(); ++c) s(r, c) += 2.0 * g[r] * av2(r, c);
  });
}

Var mul_col(Var x, Var c) {
  same_tape(x, c, "mul_col");
  require_col(x.value(), c.value(), "mul_col");
  Tensor y = x.value();
  const Tensor& cv = c.value();
  for (std::size_t r = 0; r < y.rows(); ++r)
    for (std::size_t j = 0; j < y.cols(); ++j) y(r, j) *= cv[r];
  const int xi = x.id, ci = c.id;
  return x.tape->record(std::move(y), {xi, ci}, [xi, ci](Tape& t, const Tensor& g) {
    const Tensor& xv2 = t.value(Var{&t, xi});
    const Tensor& cv2 = t.value(Var{&t, ci});
    if (t.needs_grad(Var{&t, xi})) {
      Tensor& s = t.grad_slot(xi);
      for (std::size_t r = 0; r < s.rows(); ++r)
        for (std::size_t j = 0; j < s.cols(); ++j) s(r, j) += g(r, j) * cv2[r];
    }
    if (t.needs_grad(Var{&t, ci})) {
      Tensor& s = t.grad_slot(ci);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < g.cols(); ++j) acc += g(r, j) * xv2(r, j);
        s[r] += acc;
      }
    }
  });
}

Var div_col(Var x, Var c) {
  same_tape(x, c, "div_col");
  require_col(x.value(), c.value(), "div_col");
  Tensor y = x.value();
  const Tensor& cv = c.value();
  for (std::size_t r = 0; r < y.rows(); ++r)
    for (std::size_t j = 0; j < y.cols(); ++j) y(r, j) = cv[r] == 0.0 ? 0.0 : y(r, j) / cv[r];
  const int xi = x.id, ci = c.id;
  const int yi = static_cast<int>(x.tape->size());
  return x.tape->record(std::move(y), {xi, ci}, [xi, ci, yi](Tape& t, const Tensor& g) {
    const Tensor& cv2 = t.value(Var{&t, ci});
    const Tensor& yv2 = t.value(Var{&t, yi});
    if (t.needs_grad(Var{&t, xi})) {
      Tensor& s = t.grad_slot(xi);
      for (std::size_t r = 0; r < s.rows(); ++r) {
        if (cv2[r] == 0.0) continue;
        for (std::size_t j = 0; j < s.cols(); ++j) s(r, j) += g(r, j) / cv2[r];
      }
    }
    if (t.needs_grad(Var{&t, ci})) {
      Tensor& s = t.grad_slot(ci);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        if (cv2[r] == 0.0) continue;
        double acc = 0.0;
        for (std::size_t j = 0; j < g.cols(); ++j) acc += g(r, j) * yv2(r, j);
        s[r] -= acc / cv2[r];
      }
    }
  });
}

Var assemble_rows(const std::vector<Var>& parts, const std::vector<std::vector<int>>& dest, std::size_t n,
                  std::size_t cols) {
  if (parts.size() != dest.size() || parts.empty()) throw ShapeError("assemble_rows: parts/dest mismatch");
  Tape* tape = parts.front().tape;
  Tensor y(n, cols);
  std::vector<int> ids;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const Tensor& v = parts[p].value();
    if (v.rows() != dest[p].size() || v.cols() != cols) throw ShapeError("assemble_rows: part shape mismatch");
    for (std::size_t r = 0; r < v.rows(); ++r) {
      const auto src = v.row_span(r);
      std::copy(src.begin(), src.end(), y.row_span(static_cast<std::size_t>(dest[p][r])).begin());
    }
    ids.push_back(parts[p].id);
  }
  return tape->record(std::move(y), ids, [ids, dest](Tape& t, const Tensor& g) {
    for (std::size_t p = 0; p < ids.size(); ++p) {
      if (!t.needs_grad(Var{&t, ids[p]})) continue;
      Tensor& s = t.grad_slot(ids[p]);
      for (std::size_t r = 0; r < dest[p].size(); ++r) {
        const auto src = g.row_span(static_cast<std::size_t>(dest[p][r]));
        const auto dst = s.row_span(r);
        for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
      }
    }
  });
}

Var sum_all(Var x) {
  const Tensor& xv = x.value();
  double acc = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) acc += xv[i];
  const int xi = x.id;
  return x.tape->record(Tensor::scalar(acc), {xi}, [xi](Tape& t, const Tensor& g) {
    Tensor& s = t.grad_slot(xi);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += g[0];
  });
}

Var mean_all(Var x) {
  const std::size_t n = x.value().size();
  return affine(sum_all(x), n == 0 ? 0.0 : 1.0 / static_cast<double>(n), 0.0);
}

Var bce_with_logits(Var logits, const Tensor& targets) {
  const Tensor& z = logits.value();
  require_same_shape(z, targets, "bce_with_logits");
  const std::size_t n = z.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // max(z,0) - z*y + log(1 + exp(-|z|)) is the stable form.
    acc += std::max(z[i], 0.0) - z[i] * targets[i] + std::log1p(std::exp(-std::abs(z[i])));
  }
  const double scale = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
  const int zi = logits.id;
  return logits.tape->record(Tensor::scalar(acc * scale), {zi}, [zi, targets, scale](Tape& t, const Tensor& g) {
    const Tensor& zv = t.value(Var{&t, zi});
    Tensor& s = t.grad_slot(zi);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double p = 1.0 / (1.0 + std::exp(-zv[i]));
      s[i] += g[0] * scale * (p - targets[i]);
    }
  });
}

Var mse(Var pred, const Tensor& target) {
  const Tensor& p = pred.value();
  require_same_shape(p, target, "mse");
  const std::size_t n = p.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += (p[i] - target[i]) * (p[i] - target[i]);
  const double scale = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
  const int pi = pred.id;
  return pred.tape->record(Tensor::scalar(acc * scale), {pi}, [pi, target, scale](Tape& t, const Tensor& g) {
    const Tensor& pv = t.value(Var{&t, pi});
    Tensor& s = t.grad_slot(pi);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += g[0] * scale * 2.0 * (pv[i] - target[i]);
  });
}

}  // namespace gn
