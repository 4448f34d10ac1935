#include "gn/kernels.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gn {

std::shared_ptr<const Grouping> make_grouping(std::vector<int> ids, std::size_t n_groups) {
  auto g = std::make_shared<Grouping>();
  g->n_groups = n_groups;
  g->offsets.assign(n_groups + 1, 0);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const int id = ids[r];
    if (id < 0 || static_cast<std::size_t>(id) >= n_groups) {
      throw ShapeError("group id " + std::to_string(id) + " at row " + std::to_string(r) +
                       " outside [0, " + std::to_string(n_groups) + ")");
    }
    ++g->offsets[id + 1];
  }
  for (std::size_t i = 0; i < n_groups; ++i) g->offsets[i + 1] += g->offsets[i];
  g->members.resize(ids.size());
  std::vector<std::size_t> cursor(g->offsets.begin(), g->offsets.end() - 1);
  // Counting sort keeps rows ascending within each group.
  for (std::size_t r = 0; r < ids.size(); ++r) g->members[cursor[ids[r]]++] = static_cast<int>(r);
  g->ids = std::move(ids);
  return g;
}

namespace kernels {
namespace {

int g_threads = 1;

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 14;

bool go_parallel(std::size_t work) { return g_threads > 1 && work >= kParallelWork; }

void check_linear(const Tensor& x, const Tensor& w, const Tensor* b, const Tensor& out) {
  if (x.cols() != w.rows()) {
    throw ShapeError("linear: input " + shape_str(x) + " does not match weight " + shape_str(w));
  }
  if (b && (b->rows() != 1 || b->cols() != w.cols())) {
    throw ShapeError("linear: bias " + shape_str(*b) + " does not match weight " + shape_str(w));
  }
  if (out.rows() != x.rows() || out.cols() != w.cols()) throw ShapeError("linear: bad output shape");
}

inline void linear_row(const Tensor& x, const Tensor& w, const Tensor* b, Tensor& out, std::size_t i) {
  const std::size_t in = w.rows();
  const std::size_t o = w.cols();
  double* dst = out.data() + i * o;
  const double* src = x.data() + i * in;
  std::fill(dst, dst + o, 0.0);
  for (std::size_t k = 0; k < in; ++k) {
    const double a = src[k];
    const double* wr = w.data() + k * o;
    for (std::size_t j = 0; j < o; ++j) dst[j] += a * wr[j];
  }
  if (b) {
    for (std::size_t j = 0; j < o; ++j) dst[j] += (*b)[j];
  }
}

inline void at_b_row(const Tensor& a, const Tensor& g, Tensor& out, std::size_t k) {
  const std::size_t o = g.cols();
  double* dst = out.data() + k * o;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double s = a(i, k);
    const double* gr = g.data() + i * o;
    for (std::size_t j = 0; j < o; ++j) dst[j] += s * gr[j];
  }
}

inline void a_bt_row(const Tensor& g, const Tensor& w, Tensor& out, std::size_t i) {
  const std::size_t o = g.cols();
  const double* gr = g.data() + i * o;
  double* dst = out.data() + i * w.rows();
  for (std::size_t k = 0; k < w.rows(); ++k) {
    const double* wr = w.data() + k * o;
    double acc = 0.0;
    for (std::size_t j = 0; j < o; ++j) acc += gr[j] * wr[j];
    dst[k] += acc;
  }
}

// Total order on binary64 bit patterns (negatives reversed, -0 before +0).
inline std::uint64_t order_key(double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, sizeof b);
  return (b >> 63) ? ~b : (b | (std::uint64_t{1} << 63));
}

// Members of group g ordered by their row values. Summing in this order
// depends only on the multiset of rows, never on how rows are labelled.
inline void canonical_members(const Tensor& x, const Grouping& seg, std::size_t g, std::vector<int>& order) {
  order.assign(seg.members.begin() + static_cast<std::ptrdiff_t>(seg.offsets[g]),
               seg.members.begin() + static_cast<std::ptrdiff_t>(seg.offsets[g + 1]));
  if (order.size() < 2) return;
  const std::size_t d = x.cols();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double* ra = x.data() + static_cast<std::size_t>(a) * d;
    const double* rb = x.data() + static_cast<std::size_t>(b) * d;
    for (std::size_t j = 0; j < d; ++j) {
      const std::uint64_t ka = order_key(ra[j]), kb = order_key(rb[j]);
      if (ka != kb) return ka < kb;
    }
    return false;
  });
}

inline void segment_sum_group(const Tensor& x, const Grouping& seg, Tensor& out, std::size_t g,
                              std::vector<int>& order) {
  const std::size_t d = x.cols();
  double* dst = out.data() + g * d;
  canonical_members(x, seg, g, order);
  for (int r : order) {
    const double* src = x.data() + static_cast<std::size_t>(r) * d;
    for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
  }
}

inline void segment_max_group(const Tensor& x, const Grouping& seg, Tensor& out,
                              std::vector<int>& argmax, std::size_t g) {
  const std::size_t d = x.cols();
  for (std::size_t j = 0; j < d; ++j) {
    int best = -1;
    double v = 0.0;
    for (std::size_t m = seg.offsets[g]; m < seg.offsets[g + 1]; ++m) {
      const int r = seg.members[m];
      const double c = x(static_cast<std::size_t>(r), j);
      if (best < 0 || c > v) {
        best = r;
        v = c;
      }
    }
    out(g, j) = v;
    argmax[g * d + j] = best;
  }
}

void check_grouped(const Tensor& x, const Grouping& seg, const Tensor& out, const char* what) {
  if (x.rows() != seg.n_rows() || out.rows() != seg.n_groups || out.cols() != x.cols()) {
    throw ShapeError(std::string(what) + ": input " + shape_str(x) + " / output " + shape_str(out) +
                     " do not match grouping of " + std::to_string(seg.n_rows()) + " rows into " +
                     std::to_string(seg.n_groups) + " groups");
  }
}

}  // namespace

void set_num_threads(int n) { g_threads = std::max(1, n); }
int num_threads() { return g_threads; }

namespace serial {

void linear(const Tensor& x, const Tensor& w, const Tensor* b, Tensor& out) {
  check_linear(x, w, b, out);
  for (std::size_t i = 0; i < x.rows(); ++i) linear_row(x, w, b, out, i);
}

void accumulate_at_b(const Tensor& a, const Tensor& g, Tensor& out) {
  if (a.rows() != g.rows() || out.rows() != a.cols() || out.cols() != g.cols()) {
    throw ShapeError("accumulate_at_b: shape mismatch");
  }
  // Row-outer order: each out entry still sums over i ascending.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double s = a(i, k);
      for (std::size_t j = 0; j < g.cols(); ++j) out(k, j) += s * g(i, j);
    }
  }
}

void accumulate_a_bt(const Tensor& g, const Tensor& w, Tensor& out) {
  if (g.cols() != w.cols() || out.rows() != g.rows() || out.cols() != w.rows()) {
    throw ShapeError("accumulate_a_bt: shape mismatch");
  }
  for (std::size_t i = 0; i < g.rows(); ++i) a_bt_row(g, w, out, i);
}

void accumulate_col_sums(const Tensor& g, Tensor& out) {
  if (out.rows() != 1 || out.cols() != g.cols()) throw ShapeError("accumulate_col_sums: shape mismatch");
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) out[j] += g(i, j);
  }
}

void gather_rows(const Tensor& x, const Grouping& idx, Tensor& out) {
  if (x.rows() != idx.n_groups || out.rows() != idx.n_rows() || out.cols() != x.cols()) {
    throw ShapeError("gather_rows: shape mismatch");
  }
  for (std::size_t r = 0; r < idx.n_rows(); ++r) {
    const auto src = x.row_span(static_cast<std::size_t>(idx.ids[r]));
    std::copy(src.begin(), src.end(), out.row_span(r).begin());
  }
}

void segment_sum(const Tensor& x, const Grouping& seg, Tensor& out) {
  check_grouped(x, seg, out, "segment_sum");
  std::vector<int> order;
  for (std::size_t g = 0; g < seg.n_groups; ++g) {
    canonical_members(x, seg, g, order);
    const auto dst = out.row_span(g);
    for (int r : order) {
      const auto src = x.row_span(static_cast<std::size_t>(r));
      for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
    }
  }
}

void segment_max(const Tensor& x, const Grouping& seg, Tensor& out, std::vector<int>& argmax) {
  check_grouped(x, seg, out, "segment_max");
  const std::size_t d = x.cols();
  argmax.assign(seg.n_groups * d, -1);
  std::fill(out.values().begin(), out.values().end(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const std::size_t g = static_cast<std::size_t>(seg.ids[r]);
    for (std::size_t j = 0; j < d; ++j) {
      int& best = argmax[g * d + j];
      if (best < 0 || x(r, j) > out(g, j)) {
        best = static_cast<int>(r);
        out(g, j) = x(r, j);
      }
    }
  }
}

}  // namespace serial

void linear(const Tensor& x, const Tensor& w, const Tensor* b, Tensor& out) {
  check_linear(x, w, b, out);
  const auto n = static_cast<long long>(x.rows());
#pragma omp parallel for schedule(static) num_threads(g_threads) if (go_parallel(x.rows() * w.size()))
  for (long long i = 0; i < n; ++i) linear_row(x, w, b, out, static_cast<std::size_t>(i));
}

void accumulate_at_b(const Tensor& a, const Tensor& g, Tensor& out) {
  if (a.rows() != g.rows() || out.rows() != a.cols() || out.cols() != g.cols()) {
    throw ShapeError("accumulate_at_b: shape mismatch");
  }
  const auto n = static_cast<long long>(a.cols());
#pragma omp parallel for schedule(static) num_threads(g_threads) if (go_parallel(a.size() * g.cols()))
  for (long long k = 0; k < n; ++k) at_b_row(a, g, out, static_cast<std::size_t>(k));
}

void accumulate_a_bt(const Tensor& g, const Tensor& w, Tensor& out) {
  if (g.cols() != w.cols() || out.rows() != g.rows() || out.cols() != w.rows()) {
    throw ShapeError("accumulate_a_bt: shape mismatch");
  }
  const auto n = static_cast<long long>(g.rows());
#pragma omp parallel for schedule(static) num_threads(g_threads) if (go_parallel(g.rows() * w.size()))
  for (long long i = 0; i < n; ++i) a_bt_row(g, w, out, static_cast<std::size_t>(i));
}

void accumulate_col_sums(const Tensor& g, Tensor& out) {
  if (out.rows() != 1 || out.cols() != g.cols()) throw ShapeError("accumulate_col_sums: shape mismatch");
  const auto n = static_cast<long long>(g.cols());
#pragma omp parallel for schedule(static) num_threads(g_threads) if (go_parallel(g.size()))
  for (long long j = 0; j < n; ++j) {
    double acc = out[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < g.rows(); ++i) acc += g(i, static_cast<std::size_t>(j));
    out[static_cast<std::size_t>(j)] = acc;
  }
}

void gather_rows(const Tensor& x, const Grouping& idx, Tensor& out) {
  if (x.rows() != idx.n_groups || out.rows() != idx.n_rows() || out.cols() != x.cols()) {
    throw ShapeError("gather_rows: shape mismatch");
  }
  const auto n = static_cast<long long>(idx.n_rows());
#pragma omp parallel for schedule(static) num_threads(g_threads) if (go_parallel(out.size()))
  for (long long r = 0; r < n; ++r) {
    const auto src = x.row_span(static_cast<std::size_t>(idx.ids[static_cast<std::size_t>(r)]));
    std::copy(src.begin(), src.end(), out.row_span(static_cast<std::size_t>(r)).begin());
  }
}

void segment_sum(const Tensor& x, const Grouping& seg, Tensor& out) {
  check_grouped(x, seg, out, "segment_sum");
  const auto n = static_cast<long long>(seg.n_groups);
#pragma omp parallel num_threads(g_threads) if (go_parallel(x.size()))
  {
    std::vector<int> order;
#pragma omp for schedule(static)
    for (long long g = 0; g < n; ++g) segment_sum_group(x, seg, out, static_cast<std::size_t>(g), order);
  }
}

void segment_max(const Tensor& x, const Grouping& seg, Tensor& out, std::vector<int>& argmax) {
  check_grouped(x, seg, out, "segment_max");
  argmax.assign(seg.n_groups * x.cols(), -1);
  const auto n = static_cast<long long>(seg.n_groups);
#pragma omp parallel for schedule(static) num_threads(g_threads) if (go_parallel(x.size()))
  for (long long g = 0; g < n; ++g) segment_max_group(x, seg, out, argmax, static_cast<std::size_t>(g));
}

}  // namespace kernels
}  // namespace gn
