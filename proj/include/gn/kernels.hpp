#pragma once

// Row-parallel numeric kernels behind the tape operations.
//
// Every kernel has a plain serial reference in kernels::serial and an
// OpenMP version in kernels. Both fold each output entry over its inputs in
// the same order, so they agree bit for bit at any thread count. Segment
// sums fold each group's rows in value order, which makes them independent
// of how rows are numbered.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "gn/tensor.hpp"

namespace gn {

/// Assignment of rows to groups (edge -> receiver, node -> graph, gather
/// index -> source row), with a CSR view listing each group's rows in
/// ascending order.
struct Grouping {
  std::vector<int> ids;
  std::size_t n_groups = 0;
  std::vector<std::size_t> offsets;
  std::vector<int> members;

  std::size_t n_rows() const { return ids.size(); }
  std::size_t group_size(std::size_t g) const { return offsets[g + 1] - offsets[g]; }
};

/// Throws ShapeError when an id falls outside [0, n_groups).
std::shared_ptr<const Grouping> make_grouping(std::vector<int> ids, std::size_t n_groups);

namespace kernels {

/// Threads used by the OpenMP kernels; 1 disables parallel regions.
void set_num_threads(int n);
int num_threads();

// out[n x o] = x[n x i] * w[i x o] (+ b[1 x o])
void linear(const Tensor& x, const Tensor& w, const Tensor* b, Tensor& out);
// out[i x o] += a[n x i]^T * g[n x o]
void accumulate_at_b(const Tensor& a, const Tensor& g, Tensor& out);
// out[n x i] += g[n x o] * w[i x o]^T
void accumulate_a_bt(const Tensor& g, const Tensor& w, Tensor& out);
// out[1 x o] += column sums of g
void accumulate_col_sums(const Tensor& g, Tensor& out);

// out[r] = x[grouping.ids[r]]
void gather_rows(const Tensor& x, const Grouping& idx, Tensor& out);
// out[g] += sum of x rows assigned to g
void segment_sum(const Tensor& x, const Grouping& seg, Tensor& out);
// out[g] = elementwise max over rows in g (0 for empty groups); argmax holds
// the first maximising row per entry, -1 when empty.
void segment_max(const Tensor& x, const Grouping& seg, Tensor& out, std::vector<int>& argmax);

namespace serial {
void linear(const Tensor& x, const Tensor& w, const Tensor* b, Tensor& out);
void accumulate_at_b(const Tensor& a, const Tensor& g, Tensor& out);
void accumulate_a_bt(const Tensor& g, const Tensor& w, Tensor& out);
void accumulate_col_sums(const Tensor& g, Tensor& out);
void gather_rows(const Tensor& x, const Grouping& idx, Tensor& out);
void segment_sum(const Tensor& x, const Grouping& seg, Tensor& out);
void segment_max(const Tensor& x, const Grouping& seg, Tensor& out, std::vector<int>& argmax);
}  // namespace serial

}  // namespace kernels
}  // namespace gn
