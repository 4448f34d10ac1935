// Serial reference kernels against their OpenMP versions, plus one whole
// block application. Pass --benchmark_filter to pick a subset.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <thread>

#include "gn/block.hpp"
#include "gn/kernels.hpp"
#include "gn/random.hpp"
#include "gn/variants.hpp"

namespace {

using namespace gn;

Tensor random_tensor(Rng& rng, std::size_t rows, std::size_t cols) {
  Tensor t(rows, cols);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1, 1);
  return t;
}

int max_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

// state.range(0): rows, state.range(1): 0 serial, 1 OpenMP.
void BM_Linear(benchmark::State& state) {
  Rng rng(1);
  const auto rows = static_cast<std::size_t>(state.range(0));
  Tensor x = random_tensor(rng, rows, 64), w = random_tensor(rng, 64, 64), b = random_tensor(rng, 1, 64);
  Tensor out(rows, 64);
  kernels::set_num_threads(max_threads());
  for (auto _ : state) {
    if (state.range(1)) kernels::linear(x, w, &b, out);
    else kernels::serial::linear(x, w, &b, out);
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rows * 64 * 64));
}

void BM_AccumulateAtB(benchmark::State& state) {
  Rng rng(2);
  const auto rows = static_cast<std::size_t>(state.range(0));
  Tensor a = random_tensor(rng, rows, 64), g = random_tensor(rng, rows, 64);
  Tensor out(64, 64);
  kernels::set_num_threads(max_threads());
  for (auto _ : state) {
    if (state.range(1)) kernels::accumulate_at_b(a, g, out);
    else kernels::serial::accumulate_at_b(a, g, out);
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rows * 64 * 64));
}

void BM_SegmentSum(benchmark::State& state) {
  Rng rng(3);
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t groups = rows / 8;
  std::vector<int> ids(rows);
  for (auto& id : ids) id = static_cast<int>(rng.below(groups));
  auto seg = make_grouping(ids, groups);
  Tensor x = random_tensor(rng, rows, 64);
  Tensor out(groups, 64);
  kernels::set_num_threads(max_threads());
  for (auto _ : state) {
    std::fill(out.values().begin(), out.values().end(), 0.0);
    if (state.range(1)) kernels::segment_sum(x, *seg, out);
    else kernels::serial::segment_sum(x, *seg, out);
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rows * 64));
}

// A full GN block over one graph with range(0) nodes and 4x as many edges;
// range(1) is the thread count.
void BM_ApplyBlock(benchmark::State& state) {
  Rng rng(4);
  BlockHyper h;
  h.hidden = {64, 64};
  GNConfig c = make_variant("full_gn", BlockDims{16, 16, 16, 16, 16, 16}, h);
  ParameterStore ps;
  GNBlock(c, "").init(ps, rng);
  Graph g;
  const auto n = static_cast<std::size_t>(state.range(0));
  g.global_attr.assign(16, 0.5);
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back(AttrVector(16, rng.uniform(-1, 1)));
  for (std::size_t k = 0; k < 4 * n; ++k)
    g.edges.push_back(Edge{AttrVector(16, rng.uniform(-1, 1)), int(rng.below(n)), int(rng.below(n)), 0});
  kernels::set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(apply_block(g, c, ps));
}

void kernel_args(benchmark::internal::Benchmark* b) {
  for (int rows : {256, 4096, 65536})
    for (int parallel : {0, 1}) b->Args({rows, parallel});
  b->ArgNames({"rows", "omp"});
}

}  // namespace

BENCHMARK(BM_Linear)->Apply(kernel_args);
BENCHMARK(BM_AccumulateAtB)->Apply(kernel_args);
BENCHMARK(BM_SegmentSum)->Apply(kernel_args);
BENCHMARK(BM_ApplyBlock)->Apply([](benchmark::internal::Benchmark* b) {
  for (int nodes : {64, 1024}) {
    b->Args({nodes, 1});
    if (max_threads() > 1) b->Args({nodes, max_threads()});
  }
  b->ArgNames({"nodes", "threads"});
});

BENCHMARK_MAIN();
