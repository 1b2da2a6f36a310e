#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "peagnn/csr.hpp"
#include "peagnn/tape.hpp"

using namespace peagnn;

namespace {

Csr scaled_adjacency(std::size_t v, std::size_t nnz, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Coo<float>> edges;
    edges.reserve(nnz);
    for (std::size_t k = 0; k < nnz; ++k) edges.push_back({rng.below(v), rng.below(v), 1.0f});
    return csr_from_edges(v, v, std::move(edges));
}

void BM_spmm(benchmark::State& state) {
    const std::size_t v = 2933, d = static_cast<std::size_t>(state.range(0));
    Csr a = scaled_adjacency(v, 80000, 3);
    Rng rng(5);
    Tensor x = Tensor::uniform(v, d, -1.0f, 1.0f, rng);
    Tensor y;
    for (auto _ : state) {
        spmm_into(a, x, y);
        benchmark::DoNotOptimize(y.data.data());
    }
    state.SetItemsProcessed(state.iterations() * a.nnz() * d);
}
BENCHMARK(BM_spmm)->Arg(16)->Arg(64);

void BM_matmul_embed_project(benchmark::State& state) {
    Rng rng(7);
    Tensor a = Tensor::uniform(2933, 64, -1.0f, 1.0f, rng);
    Tensor b = Tensor::uniform(64, 16, -1.0f, 1.0f, rng);
    for (auto _ : state) {
        Tensor y = matmul<float>(nullptr, a, b);
        benchmark::DoNotOptimize(y.data.data());
    }
    state.SetItemsProcessed(state.iterations() * 2933 * 64 * 16);
}
BENCHMARK(BM_matmul_embed_project);

void BM_csr_from_edges(benchmark::State& state) {
    Rng rng(9);
    std::vector<Coo<float>> edges;
    for (int k = 0; k < 80000; ++k)
        edges.push_back({rng.below(2933), rng.below(2933), 1.0f});
    for (auto _ : state) {
        Csr m = csr_from_edges<float>(2933, 2933, edges);
        benchmark::DoNotOptimize(m.values.data());
    }
}
BENCHMARK(BM_csr_from_edges);

void BM_transpose(benchmark::State& state) {
    Csr a = scaled_adjacency(2933, 80000, 11);
    for (auto _ : state) {
        Csr t = transpose(a);
        benchmark::DoNotOptimize(t.values.data());
    }
}
BENCHMARK(BM_transpose);

}  // namespace
