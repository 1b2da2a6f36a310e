#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "peagnn/layers.hpp"
#include "peagnn/metapath.hpp"

using namespace peagnn;

namespace {

struct LayerBench {
    Hin hin = bench::scaled_hin();
    Csr raw;
    LayerBench() {
        Metapath umu = parse_metapath(hin, "U-M-U");
        raw = derive_step_adjacencies(umu, hin).hops[0];
    }
};

void BM_layer_forward(benchmark::State& state) {
    static LayerBench fixture;
    const LayerKind kind = static_cast<LayerKind>(state.range(0));
    Rng rng(13);
    auto prep = prepare_step<float>(kind, fixture.raw);
    LayerParams p = init_layer_params<float>(kind, 64, 16, rng);
    Tensor x = Tensor::uniform(fixture.hin.n_nodes(), 64, -1.0f, 1.0f, rng);
    for (auto _ : state) {
        Tensor y = layer_step<float>(nullptr, x, prep, p);
        benchmark::DoNotOptimize(y.data.data());
    }
}
BENCHMARK(BM_layer_forward)
    ->Arg(static_cast<int>(LayerKind::Gcn))
    ->Arg(static_cast<int>(LayerKind::Gat))
    ->Arg(static_cast<int>(LayerKind::Sage));

void BM_layer_forward_backward(benchmark::State& state) {
    static LayerBench fixture;
    const LayerKind kind = static_cast<LayerKind>(state.range(0));
    Rng rng(17);
    auto prep = prepare_step<float>(kind, fixture.raw);
    LayerParams p = init_layer_params<float>(kind, 64, 16, rng);
    Tensor x = Tensor::uniform(fixture.hin.n_nodes(), 64, -1.0f, 1.0f, rng);
    for (auto _ : state) {
        Tape tape;
        LayerParams watched = p;
        watched.w = tape.leaf(p.w);
        if (p.w_self.size()) watched.w_self = tape.leaf(p.w_self);
        if (p.attn.size()) watched.attn = tape.leaf(p.attn);
        Tensor wx = tape.leaf(x);
        Tensor loss = mean_all(&tape, layer_step(&tape, wx, prep, watched));
        tape.backward(loss);
        benchmark::DoNotOptimize(tape.grad(wx).data.data());
    }
}
BENCHMARK(BM_layer_forward_backward)
    ->Arg(static_cast<int>(LayerKind::Gcn))
    ->Arg(static_cast<int>(LayerKind::Gat))
    ->Arg(static_cast<int>(LayerKind::Sage));

}  // namespace
