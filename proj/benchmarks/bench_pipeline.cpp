#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "peagnn/evaluation.hpp"
#include "peagnn/training.hpp"

using namespace peagnn;

namespace {

struct PipelineBench {
    Hin hin = bench::scaled_hin();
    SplitDataset split;
    Hin train_hin;
    std::vector<Metapath> metapaths;
    PreparedGraph graph;
    ModelParams params;
    FeatureIndex features{Hin{}};

    PipelineBench() {
        split = leave_one_out_split(hin, 3);
        train_hin = restrict_interactions(hin, split.train_pos);
        metapaths = {parse_metapath(train_hin, "U-M-U"), parse_metapath(train_hin, "M-U-M"),
                     parse_metapath(train_hin, "Y-M-U"), parse_metapath(train_hin, "G-M-U")};
        graph = prepare_graph<float>(train_hin, metapaths, LayerKind::Sage);
        Rng rng(1);
        params = init_model_params<float>(graph, train_hin.n_nodes(), 64, 16, 64,
                                          LayerKind::Sage, rng);
        features = FeatureIndex(train_hin);
    }
};

PipelineBench& fixture() {
    static PipelineBench f;
    return f;
}

void BM_train_batch_1024(benchmark::State& state) {
    auto& f = fixture();
    TrainConfig cfg;
    cfg.batch_size = 1024;
    cfg.embed_dim = 64;
    cfg.repr_dim = 16;
    cfg.hidden_dim = 64;
    Rng neg(5);
    auto triples = sample_train_negatives(f.split, f.train_hin, 4, neg);
    triples.resize(1024);
    Adam adam(0.001f);
    ModelParams params = f.params;
    Rng erng(7);
    for (auto _ : state) {
        EpochStats stats = train_epoch(params, adam, f.graph, f.features, triples, cfg, erng);
        benchmark::DoNotOptimize(stats.loss_cf);
    }
}
BENCHMARK(BM_train_batch_1024)->Unit(benchmark::kMillisecond);

void BM_forward_all(benchmark::State& state) {
    auto& f = fixture();
    for (auto _ : state) {
        FusedRepr fused = forward_all<float>(nullptr, f.params, f.graph);
        benchmark::DoNotOptimize(fused.e_user.data.data());
    }
}
BENCHMARK(BM_forward_all)->Unit(benchmark::kMillisecond);

void BM_evaluate_100_candidates(benchmark::State& state) {
    auto& f = fixture();
    Rng rng(11);
    auto candidates = sample_eval_candidates(f.split.test_pos, f.split, f.hin, 100, rng);
    for (auto _ : state) {
        EvalReport r = evaluate_leave_one_out(f.params, f.graph, f.split.test_pos, candidates,
                                              10, static_cast<std::size_t>(state.range(0)));
        benchmark::DoNotOptimize(r.hr_at_10);
    }
}
BENCHMARK(BM_evaluate_100_candidates)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
