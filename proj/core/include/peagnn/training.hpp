#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "peagnn/adam.hpp"
#include "peagnn/evaluation.hpp"
#include "peagnn/model.hpp"
#include "peagnn/split.hpp"

namespace peagnn {

struct TrainConfig {
    std::size_t batch_size = 1024;
    double lr = 0.001;
    double lambda = 0.1;  // entity-awareness weight, 0 disables the term
    std::size_t epochs = 100;
    std::size_t patience = 10;
    std::uint64_t seed = 1;
    LayerKind layer = LayerKind::Sage;
    std::size_t neg_ratio = 4;
    std::size_t embed_dim = 64;
    std::size_t repr_dim = 16;
    std::size_t hidden_dim = 64;
    std::size_t n_candidates = 100;
    std::size_t threads = 1;
};

struct EpochStats {
    double loss_cf = 0.0;
    double loss_entity = 0.0;
    std::size_t n_batches = 0;
    std::size_t n_contrast = 0;
    std::size_t n_contrast_skipped = 0;
};

struct HistoryRow {
    std::size_t epoch;
    double loss_cf, loss_entity, val_hr10, val_ndcg10, seconds;
};

struct FitResult {
    ModelParams best_params;
    std::size_t best_epoch = 0;
    double best_val_hr = 0.0;
    double best_val_ndcg = 0.0;
    std::vector<HistoryRow> history;
    bool aborted = false;  // non-finite loss: best checkpoint still returned
};

// One pass over the given triples: shuffle, batch, forward, BPR +
// lambda * entity loss, backward, Adam.
EpochStats train_epoch(ModelParams& params, Adam& adam, const PreparedGraph& graph,
                       const FeatureIndex& features, std::vector<Triple> triples,
                       const TrainConfig& cfg, Rng& rng);

// Full training run: fresh negatives per epoch, HR@10 early stopping on
// the validation positives, returns the best checkpoint plus history.
// `log` (optional) receives one line per epoch.
FitResult fit(const Hin& train_hin, const SplitDataset& split,
              const std::vector<Metapath>& metapaths, const TrainConfig& cfg,
              const std::function<void(const std::string&)>& log = {});

std::string history_csv(const std::vector<HistoryRow>& history);

}  // namespace peagnn
