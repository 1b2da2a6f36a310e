#include "peagnn/training.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace peagnn {

EpochStats train_epoch(ModelParams& params, Adam& adam, const PreparedGraph& graph,
                       const FeatureIndex& features, std::vector<Triple> triples,
                       const TrainConfig& cfg, Rng& rng) {
    rng.shuffle(triples);
    EpochStats stats;
    const float lambda = static_cast<float>(cfg.lambda);
    for (std::size_t start = 0; start < triples.size(); start += cfg.batch_size) {
        const std::size_t end = std::min(triples.size(), start + cfg.batch_size);
        std::vector<std::size_t> users, pos, neg;
        std::vector<Triple> batch(triples.begin() + start, triples.begin() + end);
        users.reserve(batch.size());
        pos.reserve(batch.size());
        neg.reserve(batch.size());
        for (const auto& t : batch) {
            users.push_back(t.user);
            pos.push_back(t.pos_item);
            neg.push_back(t.neg_item);
        }

        Tape tape;
        ModelParams watched = watch_params(tape, params);
        FusedRepr fused = forward_all(&tape, watched, graph);
        Tensor s_pos = score_pairs(&tape, fused, watched, users, pos);
        Tensor s_neg = score_pairs(&tape, fused, watched, users, neg);
        Tensor l_cf = bpr_loss(&tape, s_pos, s_neg);

        Tensor l_entity = Tensor::scalar(0.0f);
        if (lambda > 0.0f) {
            ContrastBatch cb = build_contrast_batch(features, batch, rng);
            stats.n_contrast += cb.size();
            stats.n_contrast_skipped += cb.n_skipped;
            l_entity = entity_loss(&tape, watched.embeddings, cb);
        }
        Tensor loss = total_loss(&tape, l_cf, l_entity, lambda);
        if (!loss.all_finite())
            throw TrainAbort("non-finite training loss at batch " +
                             std::to_string(stats.n_batches));
        tape.backward(loss);
        adam.step(params, watched, tape);

        stats.loss_cf += l_cf.item();
        stats.loss_entity += l_entity.item();
        stats.n_batches++;
    }
    if (stats.n_batches) {
        stats.loss_cf /= static_cast<double>(stats.n_batches);
        stats.loss_entity /= static_cast<double>(stats.n_batches);
    }
    return stats;
}

FitResult fit(const Hin& train_hin, const SplitDataset& split,
              const std::vector<Metapath>& metapaths, const TrainConfig& cfg,
              const std::function<void(const std::string&)>& log) {
    const Rng root(cfg.seed);
    Rng init_rng = root.fork(0xA11);
    Rng cand_rng = root.fork(0xCA9D);

    PreparedGraph graph = prepare_graph<float>(train_hin, metapaths, cfg.layer);
    ModelParams params = init_model_params<float>(graph, train_hin.n_nodes(), cfg.embed_dim,
                                                  cfg.repr_dim, cfg.hidden_dim, cfg.layer,
                                                  init_rng);
    FeatureIndex features(train_hin);
    Adam adam(static_cast<float>(cfg.lr));

    const auto val_candidates =
        sample_eval_candidates(split.val_pos, split, train_hin, cfg.n_candidates, cand_rng);

    FitResult result;
    result.best_params = params;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        Rng neg_rng = root.fork(0x9e90000 + epoch);
        Rng epoch_rng = root.fork(0xe90c000 + epoch);

        EpochStats stats;
        try {
            std::vector<Triple> triples =
                sample_train_negatives(split, train_hin, cfg.neg_ratio, neg_rng);
            stats = train_epoch(params, adam, graph, features, std::move(triples), cfg,
                                epoch_rng);
        } catch (const TrainAbort& e) {
            if (log) log(std::string("training aborted: ") + e.what());
            result.aborted = true;
            break;
        }

        EvalReport val = evaluate_leave_one_out(params, graph, split.val_pos, val_candidates,
                                                10, cfg.threads);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.history.push_back({epoch, stats.loss_cf, stats.loss_entity, val.hr_at_10,
                                  val.ndcg_at_10, seconds});
        if (log) {
            std::ostringstream os;
            os << "epoch " << epoch << " loss_cf " << stats.loss_cf << " loss_entity "
               << stats.loss_entity << " val_hr10 " << val.hr_at_10 << " val_ndcg10 "
               << val.ndcg_at_10 << " (" << seconds << "s)";
            log(os.str());
        }

        if (val.hr_at_10 > result.best_val_hr) {
            result.best_val_hr = val.hr_at_10;
            result.best_val_ndcg = val.ndcg_at_10;
            result.best_epoch = epoch;
            result.best_params = params;
        }
        if (epoch - result.best_epoch >= cfg.patience) break;
    }
    return result;
}

std::string history_csv(const std::vector<HistoryRow>& history) {
    std::ostringstream os;
    os << "epoch,loss_cf,loss_entity,val_hr10,val_ndcg10,seconds\n";
    for (const auto& row : history) {
        os << row.epoch << "," << row.loss_cf << "," << row.loss_entity << "," << row.val_hr10
           << "," << row.val_ndcg10 << "," << row.seconds << "\n";
    }
    return os.str();
}

}  // namespace peagnn
