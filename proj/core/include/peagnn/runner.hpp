#pragma once

#include <functional>
#include <string>
#include <vector>

#include "peagnn/config.hpp"
#include "peagnn/evaluation.hpp"
#include "peagnn/hin.hpp"
#include "peagnn/movielens.hpp"
#include "peagnn/training.hpp"

namespace peagnn {

using LogFn = std::function<void(const std::string&)>;

// ingest + k-core + serialize; returns post-filter statistics.
HinStats run_ingest(const std::string& data_dir, const std::string& out_dir, std::size_t kcore,
                    const LogFn& log = {});

// Resolved inputs shared by the train/evaluate/ablate commands.
struct PreparedRun {
    Hin hin;          // filtered full graph (train + held-out interactions)
    Hin train_hin;    // propagation graph: train interactions only
    SplitDataset split;
    std::vector<Metapath> metapaths;
    std::string hin_hash;
};

PreparedRun prepare_run(const RunConfig& cfg);

struct TrainOutcome {
    FitResult fit;
    EvalReport test_report;
    std::string checkpoint_dir;
};

// Trains per the config, writes config.json, history.csv and the best
// checkpoint into out_dir, then reports test metrics for the checkpoint.
TrainOutcome run_train(const RunConfig& cfg, const LogFn& log = {});

// Loads a checkpoint and evaluates it on the config's test protocol.
EvalReport run_evaluate(const RunConfig& cfg, const std::string& checkpoint_dir,
                        const LogFn& log = {}, const std::string& per_user_csv = "");

struct AblationRow {
    std::uint64_t seed;
    double hr_full, hr_dropped, delta_pct;
    double ndcg_full, ndcg_dropped;
};

// Retrains from scratch without the named metapath and reports the
// percentage HR@10 change per seed.
std::vector<AblationRow> run_ablate(const RunConfig& cfg, const std::string& drop,
                                    const std::vector<std::uint64_t>& seeds,
                                    const LogFn& log = {});

std::string ablation_csv(const std::vector<AblationRow>& rows);

// Mean fusion attention per metapath from a trained checkpoint.
std::vector<AttentionRow> run_attention(const RunConfig& cfg, const std::string& checkpoint_dir,
                                        const LogFn& log = {});

std::string attention_csv(const std::vector<AttentionRow>& rows);
std::string per_user_csv(const EvalReport& report);

}  // namespace peagnn
