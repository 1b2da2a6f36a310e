#include "peagnn/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "peagnn/checkpoint.hpp"
#include "peagnn/errors.hpp"
#include "peagnn/hin_io.hpp"
#include "peagnn/metapath.hpp"

namespace fs = std::filesystem;

namespace peagnn {

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write " + path);
    out << text;
}

std::vector<Metapath> resolve_metapaths(const Hin& hin, const std::vector<std::string>& names) {
    if (names.empty()) return default_metapaths_movielens(hin);
    std::vector<Metapath> out;
    for (const auto& n : names) out.push_back(parse_metapath(hin, n));
    return out;
}

}  // namespace

HinStats run_ingest(const std::string& data_dir, const std::string& out_dir, std::size_t kcore,
                    const LogFn& log) {
    Hin raw = ingest_movielens_small(data_dir);
    if (log) {
        const HinStats s = hin_stats(raw);
        std::ostringstream os;
        os << "raw graph: " << s.n_users << " users, " << s.n_items << " items, "
           << s.n_interactions << " interactions, " << s.n_nodes << " nodes";
        log(os.str());
    }
    Hin filtered = kcore == 0 ? std::move(raw) : kcore_filter(raw, kcore);
    const HinStats s = hin_stats(filtered);
    if (log) {
        std::ostringstream os;
        os << kcore << "-core graph: " << s.n_users << " users, " << s.n_items << " items, "
           << s.n_interactions << " interactions, " << s.n_nodes << " nodes";
        log(os.str());
    }
    save_hin(filtered, out_dir);
    return s;
}

PreparedRun prepare_run(const RunConfig& cfg) {
    PreparedRun run;
    if (!cfg.hin_dir.empty()) {
        run.hin = load_hin(cfg.hin_dir);
    } else if (!cfg.data_dir.empty()) {
        Hin raw = ingest_movielens_small(cfg.data_dir);
        run.hin = cfg.kcore == 0 ? std::move(raw) : kcore_filter(raw, cfg.kcore);
    } else {
        throw ConfigError("config needs data_dir or hin_dir");
    }
    run.hin_hash = hin_content_hash(run.hin);
    run.split = leave_one_out_split(run.hin, cfg.seed);
    run.train_hin = restrict_interactions(run.hin, run.split.train_pos);
    run.metapaths = resolve_metapaths(run.hin, cfg.metapaths);
    return run;
}

TrainOutcome run_train(const RunConfig& cfg, const LogFn& log) {
    PreparedRun run = prepare_run(cfg);
    const TrainConfig tc = cfg.train_config();

    fs::create_directories(cfg.out_dir);
    write_text(cfg.out_dir + "/config.json", run_config_to_json(cfg) + "\n");

    FitResult fit_result = fit(run.train_hin, run.split, run.metapaths, tc, log);
    write_text(cfg.out_dir + "/history.csv", history_csv(fit_result.history));

    PreparedGraph graph = prepare_graph<float>(run.train_hin, run.metapaths, tc.layer);
    CheckpointMeta meta;
    meta.layer = tc.layer;
    meta.seed = cfg.seed;
    meta.hin_hash = run.hin_hash;
    for (const auto& mp : run.metapaths) {
        meta.metapath_names.push_back(mp.name);
        meta.steps_per_metapath.push_back(mp.n_hops());
    }
    meta.n_nodes = run.train_hin.n_nodes();
    meta.embed_dim = cfg.embed_dim;
    meta.repr_dim = cfg.repr_dim;
    meta.hidden_dim = cfg.hidden_dim;
    meta.gamma_user = graph.gamma_user;
    meta.gamma_item = graph.gamma_item;

    TrainOutcome outcome;
    outcome.checkpoint_dir = cfg.out_dir + "/checkpoint";
    save_checkpoint(fit_result.best_params, meta, outcome.checkpoint_dir);

    Rng cand_rng = Rng(cfg.seed).fork(0x7e57);
    const auto test_candidates =
        sample_eval_candidates(run.split.test_pos, run.split, run.hin, cfg.n_candidates, cand_rng);
    outcome.test_report = evaluate_leave_one_out(fit_result.best_params, graph,
                                                 run.split.test_pos, test_candidates, 10,
                                                 cfg.threads);
    outcome.test_report.seed = cfg.seed;
    write_text(cfg.out_dir + "/eval.json", eval_report_json(outcome.test_report) + "\n");
    outcome.fit = std::move(fit_result);
    if (log) {
        std::ostringstream os;
        os << "test hr@10 " << outcome.test_report.hr_at_10 << " ndcg@10 "
           << outcome.test_report.ndcg_at_10 << " (best epoch " << outcome.fit.best_epoch << ")";
        log(os.str());
    }
    return outcome;
}

EvalReport run_evaluate(const RunConfig& cfg, const std::string& checkpoint_dir, const LogFn& log,
                        const std::string& per_user_out) {
    auto [params, meta] = load_checkpoint(checkpoint_dir);
    PreparedRun run = prepare_run(cfg);
    if (!meta.hin_hash.empty() && meta.hin_hash != run.hin_hash)
        throw ConfigError("checkpoint was trained on a different graph (hash " + meta.hin_hash +
                          " vs " + run.hin_hash + ")");

    std::vector<Metapath> metapaths;
    for (const auto& name : meta.metapath_names) metapaths.push_back(parse_metapath(run.hin, name));
    PreparedGraph graph = prepare_graph<float>(run.train_hin, metapaths, meta.layer);

    Rng cand_rng = Rng(cfg.seed).fork(0x7e57);
    const auto candidates =
        sample_eval_candidates(run.split.test_pos, run.split, run.hin, cfg.n_candidates, cand_rng);
    EvalReport report = evaluate_leave_one_out(params, graph, run.split.test_pos, candidates, 10,
                                               cfg.threads, !per_user_out.empty());
    report.seed = cfg.seed;
    if (!per_user_out.empty()) write_text(per_user_out, per_user_csv(report));
    if (log)
        log("hr@10 " + std::to_string(report.hr_at_10) + " ndcg@10 " +
            std::to_string(report.ndcg_at_10) + " over " + std::to_string(report.n_users) +
            " users");
    return report;
}

std::vector<AblationRow> run_ablate(const RunConfig& cfg, const std::string& drop,
                                    const std::vector<std::uint64_t>& seeds, const LogFn& log) {
    {
        PreparedRun probe = prepare_run(cfg);
        std::vector<std::string> names;
        for (const auto& mp : probe.metapaths) names.push_back(mp.name);
        if (std::find(names.begin(), names.end(), drop) == names.end())
            throw ConfigError("metapath '" + drop + "' is not part of this run's set");
        std::size_t user_left = 0, item_left = 0;
        for (const auto& mp : probe.metapaths) {
            if (mp.name == drop) continue;
            (probe.hin.types[mp.terminal_type()].role == NodeRole::User ? user_left : item_left)++;
        }
        if (user_left == 0 || item_left == 0)
            throw ConfigError("dropping '" + drop + "' would leave a node type without metapaths");
    }

    std::vector<AblationRow> rows;
    for (std::uint64_t seed : seeds) {
        RunConfig full = cfg;
        full.seed = seed;
        full.out_dir = cfg.out_dir + "/ablate_seed" + std::to_string(seed) + "_full";
        if (full.metapaths.empty()) {
            PreparedRun probe = prepare_run(full);
            for (const auto& mp : probe.metapaths) full.metapaths.push_back(mp.name);
        }
        RunConfig dropped = full;
        dropped.out_dir = cfg.out_dir + "/ablate_seed" + std::to_string(seed) + "_drop";
        dropped.metapaths.clear();
        for (const auto& n : full.metapaths)
            if (n != drop) dropped.metapaths.push_back(n);

        if (log) log("ablation seed " + std::to_string(seed) + ": training full set");
        TrainOutcome base = run_train(full, log);
        if (log) log("ablation seed " + std::to_string(seed) + ": training without " + drop);
        TrainOutcome ablated = run_train(dropped, log);

        AblationRow row;
        row.seed = seed;
        row.hr_full = base.test_report.hr_at_10;
        row.hr_dropped = ablated.test_report.hr_at_10;
        row.ndcg_full = base.test_report.ndcg_at_10;
        row.ndcg_dropped = ablated.test_report.ndcg_at_10;
        row.delta_pct = row.hr_full > 0.0
                            ? 100.0 * (row.hr_dropped - row.hr_full) / row.hr_full
                            : 0.0;
        rows.push_back(row);
    }
    return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
    std::ostringstream os;
    os << "seed,hr_full,hr_dropped,delta_pct,ndcg_full,ndcg_dropped\n";
    for (const auto& r : rows)
        os << r.seed << "," << r.hr_full << "," << r.hr_dropped << "," << r.delta_pct << ","
           << r.ndcg_full << "," << r.ndcg_dropped << "\n";
    return os.str();
}

std::vector<AttentionRow> run_attention(const RunConfig& cfg, const std::string& checkpoint_dir,
                                        const LogFn& log) {
    auto [params, meta] = load_checkpoint(checkpoint_dir);
    PreparedRun run = prepare_run(cfg);
    std::vector<Metapath> metapaths;
    for (const auto& name : meta.metapath_names) metapaths.push_back(parse_metapath(run.hin, name));
    PreparedGraph graph = prepare_graph<float>(run.train_hin, metapaths, meta.layer);
    auto rows = attention_report(params, graph);
    if (log)
        for (const auto& r : rows)
            log(r.metapath + " (" + r.terminal + "): " + std::to_string(r.mean_attention));
    return rows;
}

std::string attention_csv(const std::vector<AttentionRow>& rows) {
    std::ostringstream os;
    os << "metapath,terminal,mean_attention\n";
    for (const auto& r : rows) os << r.metapath << "," << r.terminal << "," << r.mean_attention << "\n";
    return os.str();
}

std::string per_user_csv(const EvalReport& report) {
    std::ostringstream os;
    os << "user,rank,hr,ndcg\n";
    for (const auto& r : report.per_user)
        os << r.user << "," << r.rank << "," << r.hr << "," << r.ndcg << "\n";
    return os.str();
}

}  // namespace peagnn
