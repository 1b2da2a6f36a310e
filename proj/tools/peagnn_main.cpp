// peagnn: metapath- and entity-aware GNN recommender.
// Subcommands: ingest, train, evaluate, ablate, attention.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "peagnn/config.hpp"
#include "peagnn/errors.hpp"
#include "peagnn/runner.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

peagnn::LogFn stderr_log() {
    return [](const std::string& line) { std::cerr << line << "\n"; };
}

struct CommonFlags {
    std::string config_path;
    peagnn::ConfigOverrides overrides;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON run config; flags override its values");
    auto opt = [&](auto&& name, auto& slot, const char* help) {
        using V = typename std::decay_t<decltype(slot)>::value_type;
        cmd->add_option_function<V>(
            name, [&slot](const V& v) { slot = v; }, help);
    };
    opt("--data-dir", flags.overrides.data_dir, "raw MovieLens CSV directory");
    opt("--hin-dir", flags.overrides.hin_dir, "serialized HIN directory");
    opt("--out", flags.overrides.out_dir, "run output directory");
    opt("--layer", flags.overrides.layer, "gcn|gat|sage");
    opt("--metapath", flags.overrides.metapaths, "metapath schema, repeatable (e.g. Y-M-U)");
    opt("--kcore", flags.overrides.kcore, "k-core filter threshold");
    opt("--batch-size", flags.overrides.batch_size, "training batch size");
    opt("--lr", flags.overrides.lr, "learning rate");
    opt("--lambda", flags.overrides.lambda, "entity-awareness weight");
    opt("--epochs", flags.overrides.epochs, "max training epochs");
    opt("--patience", flags.overrides.patience, "early-stopping patience");
    opt("--neg-ratio", flags.overrides.neg_ratio, "negatives per train positive");
    opt("--n-candidates", flags.overrides.n_candidates, "evaluation candidate list size");
    opt("--seed", flags.overrides.seed, "master RNG seed");
    opt("--threads", flags.overrides.threads, "evaluation threads (training stays sequential)");
}

peagnn::RunConfig resolve_config(const CommonFlags& flags) {
    peagnn::RunConfig cfg;
    if (!flags.config_path.empty()) cfg = peagnn::load_run_config(flags.config_path);
    cfg = peagnn::apply_overrides(cfg, flags.overrides);
    if (const char* env = std::getenv("PEAGNN_THREADS")) {
        if (!flags.overrides.threads) cfg.threads = static_cast<std::size_t>(std::stoul(env));
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"metapath- and entity-aware GNN for top-k recommendation"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "build + filter + serialize the HIN");
    std::string ingest_data, ingest_out;
    std::size_t ingest_kcore = 10;
    ingest->add_option("--data-dir", ingest_data, "raw MovieLens CSV directory")->required();
    ingest->add_option("--out", ingest_out, "output directory for the serialized HIN")->required();
    ingest->add_option("--kcore", ingest_kcore, "k-core threshold (0 = keep everything)");

    CommonFlags train_flags, eval_flags, ablate_flags, attn_flags;

    auto* train = app.add_subcommand("train", "train a model and write a run directory");
    add_common_flags(train, train_flags);

    auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint (leave-one-out)");
    std::string eval_checkpoint, eval_per_user;
    evaluate->add_option("--checkpoint", eval_checkpoint, "checkpoint directory")->required();
    evaluate->add_option("--per-user", eval_per_user, "optional per-user CSV output path");
    add_common_flags(evaluate, eval_flags);

    auto* ablate = app.add_subcommand("ablate", "retrain without one metapath, report deltas");
    std::string ablate_drop, ablate_seeds = "1,2,3";
    ablate->add_option("--drop", ablate_drop, "metapath name to remove (e.g. Y-M-U)")->required();
    ablate->add_option("--seeds", ablate_seeds, "comma-separated seeds");
    add_common_flags(ablate, ablate_flags);

    auto* attention = app.add_subcommand("attention", "per-metapath mean fusion attention");
    std::string attn_checkpoint;
    attention->add_option("--checkpoint", attn_checkpoint, "checkpoint directory")->required();
    add_common_flags(attention, attn_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return 2;
    }

    try {
        if (*ingest) {
            const auto stats = peagnn::run_ingest(ingest_data, ingest_out, ingest_kcore,
                                                  stderr_log());
            std::cout << "users " << stats.n_users << "\nitems " << stats.n_items
                      << "\ninteractions " << stats.n_interactions << "\nnodes " << stats.n_nodes
                      << "\n";
            return 0;
        }
        if (*train) {
            auto cfg = resolve_config(train_flags);
            const auto outcome = peagnn::run_train(cfg, stderr_log());
            std::cout << peagnn::eval_report_json(outcome.test_report) << "\n";
            return 0;
        }
        if (*evaluate) {
            auto cfg = resolve_config(eval_flags);
            const auto report = peagnn::run_evaluate(cfg, eval_checkpoint, stderr_log(),
                                                     eval_per_user);
            std::cout << peagnn::eval_report_json(report) << "\n";
            return 0;
        }
        if (*ablate) {
            auto cfg = resolve_config(ablate_flags);
            std::vector<std::uint64_t> seeds;
            std::string tok;
            for (char c : ablate_seeds + ",") {
                if (c == ',') {
                    if (!tok.empty()) seeds.push_back(std::stoull(tok));
                    tok.clear();
                } else {
                    tok += c;
                }
            }
            const auto rows = peagnn::run_ablate(cfg, ablate_drop, seeds, stderr_log());
            const std::string csv = peagnn::ablation_csv(rows);
            fs::create_directories(cfg.out_dir);
            write_file(cfg.out_dir + "/ablation.csv", csv);
            std::cout << csv;
            return 0;
        }
        if (*attention) {
            auto cfg = resolve_config(attn_flags);
            const auto rows = peagnn::run_attention(cfg, attn_checkpoint, stderr_log());
            const std::string csv = peagnn::attention_csv(rows);
            std::cout << csv;
            return 0;
        }
    } catch (const peagnn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
