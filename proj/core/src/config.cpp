#include "peagnn/config.hpp"

#include <fstream>

#include <json.hpp>

#include "peagnn/errors.hpp"
#include "peagnn/sha1.hpp"

using nlohmann::json;

namespace peagnn {

TrainConfig RunConfig::train_config() const {
    TrainConfig t;
    t.batch_size = batch_size;
    t.lr = lr;
    t.lambda = lambda;
    t.epochs = epochs;
    t.patience = patience;
    t.seed = seed;
    t.layer = layer_kind_from(layer);
    t.neg_ratio = neg_ratio;
    t.embed_dim = embed_dim;
    t.repr_dim = repr_dim;
    t.hidden_dim = hidden_dim;
    t.n_candidates = n_candidates;
    t.threads = threads;
    return t;
}

namespace {

json to_json(const RunConfig& c) {
    json j;
    j["data_dir"] = c.data_dir;
    j["hin_dir"] = c.hin_dir;
    j["out_dir"] = c.out_dir;
    j["layer"] = c.layer;
    j["metapaths"] = c.metapaths;
    j["kcore"] = c.kcore;
    j["batch_size"] = c.batch_size;
    j["lr"] = c.lr;
    j["lambda"] = c.lambda;
    j["epochs"] = c.epochs;
    j["patience"] = c.patience;
    j["neg_ratio"] = c.neg_ratio;
    j["n_candidates"] = c.n_candidates;
    j["embed_dim"] = c.embed_dim;
    j["repr_dim"] = c.repr_dim;
    j["hidden_dim"] = c.hidden_dim;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    return j;
}

}  // namespace

RunConfig run_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c;
    try {
        c.data_dir = j.value("data_dir", c.data_dir);
        c.hin_dir = j.value("hin_dir", c.hin_dir);
        c.out_dir = j.value("out_dir", c.out_dir);
        c.layer = j.value("layer", c.layer);
        c.metapaths = j.value("metapaths", c.metapaths);
        c.kcore = j.value("kcore", c.kcore);
        c.batch_size = j.value("batch_size", c.batch_size);
        c.lr = j.value("lr", c.lr);
        c.lambda = j.value("lambda", c.lambda);
        c.epochs = j.value("epochs", c.epochs);
        c.patience = j.value("patience", c.patience);
        c.neg_ratio = j.value("neg_ratio", c.neg_ratio);
        c.n_candidates = j.value("n_candidates", c.n_candidates);
        c.embed_dim = j.value("embed_dim", c.embed_dim);
        c.repr_dim = j.value("repr_dim", c.repr_dim);
        c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
        c.seed = j.value("seed", c.seed);
        c.threads = j.value("threads", c.threads);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has wrong type: ") + e.what());
    }
    layer_kind_from(c.layer);  // validate early
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return run_config_from_json(text);
}

std::string run_config_to_json(const RunConfig& cfg) { return to_json(cfg).dump(2); }

std::string config_hash(const RunConfig& cfg) {
    Sha1 h;
    h.update(to_json(cfg).dump());  // nlohmann dumps object keys sorted
    return h.hex_digest();
}

RunConfig apply_overrides(RunConfig cfg, const ConfigOverrides& o) {
    if (o.data_dir) cfg.data_dir = *o.data_dir;
    if (o.hin_dir) cfg.hin_dir = *o.hin_dir;
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.layer) cfg.layer = *o.layer;
    if (o.metapaths) cfg.metapaths = *o.metapaths;
    if (o.kcore) cfg.kcore = *o.kcore;
    if (o.batch_size) cfg.batch_size = *o.batch_size;
    if (o.epochs) cfg.epochs = *o.epochs;
    if (o.patience) cfg.patience = *o.patience;
    if (o.neg_ratio) cfg.neg_ratio = *o.neg_ratio;
    if (o.n_candidates) cfg.n_candidates = *o.n_candidates;
    if (o.threads) cfg.threads = *o.threads;
    if (o.lr) cfg.lr = *o.lr;
    if (o.lambda) cfg.lambda = *o.lambda;
    if (o.seed) cfg.seed = *o.seed;
    layer_kind_from(cfg.layer);
    return cfg;
}

}  // namespace peagnn
