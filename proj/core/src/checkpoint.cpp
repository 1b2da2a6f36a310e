#include "peagnn/checkpoint.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "peagnn/binio.hpp"
#include "peagnn/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace peagnn {

void save_checkpoint(const ModelParams& params, const CheckpointMeta& meta,
                     const std::string& dir) {
    fs::create_directories(dir);
    json manifest;
    manifest["format"] = "peagnn-checkpoint-v1";
    manifest["layer"] = layer_kind_name(meta.layer);
    manifest["seed"] = meta.seed;
    manifest["hin_hash"] = meta.hin_hash;
    manifest["metapaths"] = meta.metapath_names;
    manifest["steps_per_metapath"] = meta.steps_per_metapath;
    manifest["n_nodes"] = meta.n_nodes;
    manifest["embed_dim"] = meta.embed_dim;
    manifest["repr_dim"] = meta.repr_dim;
    manifest["hidden_dim"] = meta.hidden_dim;
    manifest["gamma_user"] = meta.gamma_user;
    manifest["gamma_item"] = meta.gamma_item;

    std::vector<float> blob;
    manifest["params"] = json::array();
    ModelParams& mutable_params = const_cast<ModelParams&>(params);
    mutable_params.for_each_param([&](const std::string& name, Tensor& t) {
        manifest["params"].push_back({{"name", name},
                                      {"rows", t.rows},
                                      {"cols", t.cols},
                                      {"offset", blob.size()}});
        blob.insert(blob.end(), t.data.begin(), t.data.end());
    });
    write_array(dir + "/params.bin", blob);
    std::ofstream out(dir + "/checkpoint.json");
    if (!out) throw IngestError("cannot write " + dir + "/checkpoint.json");
    out << manifest.dump(2) << "\n";
}

std::pair<ModelParams, CheckpointMeta> load_checkpoint(const std::string& dir) {
    std::ifstream in(dir + "/checkpoint.json");
    if (!in) throw IngestError("cannot open checkpoint manifest " + dir + "/checkpoint.json");
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw IngestError(dir + "/checkpoint.json: " + e.what());
    }
    if (manifest.value("format", "") != "peagnn-checkpoint-v1")
        throw IngestError(dir + ": unknown checkpoint format");

    CheckpointMeta meta;
    meta.layer = layer_kind_from(manifest.at("layer").get<std::string>());
    meta.seed = manifest.at("seed").get<std::uint64_t>();
    meta.hin_hash = manifest.value("hin_hash", "");
    meta.metapath_names = manifest.at("metapaths").get<std::vector<std::string>>();
    meta.steps_per_metapath = manifest.at("steps_per_metapath").get<std::vector<std::size_t>>();
    meta.n_nodes = manifest.at("n_nodes").get<std::size_t>();
    meta.embed_dim = manifest.at("embed_dim").get<std::size_t>();
    meta.repr_dim = manifest.at("repr_dim").get<std::size_t>();
    meta.hidden_dim = manifest.at("hidden_dim").get<std::size_t>();
    meta.gamma_user = manifest.at("gamma_user").get<std::size_t>();
    meta.gamma_item = manifest.at("gamma_item").get<std::size_t>();

    // skeleton with the exact tensor shapes the registry will visit
    ModelParams params;
    params.kind = meta.layer;
    params.embed_dim = meta.embed_dim;
    params.repr_dim = meta.repr_dim;
    params.embeddings = Tensor::zeros(meta.n_nodes, meta.embed_dim);
    for (std::size_t m = 0; m < meta.steps_per_metapath.size(); ++m) {
        std::vector<LayerParams> steps;
        for (std::size_t s = 0; s < meta.steps_per_metapath[m]; ++s) {
            LayerParams lp;
            lp.kind = meta.layer;
            const std::size_t d_in = s == 0 ? meta.embed_dim : meta.repr_dim;
            lp.w = Tensor::zeros(d_in, meta.repr_dim);
            if (meta.layer == LayerKind::Sage) lp.w_self = Tensor::zeros(d_in, meta.repr_dim);
            if (meta.layer == LayerKind::Gat) lp.attn = Tensor::zeros(2 * meta.repr_dim, 1);
            steps.push_back(std::move(lp));
        }
        params.layers.push_back(std::move(steps));
    }
    params.fusion_w_user = Tensor::zeros(meta.repr_dim, meta.gamma_user);
    params.fusion_w_item = Tensor::zeros(meta.repr_dim, meta.gamma_item);
    params.mlp_w1 = Tensor::zeros(2 * meta.repr_dim, meta.hidden_dim);
    params.mlp_b1 = Tensor::zeros(1, meta.hidden_dim);
    params.mlp_w2 = Tensor::zeros(meta.hidden_dim, 1);
    params.mlp_b2 = Tensor::zeros(1, 1);

    std::size_t total = 0;
    params.for_each_param([&](const std::string&, Tensor& t) { total += t.size(); });
    const std::vector<float> blob = read_array<float>(dir + "/params.bin", total);

    std::size_t cursor = 0;
    const auto& entries = manifest.at("params");
    params.for_each_param([&](const std::string& name, Tensor& t) {
        if (cursor >= entries.size())
            throw IngestError(dir + ": checkpoint manifest lists too few parameters");
        const auto& e = entries[cursor];
        if (e.at("name").get<std::string>() != name ||
            e.at("rows").get<std::size_t>() != t.rows ||
            e.at("cols").get<std::size_t>() != t.cols)
            throw IngestError(dir + ": parameter '" + name + "' does not match manifest entry '" +
                              e.at("name").get<std::string>() + "'");
        const std::size_t off = e.at("offset").get<std::size_t>();
        std::copy(blob.begin() + off, blob.begin() + off + t.size(), t.data.begin());
        ++cursor;
    });
    if (cursor != entries.size())
        throw IngestError(dir + ": checkpoint manifest lists extra parameters");
    return {std::move(params), std::move(meta)};
}

}  // namespace peagnn
