#include "peagnn/hin_io.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "peagnn/binio.hpp"
#include "peagnn/errors.hpp"
#include "peagnn/sha1.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace peagnn {

namespace {

const char* role_name(NodeRole r) {
    switch (r) {
        case NodeRole::User: return "user";
        case NodeRole::Item: return "item";
        case NodeRole::Feature: return "feature";
    }
    return "feature";
}

NodeRole role_from(const std::string& s) {
    if (s == "user") return NodeRole::User;
    if (s == "item") return NodeRole::Item;
    if (s == "feature") return NodeRole::Feature;
    throw IngestError("unknown node role '" + s + "'");
}

}  // namespace

void save_hin(const Hin& hin, const std::string& dir) {
    fs::create_directories(dir);
    json manifest;
    manifest["format"] = "peagnn-hin-v1";
    manifest["content_hash"] = hin_content_hash(hin);
    for (const auto& t : hin.types)
        manifest["types"].push_back(
            {{"name", t.name}, {"role", role_name(t.role)}, {"begin", t.begin}, {"end", t.end}});
    manifest["node_labels"] = hin.node_labels;

    manifest["relations"] = json::array();
    for (std::size_t i = 0; i < hin.relations.size(); ++i) {
        const auto& r = hin.relations[i];
        const std::string stem = "rel" + std::to_string(i);
        write_array(dir + "/" + stem + ".row_ptr.bin",
                    std::vector<std::uint64_t>(r.csr.row_ptr.begin(), r.csr.row_ptr.end()));
        write_array(dir + "/" + stem + ".col_idx.bin",
                    std::vector<std::uint32_t>(r.csr.col_idx.begin(), r.csr.col_idx.end()));
        write_array(dir + "/" + stem + ".values.bin", r.csr.values);
        manifest["relations"].push_back({{"name", r.name},
                                         {"src_type", r.src_type},
                                         {"dst_type", r.dst_type},
                                         {"n_rows", r.csr.n_rows},
                                         {"n_cols", r.csr.n_cols},
                                         {"nnz", r.csr.nnz()},
                                         {"stem", stem}});
    }

    {
        std::vector<std::uint64_t> users, items;
        std::vector<std::int64_t> ts;
        users.reserve(hin.interactions.size());
        for (const auto& it : hin.interactions) {
            users.push_back(it.user);
            items.push_back(it.item);
            ts.push_back(it.ts);
        }
        write_array(dir + "/interactions.user.bin", users);
        write_array(dir + "/interactions.item.bin", items);
        write_array(dir + "/interactions.ts.bin", ts);
        manifest["n_interactions"] = hin.interactions.size();
    }

    std::ofstream out(dir + "/hin.json");
    if (!out) throw IngestError("cannot write " + dir + "/hin.json");
    out << manifest.dump(2) << "\n";
}

Hin load_hin(const std::string& dir) {
    const std::string manifest_path = dir + "/hin.json";
    std::ifstream in(manifest_path);
    if (!in) throw IngestError("cannot open serialized HIN manifest " + manifest_path);
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw IngestError(manifest_path + ": " + e.what());
    }
    if (manifest.value("format", "") != "peagnn-hin-v1")
        throw IngestError(manifest_path + ": unknown format");

    Hin hin;
    for (const auto& t : manifest.at("types"))
        hin.types.push_back({t.at("name").get<std::string>(),
                             role_from(t.at("role").get<std::string>()),
                             t.at("begin").get<std::size_t>(), t.at("end").get<std::size_t>()});
    hin.node_labels = manifest.at("node_labels").get<std::vector<std::string>>();

    for (const auto& r : manifest.at("relations")) {
        Relation rel;
        rel.name = r.at("name").get<std::string>();
        rel.src_type = r.at("src_type").get<std::size_t>();
        rel.dst_type = r.at("dst_type").get<std::size_t>();
        rel.csr.n_rows = r.at("n_rows").get<std::size_t>();
        rel.csr.n_cols = r.at("n_cols").get<std::size_t>();
        const std::size_t nnz = r.at("nnz").get<std::size_t>();
        const std::string stem = dir + "/" + r.at("stem").get<std::string>();
        const auto rp = read_array<std::uint64_t>(stem + ".row_ptr.bin", rel.csr.n_rows + 1);
        const auto ci = read_array<std::uint32_t>(stem + ".col_idx.bin", nnz);
        rel.csr.row_ptr.assign(rp.begin(), rp.end());
        rel.csr.col_idx.assign(ci.begin(), ci.end());
        rel.csr.values = read_array<float>(stem + ".values.bin", nnz);
        hin.relations.push_back(std::move(rel));
    }

    const std::size_t n_inter = manifest.at("n_interactions").get<std::size_t>();
    const auto users = read_array<std::uint64_t>(dir + "/interactions.user.bin", n_inter);
    const auto items = read_array<std::uint64_t>(dir + "/interactions.item.bin", n_inter);
    const auto ts = read_array<std::int64_t>(dir + "/interactions.ts.bin", n_inter);
    for (std::size_t i = 0; i < n_inter; ++i)
        hin.interactions.push_back({static_cast<std::size_t>(users[i]),
                                    static_cast<std::size_t>(items[i]), ts[i]});

    hin.validate();
    const std::string expected = manifest.value("content_hash", "");
    if (!expected.empty() && expected != hin_content_hash(hin))
        throw IngestError(dir + ": content hash mismatch, serialized HIN is corrupt");
    return hin;
}

std::string hin_content_hash(const Hin& hin) {
    Sha1 h;
    h.update("peagnn-hin-v1");
    for (const auto& t : hin.types) {
        h.update(t.name);
        h.update_pod(static_cast<std::uint32_t>(t.role));
        h.update_pod(static_cast<std::uint64_t>(t.begin));
        h.update_pod(static_cast<std::uint64_t>(t.end));
    }
    for (const auto& r : hin.relations) {
        h.update(r.name);
        h.update_pod(static_cast<std::uint64_t>(r.src_type));
        h.update_pod(static_cast<std::uint64_t>(r.dst_type));
        for (std::size_t v : r.csr.row_ptr) h.update_pod(static_cast<std::uint64_t>(v));
        for (std::size_t v : r.csr.col_idx) h.update_pod(static_cast<std::uint64_t>(v));
        h.update(r.csr.values.data(), r.csr.values.size() * sizeof(float));
    }
    for (const auto& it : hin.interactions) {
        h.update_pod(static_cast<std::uint64_t>(it.user));
        h.update_pod(static_cast<std::uint64_t>(it.item));
        h.update_pod(it.ts);
    }
    for (const auto& l : hin.node_labels) {
        h.update_pod(static_cast<std::uint64_t>(l.size()));
        h.update(l);
    }
    return h.hex_digest();
}

}  // namespace peagnn
