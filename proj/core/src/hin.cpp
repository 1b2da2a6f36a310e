#include "peagnn/hin.hpp"

#include <algorithm>
#include <numeric>

#include "peagnn/errors.hpp"

namespace peagnn {

std::size_t Hin::type_of(std::size_t node) const {
    for (std::size_t t = 0; t < types.size(); ++t)
        if (node >= types[t].begin && node < types[t].end) return t;
    throw IndexError("node id " + std::to_string(node) + " outside every type range");
}

std::optional<std::size_t> Hin::find_type(const std::string& name) const {
    for (std::size_t t = 0; t < types.size(); ++t)
        if (types[t].name == name) return t;
    return std::nullopt;
}

const Relation* Hin::find_relation(const std::string& name) const {
    for (const auto& r : relations)
        if (r.name == name) return &r;
    return nullptr;
}

const Relation* Hin::relation_between(std::size_t type_a, std::size_t type_b) const {
    const Relation* found = nullptr;
    for (const auto& r : relations) {
        const bool hit = (r.src_type == type_a && r.dst_type == type_b) ||
                         (r.src_type == type_b && r.dst_type == type_a);
        if (!hit) continue;
        if (found && found != &r)
            throw ContractError("ambiguous relation between types '" + types[type_a].name +
                                "' and '" + types[type_b].name + "'");
        found = &r;
    }
    return found;
}

void Hin::validate() const {
    if (types.size() < 2 || types[0].role != NodeRole::User || types[1].role != NodeRole::Item)
        throw ContractError("HIN must start with a user type followed by an item type");
    std::size_t cursor = 0;
    for (const auto& t : types) {
        if (t.begin != cursor || t.end < t.begin)
            throw ContractError("node ids are not densely partitioned by type at '" + t.name + "'");
        cursor = t.end;
    }
    if (node_labels.size() != n_nodes())
        throw ContractError("node_labels length does not match node count");
    for (const auto& r : relations) {
        if (r.src_type >= types.size() || r.dst_type >= types.size())
            throw ContractError("relation '" + r.name + "' references an unknown type");
        if (r.csr.n_rows != types[r.src_type].count() || r.csr.n_cols != types[r.dst_type].count())
            throw ContractError("relation '" + r.name + "' CSR is " +
                                std::to_string(r.csr.n_rows) + "x" + std::to_string(r.csr.n_cols) +
                                " but endpoint ranges are " +
                                std::to_string(types[r.src_type].count()) + "x" +
                                std::to_string(types[r.dst_type].count()));
        if (!csr_canonical(r.csr))
            throw ContractError("relation '" + r.name + "' CSR is not canonical");
    }
    for (const auto& it : interactions) {
        if (type_of(it.user) != 0 || type_of(it.item) != 1)
            throw ContractError("interaction endpoints have wrong node types");
    }
}

std::vector<std::size_t> interaction_degrees(const Hin& hin) {
    std::vector<std::size_t> deg(hin.n_nodes(), 0);
    for (const auto& it : hin.interactions) {
        deg[it.user]++;
        deg[it.item]++;
    }
    return deg;
}

Hin filter_nodes(const Hin& hin, const std::vector<bool>& keep) {
    const std::size_t n = hin.n_nodes();
    std::vector<std::size_t> new_id(n, SIZE_MAX);

    Hin out;
    std::vector<std::size_t> type_remap(hin.types.size(), SIZE_MAX);
    std::size_t cursor = 0;
    for (std::size_t t = 0; t < hin.types.size(); ++t) {
        const auto& ti = hin.types[t];
        std::size_t kept = 0;
        for (std::size_t v = ti.begin; v < ti.end; ++v)
            if (keep[v]) new_id[v] = cursor + kept++;
        if (kept == 0 && ti.role == NodeRole::Feature) continue;  // drop empty feature kinds
        type_remap[t] = out.types.size();
        out.types.push_back({ti.name, ti.role, cursor, cursor + kept});
        cursor += kept;
    }
    out.node_labels.resize(cursor);
    for (std::size_t v = 0; v < n; ++v)
        if (new_id[v] != SIZE_MAX) out.node_labels[new_id[v]] = hin.node_labels[v];

    for (const auto& r : hin.relations) {
        if (type_remap[r.src_type] == SIZE_MAX || type_remap[r.dst_type] == SIZE_MAX) continue;
        const std::size_t sb = hin.types[r.src_type].begin;
        const std::size_t db = hin.types[r.dst_type].begin;
        const std::size_t nsb = out.types[type_remap[r.src_type]].begin;
        const std::size_t ndb = out.types[type_remap[r.dst_type]].begin;
        std::vector<Coo<float>> edges;
        for (std::size_t i = 0; i < r.csr.n_rows; ++i) {
            const std::size_t src = sb + i;
            if (!keep[src]) continue;
            for (std::size_t k = r.csr.row_ptr[i]; k < r.csr.row_ptr[i + 1]; ++k) {
                const std::size_t dst = db + r.csr.col_idx[k];
                if (!keep[dst]) continue;
                edges.push_back({new_id[src] - nsb, new_id[dst] - ndb, r.csr.values[k]});
            }
        }
        Relation nr;
        nr.name = r.name;
        nr.src_type = type_remap[r.src_type];
        nr.dst_type = type_remap[r.dst_type];
        nr.csr = csr_from_edges(out.types[nr.src_type].count(), out.types[nr.dst_type].count(),
                                std::move(edges));
        out.relations.push_back(std::move(nr));
    }

    for (const auto& it : hin.interactions) {
        if (keep[it.user] && keep[it.item])
            out.interactions.push_back({new_id[it.user], new_id[it.item], it.ts});
    }
    return out;
}

namespace {

// Builds (or rebuilds) the rated relation from the interaction list.
Relation rated_from_interactions(const Hin& hin) {
    Relation r;
    r.name = "rated";
    r.src_type = 0;
    r.dst_type = 1;
    std::vector<Coo<float>> edges;
    edges.reserve(hin.interactions.size());
    for (const auto& it : hin.interactions)
        edges.push_back({it.user - hin.user_begin(), it.item - hin.item_begin(), 1.0f});
    r.csr = csr_from_edges(hin.n_users(), hin.n_items(), std::move(edges));
    return r;
}

}  // namespace

Hin restrict_interactions(const Hin& hin, const std::vector<Interaction>& kept) {
    Hin out = hin;
    out.interactions = kept;
    for (auto& r : out.relations) {
        if (r.name == "rated") {
            r = rated_from_interactions(out);
            return out;
        }
    }
    out.relations.insert(out.relations.begin(), rated_from_interactions(out));
    return out;
}

Hin kcore_filter(const Hin& hin, std::size_t k) {
    if (k < 1) throw ContractError("kcore_filter: k must be >= 1");
    const std::size_t n = hin.n_nodes();
    std::vector<bool> keep(n, true);

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::size_t> deg(n, 0);
        for (const auto& it : hin.interactions) {
            if (keep[it.user] && keep[it.item]) {
                deg[it.user]++;
                deg[it.item]++;
            }
        }
        for (std::size_t t = 0; t < 2; ++t) {
            for (std::size_t v = hin.types[t].begin; v < hin.types[t].end; ++v) {
                if (keep[v] && deg[v] < k) {
                    keep[v] = false;
                    changed = true;
                }
            }
        }
    }

    // feature nodes survive only while a kept user/item still references them
    std::vector<std::size_t> fdeg(n, 0);
    for (const auto& r : hin.relations) {
        const bool src_feat = hin.types[r.src_type].role == NodeRole::Feature;
        const bool dst_feat = hin.types[r.dst_type].role == NodeRole::Feature;
        if (!src_feat && !dst_feat) continue;
        const std::size_t sb = hin.types[r.src_type].begin;
        const std::size_t db = hin.types[r.dst_type].begin;
        for (std::size_t i = 0; i < r.csr.n_rows; ++i) {
            for (std::size_t kk = r.csr.row_ptr[i]; kk < r.csr.row_ptr[i + 1]; ++kk) {
                const std::size_t s = sb + i, d = db + r.csr.col_idx[kk];
                if (!keep[s] || !keep[d]) continue;
                if (src_feat) fdeg[s]++;
                if (dst_feat) fdeg[d]++;
            }
        }
    }
    for (std::size_t t = 0; t < hin.types.size(); ++t) {
        if (hin.types[t].role != NodeRole::Feature) continue;
        for (std::size_t v = hin.types[t].begin; v < hin.types[t].end; ++v)
            if (fdeg[v] == 0) keep[v] = false;
    }

    bool any_user = false, any_item = false;
    for (std::size_t v = hin.types[0].begin; v < hin.types[0].end; ++v) any_user |= keep[v];
    for (std::size_t v = hin.types[1].begin; v < hin.types[1].end; ++v) any_item |= keep[v];
    if (!any_user || !any_item)
        throw ContractError(std::to_string(k) + "-core filtering left an empty graph");

    Hin out = filter_nodes(hin, keep);
    out.validate();
    return out;
}

}  // namespace peagnn
