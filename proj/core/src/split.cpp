#include "peagnn/split.hpp"

#include <algorithm>

#include "peagnn/errors.hpp"

namespace peagnn {

SplitDataset leave_one_out_split(const Hin& hin, std::uint64_t seed) {
    std::unordered_map<std::size_t, std::vector<Interaction>> by_user;
    for (const auto& it : hin.interactions) by_user[it.user].push_back(it);

    SplitDataset split;
    std::vector<std::size_t> users;
    users.reserve(by_user.size());
    for (const auto& [u, _] : by_user) users.push_back(u);
    std::sort(users.begin(), users.end());

    Rng root = Rng(seed).fork(0x10eaf);
    for (std::size_t u : users) {
        auto& items = by_user[u];
        if (items.size() < 3)
            throw ContractError("user " + std::to_string(u) + " has " +
                                std::to_string(items.size()) +
                                " interactions, leave-one-out needs >= 3");
        auto& pos = split.user_positives[u];
        for (const auto& it : items) pos.push_back(it.item);
        std::sort(pos.begin(), pos.end());
        pos.erase(std::unique(pos.begin(), pos.end()), pos.end());

        // latest timestamp wins; ties broken by larger item id
        std::sort(items.begin(), items.end(), [](const Interaction& a, const Interaction& b) {
            if (a.ts != b.ts) return a.ts < b.ts;
            return a.item < b.item;
        });
        split.test_pos.push_back(items.back());
        items.pop_back();

        Rng r = root.fork(u);
        const std::size_t vi = static_cast<std::size_t>(r.below(items.size()));
        split.val_pos.push_back(items[vi]);
        items.erase(items.begin() + static_cast<std::ptrdiff_t>(vi));

        for (const auto& it : items) split.train_pos.push_back(it);
    }
    return split;
}

namespace {

bool contains(const std::vector<std::size_t>& sorted, std::size_t v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
}

std::size_t draw_unseen_item(const Hin& hin, const std::vector<std::size_t>& positives,
                             Rng& rng) {
    const std::size_t n_items = hin.n_items();
    if (positives.size() >= n_items)
        throw SamplingError("user interacted with every item, no negatives exist");
    while (true) {
        const std::size_t item = hin.item_begin() + static_cast<std::size_t>(rng.below(n_items));
        if (!contains(positives, item)) return item;
    }
}

}  // namespace

std::vector<Triple> sample_train_negatives(const SplitDataset& split, const Hin& hin,
                                           std::size_t ratio, Rng& rng) {
    if (ratio < 1) throw ContractError("negative sampling ratio must be >= 1");
    std::vector<Triple> triples;
    triples.reserve(split.train_pos.size() * ratio);
    for (const auto& p : split.train_pos) {
        const auto& positives = split.user_positives.at(p.user);
        for (std::size_t k = 0; k < ratio; ++k)
            triples.push_back({p.user, p.item, draw_unseen_item(hin, positives, rng)});
    }
    return triples;
}

std::unordered_map<std::size_t, std::vector<std::size_t>> sample_eval_candidates(
    const std::vector<Interaction>& held_out, const SplitDataset& split, const Hin& hin,
    std::size_t n_candidates, Rng& rng) {
    if (n_candidates < 11)
        throw ContractError("n_candidates must be >= 11 for top-10 metrics");
    std::unordered_map<std::size_t, std::vector<std::size_t>> out;
    std::vector<Interaction> ordered = held_out;
    std::sort(ordered.begin(), ordered.end(), [](const Interaction& a, const Interaction& b) {
        return a.user < b.user;
    });
    for (const auto& h : ordered) {
        const auto& positives = split.user_positives.at(h.user);
        const std::size_t unseen = hin.n_items() - positives.size();
        if (unseen + 1 < n_candidates)
            throw SamplingError("user " + std::to_string(h.user) + " has only " +
                                std::to_string(unseen) + " unseen items, needs " +
                                std::to_string(n_candidates - 1));
        auto& list = out[h.user];
        list.push_back(h.item);
        std::vector<std::size_t> seen = positives;  // grows with drawn candidates
        while (list.size() < n_candidates) {
            const std::size_t item =
                hin.item_begin() + static_cast<std::size_t>(rng.below(hin.n_items()));
            if (contains(seen, item)) continue;
            seen.insert(std::lower_bound(seen.begin(), seen.end(), item), item);
            list.push_back(item);
        }
        rng.shuffle(list);
    }
    return out;
}

FeatureIndex::FeatureIndex(const Hin& hin) : types_(hin.types) {
    per_node_.resize(hin.n_nodes());
    for (const auto& r : hin.relations) {
        const bool dst_feat = hin.types[r.dst_type].role == NodeRole::Feature;
        const bool src_feat = hin.types[r.src_type].role == NodeRole::Feature;
        if (dst_feat == src_feat) continue;  // user-item or feature-feature: not contrastable
        const std::size_t ent_type = dst_feat ? r.dst_type : r.src_type;
        const std::size_t sb = hin.types[r.src_type].begin;
        const std::size_t db = hin.types[r.dst_type].begin;
        for (std::size_t i = 0; i < r.csr.n_rows; ++i) {
            for (std::size_t k = r.csr.row_ptr[i]; k < r.csr.row_ptr[i + 1]; ++k) {
                const std::size_t s = sb + i;
                const std::size_t d = db + r.csr.col_idx[k];
                const std::size_t owner = dst_feat ? s : d;
                const std::size_t entity = dst_feat ? d : s;
                auto& slices = per_node_[owner];
                auto it = std::find_if(slices.begin(), slices.end(), [&](const KindSlice& ks) {
                    return ks.type_idx == ent_type;
                });
                if (it == slices.end()) {
                    slices.push_back({ent_type, {}});
                    it = slices.end() - 1;
                }
                it->connected.push_back(entity);
            }
        }
    }
    for (auto& slices : per_node_) {
        for (auto& ks : slices) {
            std::sort(ks.connected.begin(), ks.connected.end());
            ks.connected.erase(std::unique(ks.connected.begin(), ks.connected.end()),
                               ks.connected.end());
        }
        std::sort(slices.begin(), slices.end(), [](const KindSlice& a, const KindSlice& b) {
            return a.type_idx < b.type_idx;
        });
    }
}

bool FeatureIndex::has_features(std::size_t node) const {
    return node < per_node_.size() && !per_node_[node].empty();
}

ContrastBatch build_contrast_batch(const FeatureIndex& index, const std::vector<Triple>& triples,
                                   Rng& rng) {
    ContrastBatch batch;
    for (const auto& t : triples) {
        const auto cu = index.sample_contrast(t.user, rng);
        const auto ci = index.sample_contrast(t.pos_item, rng);
        if (!cu || !ci) {
            batch.n_skipped++;
            continue;
        }
        batch.user.push_back(t.user);
        batch.f_pos_u.push_back(cu->observed);
        batch.f_neg_u.push_back(cu->unobserved);
        batch.item.push_back(t.pos_item);
        batch.f_pos_i.push_back(ci->observed);
        batch.f_neg_i.push_back(ci->unobserved);
    }
    return batch;
}

std::optional<FeatureIndex::Contrast> FeatureIndex::sample_contrast(std::size_t node,
                                                                    Rng& rng) const {
    if (node >= per_node_.size() || per_node_[node].empty()) return std::nullopt;
    const auto& slices = per_node_[node];

    // f+ uniform over all connected feature entities across kinds
    std::size_t total = 0;
    for (const auto& ks : slices) total += ks.connected.size();
    std::size_t pick = static_cast<std::size_t>(rng.below(total));
    const KindSlice* slice = nullptr;
    std::size_t observed = 0;
    for (const auto& ks : slices) {
        if (pick < ks.connected.size()) {
            slice = &ks;
            observed = ks.connected[pick];
            break;
        }
        pick -= ks.connected.size();
    }

    // f- uniform over same-kind entities the node is NOT connected to
    const NodeTypeInfo& ti = types_[slice->type_idx];
    const std::size_t kind_total = ti.count();
    if (slice->connected.size() >= kind_total) return std::nullopt;  // kind fully connected
    while (true) {
        const std::size_t cand = ti.begin + static_cast<std::size_t>(rng.below(kind_total));
        if (!std::binary_search(slice->connected.begin(), slice->connected.end(), cand))
            return Contrast{observed, cand};
    }
}

}  // namespace peagnn
