#include "peagnn/datagen.hpp"

#include <algorithm>
#include <string>

#include "peagnn/errors.hpp"
#include "peagnn/rng.hpp"

namespace peagnn {

Hin make_planted_hin(const PlantedConfig& cfg) {
    if (cfg.n_items % cfg.n_flavors != 0)
        throw ContractError("planted HIN wants n_items divisible by n_flavors");
    Rng rng(cfg.seed);

    Hin hin;
    hin.types.push_back({"user", NodeRole::User, 0, cfg.n_users});
    hin.types.push_back({"movie", NodeRole::Item, cfg.n_users, cfg.n_users + cfg.n_items});
    const std::size_t flavor_begin = cfg.n_users + cfg.n_items;
    hin.types.push_back({"flavor", NodeRole::Feature, flavor_begin, flavor_begin + cfg.n_flavors});
    std::size_t cohort_begin = flavor_begin + cfg.n_flavors;
    if (cfg.user_cohorts)
        hin.types.push_back(
            {"cohort", NodeRole::Feature, cohort_begin, cohort_begin + cfg.n_flavors});

    hin.node_labels.resize(hin.n_nodes());
    for (std::size_t u = 0; u < cfg.n_users; ++u) hin.node_labels[u] = "u" + std::to_string(u);
    for (std::size_t i = 0; i < cfg.n_items; ++i)
        hin.node_labels[cfg.n_users + i] = "m" + std::to_string(i);
    for (std::size_t f = 0; f < cfg.n_flavors; ++f)
        hin.node_labels[flavor_begin + f] = "f" + std::to_string(f);
    if (cfg.user_cohorts)
        for (std::size_t f = 0; f < cfg.n_flavors; ++f)
            hin.node_labels[cohort_begin + f] = "c" + std::to_string(f);

    // item i belongs to flavor i % n_flavors; user u prefers a random flavor
    std::vector<std::size_t> preference(cfg.n_users);
    for (auto& p : preference) p = static_cast<std::size_t>(rng.below(cfg.n_flavors));

    std::int64_t ts = 0;
    for (std::size_t u = 0; u < cfg.n_users; ++u) {
        std::vector<std::size_t> liked;
        for (std::size_t i = 0; i < cfg.n_items; ++i)
            if (i % cfg.n_flavors == preference[u]) liked.push_back(i);
        rng.shuffle(liked);
        for (std::size_t i : liked)
            hin.interactions.push_back({u, cfg.n_users + i, ++ts});
    }

    {
        std::vector<Coo<float>> e;
        for (const auto& it : hin.interactions)
            e.push_back({it.user, it.item - cfg.n_users, 1.0f});
        Relation r{"rated", 0, 1, csr_from_edges(cfg.n_users, cfg.n_items, std::move(e))};
        hin.relations.push_back(std::move(r));
    }
    {
        std::vector<Coo<float>> e;
        for (std::size_t i = 0; i < cfg.n_items; ++i)
            e.push_back({i, i % cfg.n_flavors, 1.0f});
        Relation r{"has_flavor", 1, 2, csr_from_edges(cfg.n_items, cfg.n_flavors, std::move(e))};
        hin.relations.push_back(std::move(r));
    }
    if (cfg.user_cohorts) {
        std::vector<Coo<float>> e;
        for (std::size_t u = 0; u < cfg.n_users; ++u) e.push_back({u, preference[u], 1.0f});
        Relation r{"in_cohort", 0, 3, csr_from_edges(cfg.n_users, cfg.n_flavors, std::move(e))};
        hin.relations.push_back(std::move(r));
    }

    hin.validate();
    return hin;
}

std::vector<Metapath> planted_metapaths(const Hin& hin) {
    std::vector<Metapath> out;
    out.push_back(parse_metapath(hin, "U-M-U"));
    out.push_back(parse_metapath(hin, "M-U-M"));
    out.push_back(parse_metapath(hin, "F-M-U"));
    if (hin.find_type("cohort")) out.push_back(parse_metapath(hin, "C-U-M"));
    return out;
}

Hin make_random_hin(const RandomHinConfig& cfg) {
    Rng rng(cfg.seed);
    const std::size_t n_users = 2 + static_cast<std::size_t>(rng.below(cfg.max_users - 1));
    const std::size_t n_items =
        std::max<std::size_t>(cfg.min_degree + 2,
                              2 + static_cast<std::size_t>(rng.below(cfg.max_items - 1)));
    const std::size_t n_kinds = 1 + static_cast<std::size_t>(rng.below(cfg.max_feature_kinds));

    Hin hin;
    hin.types.push_back({"user", NodeRole::User, 0, n_users});
    hin.types.push_back({"movie", NodeRole::Item, n_users, n_users + n_items});
    std::size_t cursor = n_users + n_items;
    static const char* kind_names[] = {"genre", "year", "tag", "studio"};
    for (std::size_t k = 0; k < n_kinds; ++k) {
        const std::size_t nv = 1 + static_cast<std::size_t>(rng.below(cfg.max_feature_values));
        hin.types.push_back({kind_names[k], NodeRole::Feature, cursor, cursor + nv});
        cursor += nv;
    }
    hin.node_labels.resize(hin.n_nodes());
    for (std::size_t v = 0; v < hin.n_nodes(); ++v) hin.node_labels[v] = "n" + std::to_string(v);

    // interactions: every user draws min_degree.. n_items distinct items
    std::int64_t ts = 0;
    for (std::size_t u = 0; u < n_users; ++u) {
        std::vector<std::size_t> items(n_items);
        for (std::size_t i = 0; i < n_items; ++i) items[i] = i;
        rng.shuffle(items);
        const std::size_t deg =
            cfg.min_degree + static_cast<std::size_t>(rng.below(n_items - cfg.min_degree + 1));
        for (std::size_t i = 0; i < deg; ++i)
            hin.interactions.push_back({u, n_users + items[i], ++ts});
    }
    {
        std::vector<Coo<float>> e;
        for (const auto& it : hin.interactions) e.push_back({it.user, it.item - n_users, 1.0f});
        hin.relations.push_back({"rated", 0, 1, csr_from_edges(n_users, n_items, std::move(e))});
    }
    for (std::size_t k = 0; k < n_kinds; ++k) {
        const std::size_t type_idx = 2 + k;
        const std::size_t nv = hin.types[type_idx].count();
        // odd kinds attach to users, even kinds to items
        const std::size_t owner_type = (k % 2 == 1) ? 0 : 1;
        const std::size_t n_owner = hin.types[owner_type].count();
        std::vector<Coo<float>> e;
        for (std::size_t i = 0; i < n_owner; ++i) {
            const std::size_t n_links = static_cast<std::size_t>(rng.below(nv + 1));
            std::vector<std::size_t> vals(nv);
            for (std::size_t v = 0; v < nv; ++v) vals[v] = v;
            rng.shuffle(vals);
            for (std::size_t v = 0; v < n_links; ++v) e.push_back({i, vals[v], 1.0f});
        }
        hin.relations.push_back({std::string("has_") + kind_names[k], owner_type, type_idx,
                                 csr_from_edges(n_owner, nv, std::move(e))});
    }
    hin.validate();
    return hin;
}

std::vector<Metapath> enumerate_metapaths(const Hin& hin, std::size_t max_hops) {
    std::vector<Metapath> out;
    std::vector<std::vector<std::size_t>> stack;
    for (std::size_t t = 0; t < hin.types.size(); ++t) stack.push_back({t});
    while (!stack.empty()) {
        std::vector<std::size_t> seq = stack.back();
        stack.pop_back();
        if (seq.size() >= 2) {
            const NodeRole last = hin.types[seq.back()].role;
            if (last == NodeRole::User || last == NodeRole::Item) {
                std::vector<std::vector<std::string>> steps;
                bool ok = true;
                for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
                    const Relation* rel = hin.relation_between(seq[i], seq[i + 1]);
                    if (!rel) { ok = false; break; }
                    steps.push_back({hin.types[seq[i]].name, rel->name, hin.types[seq[i + 1]].name});
                }
                if (ok) out.push_back(parse_metapath_triples(hin, steps));
            }
        }
        if (seq.size() > max_hops) continue;
        for (std::size_t t = 0; t < hin.types.size(); ++t) {
            if (hin.relation_between(seq.back(), t)) {
                auto next = seq;
                next.push_back(t);
                stack.push_back(std::move(next));
            }
        }
    }
    return out;
}

}  // namespace peagnn
