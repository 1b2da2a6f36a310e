#pragma once

#include <cstdint>
#include <vector>

#include "peagnn/hin.hpp"
#include "peagnn/metapath.hpp"

namespace peagnn {

// Synthetic HIN whose interactions are fully determined by one item
// feature: items carry exactly one "flavor", every user prefers exactly
// one flavor and interacts with all items of it (randomized timestamps).
// Users mirror their preference as a "cohort" feature so both sides of
// the entity-awareness term have signal.
struct PlantedConfig {
    std::size_t n_users = 200;
    std::size_t n_items = 100;
    std::size_t n_flavors = 10;
    std::uint64_t seed = 7;
    bool user_cohorts = true;
};

Hin make_planted_hin(const PlantedConfig& cfg);

// Metapath set for the planted schema: U-M-U, M-U-M, F-M-U (+ C-U-M when
// cohorts are present).
std::vector<Metapath> planted_metapaths(const Hin& hin);

// Small random HIN for property tests: random user/item counts, 1-2
// feature kinds, random edge patterns. Every user gets >= min_degree
// interactions so leave-one-out splits stay valid.
struct RandomHinConfig {
    std::size_t max_users = 8;
    std::size_t max_items = 8;
    std::size_t max_feature_kinds = 2;
    std::size_t max_feature_values = 5;
    std::size_t min_degree = 3;
    std::uint64_t seed = 1;
};

Hin make_random_hin(const RandomHinConfig& cfg);

// All 2..max_hops-hop metapaths expressible over the HIN's relations that
// end at a user or item type.
std::vector<Metapath> enumerate_metapaths(const Hin& hin, std::size_t max_hops);

}  // namespace peagnn
