#pragma once

#include <cstdint>
#include <vector>

#include "peagnn/hin.hpp"
#include "peagnn/rng.hpp"

namespace peagnn::bench {

// MovieLens-small-sized random HIN: ~600 users, ~2100 items, ~80k
// interactions, a genre-like and a year-like feature kind. Structure is
// random; these graphs exist to time kernels at production scale.
inline Hin scaled_hin(std::size_t n_users = 608, std::size_t n_items = 2121,
                      std::size_t per_user = 130, std::uint64_t seed = 1) {
    Rng rng(seed);
    const std::size_t n_genres = 18, n_years = 90;
    Hin hin;
    hin.types = {{"user", NodeRole::User, 0, n_users},
                 {"movie", NodeRole::Item, n_users, n_users + n_items}};
    std::size_t cursor = n_users + n_items;
    hin.types.push_back({"genre", NodeRole::Feature, cursor, cursor + n_genres});
    cursor += n_genres;
    hin.types.push_back({"year", NodeRole::Feature, cursor, cursor + n_years});
    cursor += n_years;
    hin.node_labels.assign(cursor, "x");

    std::int64_t ts = 0;
    std::vector<Coo<float>> rated;
    for (std::size_t u = 0; u < n_users; ++u) {
        std::vector<bool> seen(n_items, false);
        for (std::size_t k = 0; k < per_user; ++k) {
            std::size_t item = rng.below(n_items);
            if (seen[item]) continue;
            seen[item] = true;
            hin.interactions.push_back({u, n_users + item, ++ts});
            rated.push_back({u, item, 1.0f});
        }
    }
    hin.relations.push_back({"rated", 0, 1, csr_from_edges(n_users, n_items, std::move(rated))});

    std::vector<Coo<float>> genres, years;
    for (std::size_t i = 0; i < n_items; ++i) {
        const std::size_t n_g = 1 + rng.below(3);
        for (std::size_t g = 0; g < n_g; ++g) genres.push_back({i, rng.below(n_genres), 1.0f});
        years.push_back({i, rng.below(n_years), 1.0f});
    }
    hin.relations.push_back(
        {"has_genre", 1, 2, csr_from_edges(n_items, n_genres, std::move(genres))});
    hin.relations.push_back({"has_year", 1, 3, csr_from_edges(n_items, n_years, std::move(years))});
    hin.validate();
    return hin;
}

}  // namespace peagnn::bench
