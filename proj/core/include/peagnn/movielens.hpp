#pragma once

#include <string>

#include "peagnn/hin.hpp"

namespace peagnn {

// Builds the raw (unfiltered) MovieLens-small HIN from a directory holding
// ratings.csv, movies.csv and tags.csv, plus an optional extra_features.tsv
// (columns movieId <tab> kind <tab> value) for actor/director/writer style
// enrichment.
//
// Node types: user, movie, then feature kinds year, genre, tag and any
// enrichment kinds. Relations: rated (user-movie, timestamps retained),
// has_year, has_genre, user_tag, item_tag, and per enrichment kind
// acted_by / directed_by / written_by / has_<kind>.
Hin ingest_movielens_small(const std::string& data_dir);

struct HinStats {
    std::size_t n_nodes, n_users, n_items, n_interactions;
};

HinStats hin_stats(const Hin& hin);

}  // namespace peagnn
