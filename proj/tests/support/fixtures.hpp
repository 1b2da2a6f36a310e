#pragma once

#include <filesystem>
#include <string>

#include "peagnn/hin.hpp"

namespace peagnn::testsupport {

// Unique temp directory under the system temp root; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& stem);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::string& path() const { return path_; }
    std::string sub(const std::string& name) const { return path_ + "/" + name; }

private:
    std::string path_;
};

// Tiny deterministic MovieLens-shaped corpus:
//   4 users x 6 movies with known ratings/timestamps, genres, years, tags.
// Designed so 2-core filtering drops exactly user 40 and movies 600/601.
void write_mini_movielens(const std::string& dir);

// Same corpus plus an extra_features.tsv with actor/director/writer rows.
void write_mini_movielens_enriched(const std::string& dir);

// Larger synthetic corpus in MovieLens CSV format with planted structure:
// items carry one flavor (mirrored as genre and year), users rate all items
// of one preferred flavor, and every user tags their first rated movie.
// Survives 3-core filtering intact, so CLI-level train runs have signal.
void write_synthetic_movielens(const std::string& dir, std::size_t n_users = 30,
                               std::size_t n_items = 20, std::size_t n_flavors = 4,
                               std::uint64_t seed = 5);

}  // namespace peagnn::testsupport
