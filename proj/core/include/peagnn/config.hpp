#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "peagnn/training.hpp"

namespace peagnn {

// Flat, fully serializable description of a run. A run directory always
// receives the exact resolved config that produced it.
struct RunConfig {
    std::string data_dir;  // raw CSV directory
    std::string hin_dir;   // serialized HIN (takes precedence when set)
    std::string out_dir = "run";
    std::string layer = "sage";
    std::vector<std::string> metapaths;  // empty = dataset defaults
    std::size_t kcore = 10;
    std::size_t batch_size = 1024;
    double lr = 0.001;
    double lambda = 0.1;
    std::size_t epochs = 100;
    std::size_t patience = 10;
    std::size_t neg_ratio = 4;
    std::size_t n_candidates = 100;
    std::size_t embed_dim = 64;
    std::size_t repr_dim = 16;
    std::size_t hidden_dim = 64;
    std::uint64_t seed = 1;
    std::size_t threads = 1;

    TrainConfig train_config() const;
};

RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& cfg);

// SHA-1 of the canonical JSON form; identical configs hash identically.
std::string config_hash(const RunConfig& cfg);

// Optional command-line overrides layered on top of a config file.
struct ConfigOverrides {
    std::optional<std::string> data_dir, hin_dir, out_dir, layer;
    std::optional<std::vector<std::string>> metapaths;
    std::optional<std::size_t> kcore, batch_size, epochs, patience, neg_ratio, n_candidates,
        threads;
    std::optional<double> lr, lambda;
    std::optional<std::uint64_t> seed;
};

RunConfig apply_overrides(RunConfig cfg, const ConfigOverrides& o);

}  // namespace peagnn
