#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "peagnn/model.hpp"

namespace peagnn {

struct CheckpointMeta {
    std::vector<std::string> metapath_names;
    std::vector<std::size_t> steps_per_metapath;
    LayerKind layer = LayerKind::Sage;
    std::uint64_t seed = 0;
    std::string hin_hash;
    std::size_t n_nodes = 0;
    std::size_t embed_dim = 64, repr_dim = 16, hidden_dim = 64;
    std::size_t gamma_user = 0, gamma_item = 0;
};

// <dir>/checkpoint.json manifest + <dir>/params.bin, parameters stored as
// flat little-endian f32 arrays in registry order at recorded offsets.
void save_checkpoint(const ModelParams& params, const CheckpointMeta& meta,
                     const std::string& dir);
std::pair<ModelParams, CheckpointMeta> load_checkpoint(const std::string& dir);

}  // namespace peagnn
