#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "peagnn/hin.hpp"
#include "peagnn/rng.hpp"

namespace peagnn {

struct Triple {
    std::size_t user, pos_item, neg_item;  // global node ids
};

// Leave-one-out split: per user the latest interaction is the test
// positive, one seeded-random remaining interaction the validation
// positive, everything else trains. Candidate lists are per test user.
struct SplitDataset {
    std::vector<Interaction> train_pos;
    std::vector<Interaction> test_pos;  // one per user
    std::vector<Interaction> val_pos;   // one per user
    std::vector<Triple> train_triples;  // current epoch's negatives
    std::unordered_map<std::size_t, std::vector<std::size_t>> eval_candidates;

    // all items a user ever interacted with (train + val + test), sorted
    std::unordered_map<std::size_t, std::vector<std::size_t>> user_positives;
};

SplitDataset leave_one_out_split(const Hin& hin, std::uint64_t seed);

// `ratio` negatives per train positive, uniform over items the user never
// interacted with, sampled with replacement.
std::vector<Triple> sample_train_negatives(const SplitDataset& split, const Hin& hin,
                                           std::size_t ratio, Rng& rng);

// Per held-out positive: the positive plus n_candidates-1 distinct unseen
// items, shuffled. Works for both the test and the validation protocol.
std::unordered_map<std::size_t, std::vector<std::size_t>> sample_eval_candidates(
    const std::vector<Interaction>& held_out, const SplitDataset& split, const Hin& hin,
    std::size_t n_candidates, Rng& rng);

// ---- entity-awareness contrast sampling --------------------------------

// Per-node view of connected feature entities grouped by feature kind,
// built once so contrast sampling is O(1) dictionary work per draw.
class FeatureIndex {
public:
    explicit FeatureIndex(const Hin& hin);

    struct Contrast {
        std::size_t observed;    // global node id of a connected feature
        std::size_t unobserved;  // same-kind feature not connected
    };

    // nullopt is the skip signal: the node has no feature entities, or the
    // drawn kind is fully connected so no negative exists.
    std::optional<Contrast> sample_contrast(std::size_t node, Rng& rng) const;

    bool has_features(std::size_t node) const;

private:
    struct KindSlice {
        std::size_t type_idx;
        std::vector<std::size_t> connected;  // sorted global ids
    };
    std::vector<std::vector<KindSlice>> per_node_;
    std::vector<NodeTypeInfo> types_;
};

// Triples with a usable (f+, f-) pair on both the user and positive-item
// side; triples hitting a skip signal are counted but contribute nothing.
struct ContrastBatch {
    std::vector<std::size_t> user, f_pos_u, f_neg_u;
    std::vector<std::size_t> item, f_pos_i, f_neg_i;
    std::size_t n_skipped = 0;

    std::size_t size() const { return user.size(); }
    bool empty() const { return user.empty(); }
};

ContrastBatch build_contrast_batch(const FeatureIndex& index, const std::vector<Triple>& triples,
                                   Rng& rng);

}  // namespace peagnn
