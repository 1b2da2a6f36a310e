#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "peagnn/csr.hpp"

namespace peagnn {

enum class NodeRole { User, Item, Feature };

struct NodeTypeInfo {
    std::string name;       // "user", "movie", "year", "genre", "tag", ...
    NodeRole role = NodeRole::Feature;
    std::size_t begin = 0;  // global node-id range [begin, end)
    std::size_t end = 0;

    std::size_t count() const { return end - begin; }
};

// Relation CSR is stored over type-local indices: rows index the source
// type range, columns the destination type range.
struct Relation {
    std::string name;
    std::size_t src_type = 0;
    std::size_t dst_type = 0;
    Csr csr;
};

struct Interaction {
    std::size_t user;  // global node id
    std::size_t item;  // global node id
    std::int64_t ts;
};

// Heterogeneous information network: typed nodes partitioned into dense,
// contiguous id ranges (users, then items, then one range per feature
// kind), typed relations, and the timestamped user-item interactions.
struct Hin {
    std::vector<NodeTypeInfo> types;
    std::vector<Relation> relations;
    std::vector<Interaction> interactions;
    std::vector<std::string> node_labels;  // original id / feature value per node

    std::size_t n_nodes() const { return types.empty() ? 0 : types.back().end; }
    std::size_t n_users() const { return types.at(0).count(); }
    std::size_t n_items() const { return types.at(1).count(); }
    std::size_t user_begin() const { return types.at(0).begin; }
    std::size_t item_begin() const { return types.at(1).begin; }

    std::size_t type_of(std::size_t node) const;
    std::optional<std::size_t> find_type(const std::string& name) const;
    const Relation* find_relation(const std::string& name) const;
    // unique relation connecting two types in either storage direction
    const Relation* relation_between(std::size_t type_a, std::size_t type_b) const;

    void validate() const;  // id partition + relation dimension invariants
};

// Number of user-item interactions per user / item node (global ids).
std::vector<std::size_t> interaction_degrees(const Hin& hin);

// Iterative k-core on the user-item interaction graph: removes users and
// items of degree < k until fixpoint, drops feature nodes left without
// edges, and re-densifies node ids. Throws ContractError when nothing
// survives.
Hin kcore_filter(const Hin& hin, std::size_t k);

// Copy of the HIN whose interactions (and rated relation) are restricted
// to the given list; node ids are preserved. Used to keep held-out
// interactions out of the propagation graph.
Hin restrict_interactions(const Hin& hin, const std::vector<Interaction>& kept);

// Rebuilds a HIN keeping only flagged nodes; ids re-densified per type,
// relations filtered accordingly. Types whose count drops to zero are
// removed (except user and item, which must survive).
Hin filter_nodes(const Hin& hin, const std::vector<bool>& keep);

}  // namespace peagnn
