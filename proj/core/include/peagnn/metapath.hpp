#pragma once

#include <string>
#include <vector>

#include "peagnn/csr.hpp"
#include "peagnn/hin.hpp"

namespace peagnn {

// Typed node-sequence schema, e.g. Y-M-U: information enters at year
// nodes, flows through movies and ends at users. Steps chain through the
// HIN's relations; the terminal type must be a user or item type.
struct Metapath {
    struct Step {
        std::size_t src_type, dst_type;
        std::string relation;
    };
    std::string name;  // dash-joined type initials, "Y-M-U"
    std::vector<Step> steps;

    std::size_t n_hops() const { return steps.size(); }
    std::size_t terminal_type() const { return steps.back().dst_type; }
};

// Per-hop propagation matrices over the full node-id space: entry (t, s)
// is 1 iff a relation edge connects source s (of the hop's source type) to
// target t (of its destination type). Raw pattern, no self loops: layer
// preparation adds those per layer kind.
struct StepAdjacency {
    std::vector<Csr> hops;
};

// Parses "Y-M-U" style schemas; each token is a node-type initial or full
// type name, and consecutive types must be connected by exactly one
// relation. parse_metapath_triples accepts explicit
// [src_type, relation, dst_type] steps for schemas where that uniqueness
// does not hold.
Metapath parse_metapath(const Hin& hin, const std::string& schema);
Metapath parse_metapath_triples(const Hin& hin,
                                const std::vector<std::vector<std::string>>& steps);

std::string type_initial(const std::string& type_name);

// Chaining, terminal-type rule, relation existence. Throws ConfigError.
void validate_metapath(const Metapath& mp, const Hin& hin);

// The paper's ML-small metapath set: the six schemas derivable from the
// public CSVs, plus A-M-U / W-M-U / D-M-U when enrichment relations are
// present in the HIN.
std::vector<Metapath> default_metapaths_movielens(const Hin& hin);

StepAdjacency derive_step_adjacencies(const Metapath& mp, const Hin& hin);

}  // namespace peagnn
