#pragma once

#include <set>
#include <vector>

#include "peagnn/hin.hpp"
#include "peagnn/metapath.hpp"
#include "peagnn/tensor.hpp"

namespace peagnn::testsupport {

// Exhaustive DFS over the HIN's relations (independent of the derived
// adjacency machinery): exists[t][s] == 1 iff a typed path s -> ... -> t
// follows the metapath's steps.
inline Tensor dfs_path_existence(const Metapath& mp, const Hin& hin) {
    const std::size_t v = hin.n_nodes();
    auto step_neighbors = [&](const Metapath::Step& s, std::size_t node) {
        std::vector<std::size_t> out;
        const Relation* rel = hin.find_relation(s.relation);
        const bool forward = rel->src_type == s.src_type && rel->dst_type == s.dst_type;
        const auto& src_t = hin.types[forward ? rel->src_type : rel->dst_type];
        const auto& dst_t = hin.types[forward ? rel->dst_type : rel->src_type];
        if (forward) {
            if (node < src_t.begin || node >= src_t.end) return out;
            const std::size_t i = node - src_t.begin;
            for (std::size_t k = rel->csr.row_ptr[i]; k < rel->csr.row_ptr[i + 1]; ++k)
                out.push_back(dst_t.begin + rel->csr.col_idx[k]);
        } else {
            // relation stored dst->src: rows are the step's destinations
            if (node < src_t.begin || node >= src_t.end) return out;
            const std::size_t j = node - src_t.begin;
            for (std::size_t i = 0; i < rel->csr.n_rows; ++i)
                for (std::size_t k = rel->csr.row_ptr[i]; k < rel->csr.row_ptr[i + 1]; ++k)
                    if (rel->csr.col_idx[k] == j) out.push_back(dst_t.begin + i);
        }
        return out;
    };
    Tensor exists(v, v);
    const auto& first = hin.types[mp.steps.front().src_type];
    for (std::size_t s = first.begin; s < first.end; ++s) {
        std::set<std::size_t> frontier{s};
        for (const auto& step : mp.steps) {
            std::set<std::size_t> next;
            for (std::size_t node : frontier)
                for (std::size_t nb : step_neighbors(step, node)) next.insert(nb);
            frontier = std::move(next);
        }
        for (std::size_t t : frontier) exists.at(t, s) = 1.0f;
    }
    return exists;
}

// Boolean composition A_n ... A_1 of the derived step matrices.
inline Tensor boolean_compose(const StepAdjacency& adj) {
    const std::size_t v = adj.hops.front().n_rows;
    Tensor reach = Tensor::identity(v);
    for (const auto& hop : adj.hops) {
        Tensor next(v, v);
        for (std::size_t t = 0; t < v; ++t)
            for (std::size_t k = hop.row_ptr[t]; k < hop.row_ptr[t + 1]; ++k) {
                const std::size_t mid = hop.col_idx[k];
                for (std::size_t s = 0; s < v; ++s)
                    if (reach.at(mid, s) != 0.0f) next.at(t, s) = 1.0f;
            }
        reach = std::move(next);
    }
    return reach;
}

}  // namespace peagnn::testsupport
