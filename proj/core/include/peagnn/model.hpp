#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "peagnn/errors.hpp"
#include "peagnn/hin.hpp"
#include "peagnn/layers.hpp"
#include "peagnn/metapath.hpp"
#include "peagnn/split.hpp"
#include "peagnn/tape.hpp"

namespace peagnn {

// Everything the forward pass needs besides parameters: per-metapath
// prepared step matrices, the terminal-type partition, and the node-id
// ranges for the two center types.
template <typename T>
struct PreparedGraphT {
    std::vector<std::string> metapath_names;
    std::vector<std::uint8_t> ends_at_user;            // per metapath
    std::vector<std::vector<PreparedStepT<T>>> hops;   // [metapath][hop]
    std::size_t user_begin = 0, user_count = 0;
    std::size_t item_begin = 0, item_count = 0;
    std::size_t gamma_user = 0, gamma_item = 0;
};

using PreparedGraph = PreparedGraphT<float>;

template <typename T>
PreparedGraphT<T> prepare_graph(const Hin& hin, const std::vector<Metapath>& metapaths,
                                LayerKind kind) {
    PreparedGraphT<T> g;
    g.user_begin = hin.types.at(0).begin;
    g.user_count = hin.types.at(0).count();
    g.item_begin = hin.types.at(1).begin;
    g.item_count = hin.types.at(1).count();
    for (const auto& mp : metapaths) {
        validate_metapath(mp, hin);
        const bool to_user = hin.types[mp.terminal_type()].role == NodeRole::User;
        g.metapath_names.push_back(mp.name);
        g.ends_at_user.push_back(to_user ? 1 : 0);
        (to_user ? g.gamma_user : g.gamma_item)++;
        StepAdjacency adj = derive_step_adjacencies(mp, hin);
        std::vector<PreparedStepT<T>> prepared;
        for (const auto& hop : adj.hops) prepared.push_back(prepare_step<T>(kind, hop));
        g.hops.push_back(std::move(prepared));
    }
    if (g.gamma_user == 0 || g.gamma_item == 0)
        throw ConfigError("metapath set must contain at least one user-ending and one "
                          "item-ending path (got " + std::to_string(g.gamma_user) + " / " +
                          std::to_string(g.gamma_item) + ")");
    return g;
}

// X_0 embedding table, per-(metapath, step) layer weights, per-terminal
// fusion matrices, and the 2-layer scoring MLP.
template <typename T>
struct ModelParamsT {
    std::size_t embed_dim = 64;
    std::size_t repr_dim = 16;
    LayerKind kind = LayerKind::Sage;

    TensorT<T> embeddings;                           // V x embed_dim
    std::vector<std::vector<LayerParamsT<T>>> layers;  // [metapath][step]
    TensorT<T> fusion_w_user;                        // repr_dim x gamma_user
    TensorT<T> fusion_w_item;                        // repr_dim x gamma_item
    TensorT<T> mlp_w1;                               // 2*repr_dim x hidden
    TensorT<T> mlp_b1;                               // 1 x hidden
    TensorT<T> mlp_w2;                               // hidden x 1
    TensorT<T> mlp_b2;                               // 1 x 1

    template <typename F>
    void for_each_param(F&& f) {
        f("embeddings", embeddings);
        for (std::size_t m = 0; m < layers.size(); ++m) {
            for (std::size_t s = 0; s < layers[m].size(); ++s) {
                const std::string stem = "mp" + std::to_string(m) + ".step" + std::to_string(s);
                f(stem + ".w", layers[m][s].w);
                if (layers[m][s].w_self.size()) f(stem + ".w_self", layers[m][s].w_self);
                if (layers[m][s].attn.size()) f(stem + ".attn", layers[m][s].attn);
            }
        }
        f("fusion_w_user", fusion_w_user);
        f("fusion_w_item", fusion_w_item);
        f("mlp_w1", mlp_w1);
        f("mlp_b1", mlp_b1);
        f("mlp_w2", mlp_w2);
        f("mlp_b2", mlp_b2);
    }

    bool all_finite() {
        bool ok = true;
        for_each_param([&](const std::string&, TensorT<T>& t) { ok = ok && t.all_finite(); });
        return ok;
    }
};

using ModelParams = ModelParamsT<float>;

template <typename T>
ModelParamsT<T> init_model_params(const PreparedGraphT<T>& g, std::size_t n_nodes,
                                  std::size_t embed_dim, std::size_t repr_dim,
                                  std::size_t hidden, LayerKind kind, Rng& rng) {
    ModelParamsT<T> p;
    p.embed_dim = embed_dim;
    p.repr_dim = repr_dim;
    p.kind = kind;
    p.embeddings = TensorT<T>::uniform(n_nodes, embed_dim, T(-0.1), T(0.1), rng);
    for (std::size_t m = 0; m < g.hops.size(); ++m) {
        std::vector<LayerParamsT<T>> steps;
        for (std::size_t s = 0; s < g.hops[m].size(); ++s) {
            const std::size_t d_in = s == 0 ? embed_dim : repr_dim;
            steps.push_back(init_layer_params<T>(kind, d_in, repr_dim, rng));
        }
        p.layers.push_back(std::move(steps));
    }
    auto glorot = [&](std::size_t r, std::size_t c) {
        const double limit = std::sqrt(6.0 / static_cast<double>(r + c));
        return TensorT<T>::uniform(r, c, static_cast<T>(-limit), static_cast<T>(limit), rng);
    };
    p.fusion_w_user = glorot(repr_dim, g.gamma_user);
    p.fusion_w_item = glorot(repr_dim, g.gamma_item);
    p.mlp_w1 = glorot(2 * repr_dim, hidden);
    p.mlp_b1 = TensorT<T>::zeros(1, hidden);
    p.mlp_w2 = glorot(hidden, 1);
    p.mlp_b2 = TensorT<T>::zeros(1, 1);
    return p;
}

// Registers every parameter tensor as a leaf on the tape and returns the
// watched copy; gradient lookup happens through the returned tensors.
template <typename T>
ModelParamsT<T> watch_params(TapeT<T>& tape, const ModelParamsT<T>& p) {
    ModelParamsT<T> w = p;
    w.for_each_param([&](const std::string&, TensorT<T>& t) { t = tape.leaf(t); });
    return w;
}

// Final representations after metapath aggregation and attentive fusion,
// restricted to the center types. Row i of e_user is node user_begin + i.
// Raw importance scores are kept for the shift-invariance diagnostics.
template <typename T>
struct FusedReprT {
    TensorT<T> e_user;       // V_u x repr_dim
    TensorT<T> e_item;       // V_i x repr_dim
    TensorT<T> att_user;     // V_u x gamma_user
    TensorT<T> att_item;     // V_i x gamma_item
    TensorT<T> scores_user;  // V_u x gamma_user, pre-softmax
    TensorT<T> scores_item;
    std::size_t user_begin = 0, item_begin = 0;
};

using FusedRepr = FusedReprT<float>;

// Eqs of the metapath aggregation layer: stacked per-hop GNN steps over
// one metapath's prepared adjacencies, starting from the embedding table.
template <typename T>
TensorT<T> metapath_aggregate(TapeT<T>* tape, const TensorT<T>& x0,
                              const std::vector<PreparedStepT<T>>& hops,
                              const std::vector<LayerParamsT<T>>& steps) {
    if (hops.size() != steps.size())
        throw ContractError("metapath_aggregate: " + std::to_string(hops.size()) +
                            " hops vs " + std::to_string(steps.size()) + " layer params");
    TensorT<T> h = x0;
    for (std::size_t k = 0; k < hops.size(); ++k) h = layer_step(tape, h, hops[k], steps[k]);
    return h;
}

template <typename T>
struct FusionSlice {
    TensorT<T> fused;   // V x repr_dim
    TensorT<T> att;     // V x gamma
    TensorT<T> scores;  // V x gamma, pre-softmax
};

// Node-wise attentive fusion: score of metapath i at node v is the dot
// product of column i of w with v's representation from metapath i;
// softmax over metapaths, then the weighted sum of representations.
template <typename T>
FusionSlice<T> fuse_attention(TapeT<T>* tape, const std::vector<TensorT<T>>& reprs,
                              const TensorT<T>& w) {
    if (reprs.empty()) throw ContractError("fuse_attention: no metapath representations");
    if (w.cols != reprs.size())
        throw DimensionError("fuse_attention: w " + w.shape_str() + " vs " +
                             std::to_string(reprs.size()) + " metapaths");
    std::vector<TensorT<T>> score_cols;
    for (std::size_t i = 0; i < reprs.size(); ++i)
        score_cols.push_back(matmul(tape, reprs[i], slice_cols(tape, w, i, i + 1)));
    FusionSlice<T> out;
    out.scores = concat_cols(tape, score_cols);
    out.att = softmax_rows(tape, out.scores);
    TensorT<T> fused;
    for (std::size_t i = 0; i < reprs.size(); ++i) {
        TensorT<T> weighted = mul_colvec(tape, reprs[i], slice_cols(tape, out.att, i, i + 1));
        fused = i == 0 ? weighted : add(tape, fused, weighted);
    }
    out.fused = std::move(fused);
    return out;
}

// Full metapath aggregation + per-terminal-type fusion over all nodes.
template <typename T>
FusedReprT<T> forward_all(TapeT<T>* tape, const ModelParamsT<T>& params,
                          const PreparedGraphT<T>& g) {
    if (params.layers.size() != g.hops.size())
        throw ContractError("forward_all: model has " + std::to_string(params.layers.size()) +
                            " metapaths, graph has " + std::to_string(g.hops.size()));
    std::vector<TensorT<T>> user_reprs, item_reprs;
    for (std::size_t m = 0; m < g.hops.size(); ++m) {
        TensorT<T> h = metapath_aggregate(tape, params.embeddings, g.hops[m], params.layers[m]);
        (g.ends_at_user[m] ? user_reprs : item_reprs).push_back(std::move(h));
    }
    FusionSlice<T> fu = fuse_attention(tape, user_reprs, params.fusion_w_user);
    FusionSlice<T> fi = fuse_attention(tape, item_reprs, params.fusion_w_item);

    FusedReprT<T> out;
    out.user_begin = g.user_begin;
    out.item_begin = g.item_begin;
    out.e_user = slice_rows(tape, fu.fused, g.user_begin, g.user_begin + g.user_count);
    out.att_user = slice_rows(tape, fu.att, g.user_begin, g.user_begin + g.user_count);
    out.scores_user = slice_rows(tape, fu.scores, g.user_begin, g.user_begin + g.user_count);
    out.e_item = slice_rows(tape, fi.fused, g.item_begin, g.item_begin + g.item_count);
    out.att_item = slice_rows(tape, fi.att, g.item_begin, g.item_begin + g.item_count);
    out.scores_item = slice_rows(tape, fi.scores, g.item_begin, g.item_begin + g.item_count);
    return out;
}

// Graph-level readout of one (user, item) pair: concat of the two fused
// center representations.
template <typename T>
TensorT<T> readout_graph_level(TapeT<T>* tape, const FusedReprT<T>& fused, std::size_t user,
                               std::size_t item) {
    if (user < fused.user_begin || user - fused.user_begin >= fused.e_user.rows)
        throw ContractError("readout: node " + std::to_string(user) + " is not a user id");
    if (item < fused.item_begin || item - fused.item_begin >= fused.e_item.rows)
        throw ContractError("readout: node " + std::to_string(item) + " is not an item id");
    TensorT<T> eu = gather_rows(tape, fused.e_user, {user - fused.user_begin});
    TensorT<T> ei = gather_rows(tape, fused.e_item, {item - fused.item_begin});
    return concat_cols(tape, eu, ei);
}

// 2-layer MLP mapping a graph-level representation to a matching score.
template <typename T>
TensorT<T> predict_score(TapeT<T>* tape, const TensorT<T>& e_g, const ModelParamsT<T>& p) {
    TensorT<T> h = relu(tape, add_rowvec(tape, matmul(tape, e_g, p.mlp_w1), p.mlp_b1));
    return add_rowvec(tape, matmul(tape, h, p.mlp_w2), p.mlp_b2);
}

// Batched scoring of (user, item) node-id pairs; returns [B x 1].
template <typename T>
TensorT<T> score_pairs(TapeT<T>* tape, const FusedReprT<T>& fused, const ModelParamsT<T>& p,
                       const std::vector<std::size_t>& users,
                       const std::vector<std::size_t>& items) {
    if (users.size() != items.size())
        throw ContractError("score_pairs: user/item list length mismatch");
    std::vector<std::size_t> urows(users.size()), irows(items.size());
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (users[i] < fused.user_begin || users[i] - fused.user_begin >= fused.e_user.rows)
            throw ContractError("score_pairs: node " + std::to_string(users[i]) +
                                " is not a user id");
        if (items[i] < fused.item_begin || items[i] - fused.item_begin >= fused.e_item.rows)
            throw ContractError("score_pairs: node " + std::to_string(items[i]) +
                                " is not an item id");
        urows[i] = users[i] - fused.user_begin;
        irows[i] = items[i] - fused.item_begin;
    }
    TensorT<T> eu = gather_rows(tape, fused.e_user, std::move(urows));
    TensorT<T> ei = gather_rows(tape, fused.e_item, std::move(irows));
    TensorT<T> eg = concat_cols(tape, eu, ei);
    return predict_score(tape, eg, p);
}

// Mean over triples of -ln sigma(r+ - r-), computed as softplus(-(r+ - r-)).
template <typename T>
TensorT<T> bpr_loss(TapeT<T>* tape, const TensorT<T>& scores_pos, const TensorT<T>& scores_neg) {
    check_same_shape(scores_pos, scores_neg, "bpr_loss");
    TensorT<T> margin = sub(tape, scores_pos, scores_neg);
    return mean_all(tape, softplus(tape, scale(tape, margin, T(-1))));
}

// Squared-Euclidean rows: d_i = || a_i - b_i ||^2  ->  [B x 1]
template <typename T>
TensorT<T> row_sqdist(TapeT<T>* tape, const TensorT<T>& a, const TensorT<T>& b) {
    TensorT<T> diff = sub(tape, a, b);
    return row_sums(tape, mul(tape, diff, diff));
}

// Entity-awareness regularizer on the raw embedding table: pulls nodes
// toward observed feature entities and away from unobserved same-kind
// ones. Mean of -ln sigma over contributing triples; 0 when all skipped.
template <typename T>
TensorT<T> entity_loss(TapeT<T>* tape, const TensorT<T>& embeddings, const ContrastBatch& batch) {
    if (batch.empty()) return TensorT<T>::scalar(T(0));
    TensorT<T> xu = gather_rows(tape, embeddings, batch.user);
    TensorT<T> xfpu = gather_rows(tape, embeddings, batch.f_pos_u);
    TensorT<T> xfnu = gather_rows(tape, embeddings, batch.f_neg_u);
    TensorT<T> xi = gather_rows(tape, embeddings, batch.item);
    TensorT<T> xfpi = gather_rows(tape, embeddings, batch.f_pos_i);
    TensorT<T> xfni = gather_rows(tape, embeddings, batch.f_neg_i);
    TensorT<T> user_gap = sub(tape, row_sqdist(tape, xu, xfnu), row_sqdist(tape, xu, xfpu));
    TensorT<T> item_gap = sub(tape, row_sqdist(tape, xi, xfni), row_sqdist(tape, xi, xfpi));
    TensorT<T> margin = add(tape, user_gap, item_gap);
    return mean_all(tape, softplus(tape, scale(tape, margin, T(-1))));
}

// L = L_CF + lambda * L_Entity; lambda = 0 returns L_CF exactly.
template <typename T>
TensorT<T> total_loss(TapeT<T>* tape, const TensorT<T>& l_cf, const TensorT<T>& l_entity,
                      T lambda) {
    if (lambda < T(0)) throw ContractError("total_loss: lambda must be >= 0");
    if (lambda == T(0)) return l_cf;
    return add(tape, l_cf, scale(tape, l_entity, lambda));
}

}  // namespace peagnn
