#pragma once

#include <string>

#include "peagnn/csr.hpp"
#include "peagnn/errors.hpp"
#include "peagnn/rng.hpp"
#include "peagnn/tape.hpp"
#include "peagnn/tensor.hpp"

namespace peagnn {

enum class LayerKind { Gcn, Gat, Sage };

inline const char* layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Gcn: return "gcn";
        case LayerKind::Gat: return "gat";
        case LayerKind::Sage: return "sage";
    }
    return "gcn";
}

inline LayerKind layer_kind_from(const std::string& s) {
    if (s == "gcn") return LayerKind::Gcn;
    if (s == "gat") return LayerKind::Gat;
    if (s == "sage") return LayerKind::Sage;
    throw ConfigError("unknown layer kind '" + s + "', expected gcn|gat|sage");
}

// One (metapath, step) worth of weights. w_self only for Sage, attn only
// for GAT (single head, [2*d_out x 1]).
template <typename T>
struct LayerParamsT {
    LayerKind kind = LayerKind::Gcn;
    TensorT<T> w;
    TensorT<T> w_self;
    TensorT<T> attn;
};

using LayerParams = LayerParamsT<float>;

template <typename T>
LayerParamsT<T> init_layer_params(LayerKind kind, std::size_t d_in, std::size_t d_out,
                                  Rng& rng) {
    auto glorot = [&](std::size_t fan_in, std::size_t fan_out, std::size_t r, std::size_t c) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        return TensorT<T>::uniform(r, c, static_cast<T>(-limit), static_cast<T>(limit), rng);
    };
    LayerParamsT<T> p;
    p.kind = kind;
    p.w = glorot(d_in, d_out, d_in, d_out);
    if (kind == LayerKind::Sage) p.w_self = glorot(d_in, d_out, d_in, d_out);
    if (kind == LayerKind::Gat) p.attn = glorot(2 * d_out, 1, 2 * d_out, 1);
    return p;
}

// A raw step adjacency prepared for one layer kind. The propagation
// matrix bakes in the layer's self-loop convention so every node keeps a
// defined representation at each step:
//   GCN  : row-normalized (A + I)
//   Sage : row-normalized A (self handled by w_self; empty rows give a
//          zero neighbor mean)
//   GAT  : unweighted pattern A + I, weights come from attention
template <typename T>
struct PreparedStepT {
    SparseRef<T> prop;
};

template <typename T>
PreparedStepT<T> prepare_step(LayerKind kind, const Csr& raw) {
    CsrT<T> a = raw.template cast<T>();
    switch (kind) {
        case LayerKind::Gcn: return {make_sparse_ref<T>(row_normalize(add_identity(a)))};
        case LayerKind::Sage: return {make_sparse_ref<T>(row_normalize(a))};
        case LayerKind::Gat: return {make_sparse_ref<T>(add_identity(a))};
    }
    throw ConfigError("unreachable layer kind");
}

template <typename T>
TensorT<T> gcn_step(TapeT<T>* tape, const TensorT<T>& x, const PreparedStepT<T>& a,
                    const LayerParamsT<T>& p) {
    return relu(tape, spmm(tape, a.prop, matmul(tape, x, p.w)));
}

template <typename T>
TensorT<T> sage_step(TapeT<T>* tape, const TensorT<T>& x, const PreparedStepT<T>& a,
                     const LayerParamsT<T>& p) {
    TensorT<T> self_part = matmul(tape, x, p.w_self);
    TensorT<T> neigh = spmm(tape, a.prop, matmul(tape, x, p.w));
    return relu(tape, add(tape, self_part, neigh));
}

// Single-head GAT: score(t,s) = LeakyReLU_0.2(attn^T [W x_t ; W x_s]),
// softmax over each target's in-neighborhood (self loop included).
template <typename T>
TensorT<T> gat_step(TapeT<T>* tape, const TensorT<T>& x, const PreparedStepT<T>& a,
                    const LayerParamsT<T>& p) {
    const std::size_t d_out = p.w.cols;
    TensorT<T> xw = matmul(tape, x, p.w);
    TensorT<T> a_l = slice_rows(tape, p.attn, 0, d_out);
    TensorT<T> a_r = slice_rows(tape, p.attn, d_out, 2 * d_out);
    TensorT<T> l = matmul(tape, xw, a_l);  // target half
    TensorT<T> r = matmul(tape, xw, a_r);  // source half
    TensorT<T> logits = leaky_relu(tape, edge_logits(tape, a.prop, l, r), T(0.2));
    TensorT<T> alpha = segment_softmax(tape, a.prop, logits);
    return relu(tape, spmm_edge_weighted(tape, a.prop, alpha, xw));
}

template <typename T>
TensorT<T> layer_step(TapeT<T>* tape, const TensorT<T>& x, const PreparedStepT<T>& a,
                      const LayerParamsT<T>& p) {
    if (x.cols != p.w.rows)
        throw DimensionError("layer_step: input " + x.shape_str() + " vs weight " +
                             p.w.shape_str());
    switch (p.kind) {
        case LayerKind::Gcn: return gcn_step(tape, x, a, p);
        case LayerKind::Sage: return sage_step(tape, x, a, p);
        case LayerKind::Gat: return gat_step(tape, x, a, p);
    }
    throw ConfigError("unreachable layer kind");
}

}  // namespace peagnn
