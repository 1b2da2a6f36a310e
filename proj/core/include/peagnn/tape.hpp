#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "peagnn/csr.hpp"
#include "peagnn/errors.hpp"
#include "peagnn/tensor.hpp"

namespace peagnn {

enum class OpKind {
    Leaf,
    MatMul,
    Spmm,
    SpmmEdgeWeighted,
    EdgeLogits,
    SegmentSoftmax,
    Relu,
    LeakyRelu,
    Sigmoid,
    Ln,
    Softplus,
    SoftmaxRows,
    GatherRows,
    ConcatCols,
    SliceCols,
    SliceRows,
    Add,
    Sub,
    Mul,
    MulColVec,
    AddRowVec,
    RowSums,
    SumAll,
    MeanAll,
    Scale,
};

enum class Act { Relu, LeakyRelu, Sigmoid, Ln, Softplus };

// Reverse-mode tape. Nodes are appended in execution order, which is a
// topological order by construction; backward is one reverse sweep.
// One tape per training step, cleared (or dropped) between steps.
// Not thread safe; tensors themselves are value types and may travel.
template <typename T>
class TapeT {
public:
    struct Node {
        OpKind kind = OpKind::Leaf;
        int in0 = -1;
        int in1 = -1;
        std::vector<int> ins;             // ConcatCols only
        TensorT<T> s0, s1;                // saved forward values as each op needs
        SparseRef<T> sp;                  // sparse ops
        std::shared_ptr<const std::vector<std::size_t>> aux;  // gather ids / concat widths
        T c0 = T(0);                      // leaky slope / scale factor
        std::size_t a0 = 0, a1 = 0;       // slice bounds
        std::size_t out_rows = 0, out_cols = 0;
    };

    int push(Node n, std::size_t out_rows, std::size_t out_cols) {
        n.out_rows = out_rows;
        n.out_cols = out_cols;
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    // Registers a differentiable root (parameter or input under test).
    TensorT<T> leaf(const TensorT<T>& value) {
        TensorT<T> out = value;
        Node n;
        n.kind = OpKind::Leaf;
        out.node = push(std::move(n), value.rows, value.cols);
        return out;
    }

    std::size_t size() const { return nodes_.size(); }

    void clear() {
        nodes_.clear();
        grads_.clear();
    }

    // Reverse sweep from a scalar loss. Every tracked node reachable from
    // the loss receives its gradient; unreached nodes read back as zero.
    void backward(const TensorT<T>& loss) {
        if (loss.node < 0 || static_cast<std::size_t>(loss.node) >= nodes_.size())
            throw ContractError("backward: loss was not produced on this tape");
        if (!(loss.rows == 1 && loss.cols == 1))
            throw ContractError("backward: loss must be scalar, got " + loss.shape_str());
        grads_.assign(nodes_.size(), TensorT<T>());
        grads_[loss.node] = TensorT<T>::scalar(T(1));
        for (int id = loss.node; id >= 0; --id) {
            if (grads_[id].data.empty()) continue;
            step_backward(id);
        }
    }

    bool has_grad(const TensorT<T>& t) const {
        return t.node >= 0 && static_cast<std::size_t>(t.node) < grads_.size() &&
               !grads_[t.node].data.empty();
    }

    // Gradient of the last backward() w.r.t. the value recorded at t.node.
    // Unreached nodes materialize as zeros of the recorded shape.
    TensorT<T> grad(const TensorT<T>& t) const {
        if (t.node < 0)
            throw ContractError("grad: tensor was never recorded on a tape");
        const Node& n = nodes_.at(t.node);
        if (static_cast<std::size_t>(t.node) < grads_.size() && !grads_[t.node].data.empty())
            return grads_[t.node];
        return TensorT<T>::zeros(n.out_rows, n.out_cols);
    }

    const Node& node(int id) const { return nodes_.at(id); }

private:
    std::vector<Node> nodes_;
    std::vector<TensorT<T>> grads_;

    TensorT<T>& grad_buf(int id) {
        if (grads_[id].data.empty()) {
            grads_[id] = TensorT<T>::zeros(nodes_[id].out_rows, nodes_[id].out_cols);
        }
        return grads_[id];
    }

    void step_backward(int id);

    template <typename U>
    friend TensorT<U> matmul(TapeT<U>*, const TensorT<U>&, const TensorT<U>&);
};

namespace detail {

template <typename T>
inline T stable_sigmoid(T x) {
    if (x >= T(0)) {
        T e = std::exp(-x);
        return T(1) / (T(1) + e);
    }
    T e = std::exp(x);
    return e / (T(1) + e);
}

template <typename T>
inline T stable_softplus(T x) {
    // ln(1 + e^x) without overflow on either tail
    T ax = x < T(0) ? -x : x;
    T m = x > T(0) ? x : T(0);
    return m + std::log1p(std::exp(-ax));
}

template <typename T>
inline void matmul_into(const TensorT<T>& a, const TensorT<T>& b, TensorT<T>& y) {
    const std::size_t m = a.rows, k = a.cols, n = b.cols;
    y.rows = m;
    y.cols = n;
    y.data.assign(m * n, T(0));
    for (std::size_t i = 0; i < m; ++i) {
        const T* arow = a.data.data() + i * k;
        T* yrow = y.data.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const T aip = arow[p];
            if (aip == T(0)) continue;
            const T* brow = b.data.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) yrow[j] += aip * brow[j];
        }
    }
}

// da += g * b^T
template <typename T>
inline void acc_matmul_bt(const TensorT<T>& g, const TensorT<T>& b, TensorT<T>& da) {
    const std::size_t m = g.rows, n = g.cols, k = b.rows;
    for (std::size_t i = 0; i < m; ++i) {
        const T* grow = g.data.data() + i * n;
        T* dai = da.data.data() + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const T* brow = b.data.data() + p * n;
            T s = T(0);
            for (std::size_t j = 0; j < n; ++j) s += grow[j] * brow[j];
            dai[p] += s;
        }
    }
}

// db += a^T * g
template <typename T>
inline void acc_at_matmul(const TensorT<T>& a, const TensorT<T>& g, TensorT<T>& db) {
    const std::size_t m = a.rows, k = a.cols, n = g.cols;
    for (std::size_t i = 0; i < m; ++i) {
        const T* arow = a.data.data() + i * k;
        const T* grow = g.data.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const T aip = arow[p];
            if (aip == T(0)) continue;
            T* dbrow = db.data.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) dbrow[j] += aip * grow[j];
        }
    }
}

}  // namespace detail

// ---- forward operations ----------------------------------------------
// Every op computes eagerly and, when a tape is given and at least one
// input is tracked, records what backward needs. tape == nullptr runs
// pure inference.

template <typename T>
TensorT<T> matmul(TapeT<T>* tape, const TensorT<T>& a, const TensorT<T>& b) {
    if (a.cols != b.rows)
        throw DimensionError("matmul: inner dimensions of " + a.shape_str() + " and " +
                             b.shape_str() + " do not match");
    TensorT<T> y;
    detail::matmul_into(a, b, y);
    if (tape && (a.node >= 0 || b.node >= 0)) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::MatMul;
        n.in0 = a.node;
        n.in1 = b.node;
        if (b.node >= 0) n.s0 = a;  // needed for db
        if (a.node >= 0) n.s1 = b;  // needed for da
        y.node = tape->push(std::move(n), y.rows, y.cols);
    }
    return y;
}

template <typename T>
TensorT<T> spmm(TapeT<T>* tape, const SparseRef<T>& a, const TensorT<T>& x) {
    TensorT<T> y;
    spmm_into(a->mat, x, y);
    if (tape && x.node >= 0) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::Spmm;
        n.in0 = x.node;
        n.sp = a;
        y.node = tape->push(std::move(n), y.rows, y.cols);
    }
    return y;
}

// out_t = sum over edges k of row t: alpha_k * x[col_k].
// The CSR supplies the pattern; alpha carries the (possibly learned) weights.
template <typename T>
TensorT<T> spmm_edge_weighted(TapeT<T>* tape, const SparseRef<T>& a,
                              const TensorT<T>& alpha, const TensorT<T>& x) {
    const CsrT<T>& m = a->mat;
    if (alpha.rows != m.nnz() || alpha.cols != 1)
        throw DimensionError("spmm_edge_weighted: alpha " + alpha.shape_str() +
                             " must be [" + std::to_string(m.nnz()) + "x1]");
    if (m.n_cols != x.rows)
        throw DimensionError("spmm_edge_weighted: pattern cols " + std::to_string(m.n_cols) +
                             " vs x " + x.shape_str());
    TensorT<T> y(m.n_rows, x.cols);
    const std::size_t d = x.cols;
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        T* out = y.data.data() + r * d;
        for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
            const T w = alpha.data[k];
            const T* src = x.data.data() + m.col_idx[k] * d;
            for (std::size_t j = 0; j < d; ++j) out[j] += w * src[j];
        }
    }
    if (tape && (alpha.node >= 0 || x.node >= 0)) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::SpmmEdgeWeighted;
        n.in0 = alpha.node;
        n.in1 = x.node;
        n.sp = a;
        n.s0 = alpha;
        n.s1 = x;
        y.node = tape->push(std::move(n), y.rows, y.cols);
    }
    return y;
}

// Per edge k (target t = row, source s = col): e_k = l[t] + r[s].
template <typename T>
TensorT<T> edge_logits(TapeT<T>* tape, const SparseRef<T>& a,
                       const TensorT<T>& l, const TensorT<T>& r) {
    const CsrT<T>& m = a->mat;
    if (l.rows != m.n_rows || l.cols != 1)
        throw DimensionError("edge_logits: l " + l.shape_str() + " must index targets");
    if (r.rows != m.n_cols || r.cols != 1)
        throw DimensionError("edge_logits: r " + r.shape_str() + " must index sources");
    TensorT<T> e(m.nnz(), 1);
    for (std::size_t t = 0; t < m.n_rows; ++t)
        for (std::size_t k = m.row_ptr[t]; k < m.row_ptr[t + 1]; ++k)
            e.data[k] = l.data[t] + r.data[m.col_idx[k]];
    if (tape && (l.node >= 0 || r.node >= 0)) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::EdgeLogits;
        n.in0 = l.node;
        n.in1 = r.node;
        n.sp = a;
        e.node = tape->push(std::move(n), e.rows, e.cols);
    }
    return e;
}

// Softmax over each CSR row segment of an edge-aligned column vector.
template <typename T>
TensorT<T> segment_softmax(TapeT<T>* tape, const SparseRef<T>& a, const TensorT<T>& z) {
    const CsrT<T>& m = a->mat;
    if (z.rows != m.nnz() || z.cols != 1)
        throw DimensionError("segment_softmax: z " + z.shape_str() + " must be edge aligned");
    TensorT<T> out(z.rows, 1);
    for (std::size_t t = 0; t < m.n_rows; ++t) {
        const std::size_t k0 = m.row_ptr[t], k1 = m.row_ptr[t + 1];
        if (k0 == k1) continue;
        T mx = z.data[k0];
        for (std::size_t k = k0 + 1; k < k1; ++k) mx = std::max(mx, z.data[k]);
        T s = T(0);
        for (std::size_t k = k0; k < k1; ++k) {
            out.data[k] = std::exp(z.data[k] - mx);
            s += out.data[k];
        }
        for (std::size_t k = k0; k < k1; ++k) out.data[k] /= s;
    }
    if (tape && z.node >= 0) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::SegmentSoftmax;
        n.in0 = z.node;
        n.sp = a;
        n.s0 = out;
        out.node = tape->push(std::move(n), out.rows, out.cols);
    }
    return out;
}

template <typename T>
TensorT<T> activation(TapeT<T>* tape, const TensorT<T>& x, Act kind, T slope = T(0.2)) {
    TensorT<T> y(x.rows, x.cols);
    switch (kind) {
        case Act::Relu:
            for (std::size_t i = 0; i < x.size(); ++i)
                y.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
            break;
        case Act::LeakyRelu:
            for (std::size_t i = 0; i < x.size(); ++i)
                y.data[i] = x.data[i] > T(0) ? x.data[i] : slope * x.data[i];
            break;
        case Act::Sigmoid:
            for (std::size_t i = 0; i < x.size(); ++i)
                y.data[i] = detail::stable_sigmoid(x.data[i]);
            break;
        case Act::Ln:
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (!(x.data[i] > T(0)))
                    throw DomainError("ln: non-positive entry " + std::to_string(x.data[i]) +
                                      " at flat index " + std::to_string(i));
                y.data[i] = std::log(x.data[i]);
            }
            break;
        case Act::Softplus:
            for (std::size_t i = 0; i < x.size(); ++i)
                y.data[i] = detail::stable_softplus(x.data[i]);
            break;
    }
    if (tape && x.node >= 0) {
        typename TapeT<T>::Node n;
        switch (kind) {
            case Act::Relu: n.kind = OpKind::Relu; n.s0 = x; break;
            case Act::LeakyRelu: n.kind = OpKind::LeakyRelu; n.s0 = x; n.c0 = slope; break;
            case Act::Sigmoid: n.kind = OpKind::Sigmoid; n.s0 = y; break;
            case Act::Ln: n.kind = OpKind::Ln; n.s0 = x; break;
            case Act::Softplus: n.kind = OpKind::Softplus; n.s0 = x; break;
        }
        n.in0 = x.node;
        y.node = tape->push(std::move(n), y.rows, y.cols);
    }
    return y;
}

template <typename T>
TensorT<T> relu(TapeT<T>* tape, const TensorT<T>& x) { return activation(tape, x, Act::Relu); }
template <typename T>
TensorT<T> leaky_relu(TapeT<T>* tape, const TensorT<T>& x, T slope = T(0.2)) {
    return activation(tape, x, Act::LeakyRelu, slope);
}
template <typename T>
TensorT<T> sigmoid(TapeT<T>* tape, const TensorT<T>& x) { return activation(tape, x, Act::Sigmoid); }
template <typename T>
TensorT<T> ln(TapeT<T>* tape, const TensorT<T>& x) { return activation(tape, x, Act::Ln); }
template <typename T>
TensorT<T> softplus(TapeT<T>* tape, const TensorT<T>& x) { return activation(tape, x, Act::Softplus); }

// Row-wise softmax with per-row max subtraction.
template <typename T>
TensorT<T> softmax_rows(TapeT<T>* tape, const TensorT<T>& x) {
    TensorT<T> y(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const T* in = x.row_ptr(i);
        T* out = y.row_ptr(i);
        T mx = in[0];
        for (std::size_t j = 1; j < x.cols; ++j) mx = std::max(mx, in[j]);
        T s = T(0);
        for (std::size_t j = 0; j < x.cols; ++j) {
            out[j] = std::exp(in[j] - mx);
            s += out[j];
        }
        for (std::size_t j = 0; j < x.cols; ++j) out[j] /= s;
    }
    if (tape && x.node >= 0) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::SoftmaxRows;
        n.in0 = x.node;
        n.s0 = y;
        y.node = tape->push(std::move(n), y.rows, y.cols);
    }
    return y;
}

template <typename T>
TensorT<T> gather_rows(TapeT<T>* tape, const TensorT<T>& table, std::vector<std::size_t> ids) {
    for (std::size_t id : ids)
        if (id >= table.rows)
            throw IndexError("gather_rows: id " + std::to_string(id) + " >= " +
                             std::to_string(table.rows));
    TensorT<T> y(ids.size(), table.cols);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const T* src = table.row_ptr(ids[i]);
        std::copy(src, src + table.cols, y.row_ptr(i));
    }
    if (tape && table.node >= 0) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::GatherRows;
        n.in0 = table.node;
        n.aux = std::make_shared<const std::vector<std::size_t>>(std::move(ids));
        y.node = tape->push(std::move(n), y.rows, y.cols);
    }
    return y;
}

template <typename T>
TensorT<T> concat_cols(TapeT<T>* tape, const std::vector<TensorT<T>>& parts) {
    if (parts.empty()) throw ContractError("concat_cols: no parts");
    std::size_t m = parts[0].rows, total = 0;
    bool tracked = false;
    for (const auto& p : parts) {
        if (p.rows != m)
            throw DimensionError("concat_cols: row count mismatch " + parts[0].shape_str() +
                                 " vs " + p.shape_str());
        total += p.cols;
        tracked = tracked || p.node >= 0;
    }
    TensorT<T> y(m, total);
    std::size_t off = 0;
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < m; ++i)
            std::copy(p.row_ptr(i), p.row_ptr(i) + p.cols, y.row_ptr(i) + off);
        off += p.cols;
    }
    if (tape && tracked) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::ConcatCols;
        auto widths = std::make_shared<std::vector<std::size_t>>();
        for (const auto& p : parts) {
            n.ins.push_back(p.node);
            widths->push_back(p.cols);
        }
        n.aux = std::move(widths);
        y.node = tape->push(std::move(n), y.rows, y.cols);
    }
    return y;
}

template <typename T>
TensorT<T> concat_cols(TapeT<T>* tape, const TensorT<T>& a, const TensorT<T>& b) {
    return concat_cols(tape, std::vector<TensorT<T>>{a, b});
}

template <typename T>
TensorT<T> slice_cols(TapeT<T>* tape, const TensorT<T>& x, std::size_t c0, std::size_t c1) {
    if (c0 >= c1 || c1 > x.cols)
        throw DimensionError("slice_cols: [" + std::to_string(c0) + "," + std::to_string(c1) +
                             ") out of " + x.shape_str());
    TensorT<T> y(x.rows, c1 - c0);
    for (std::size_t i = 0; i < x.rows; ++i)
        std::copy(x.row_ptr(i) + c0, x.row_ptr(i) + c1, y.row_ptr(i));
    if (tape && x.node >= 0) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::SliceCols;
        n.in0 = x.node;
        n.a0 = c0;
        n.a1 = c1;
        y.node = tape->push(std::move(n), y.rows, y.cols);
    }
    return y;
}

template <typename T>
TensorT<T> slice_rows(TapeT<T>* tape, const TensorT<T>& x, std::size_t r0, std::size_t r1) {
    if (r0 >= r1 || r1 > x.rows)
        throw DimensionError("slice_rows: [" + std::to_string(r0) + "," + std::to_string(r1) +
                             ") out of " + x.shape_str());
    TensorT<T> y(r1 - r0, x.cols);
    std::copy(x.row_ptr(r0), x.row_ptr(r0) + (r1 - r0) * x.cols, y.data.data());
    if (tape && x.node >= 0) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::SliceRows;
        n.in0 = x.node;
        n.a0 = r0;
        n.a1 = r1;
        y.node = tape->push(std::move(n), y.rows, y.cols);
    }
    return y;
}

namespace detail {

template <typename T, typename F>
TensorT<T> binary_ew(TapeT<T>* tape, const TensorT<T>& a, const TensorT<T>& b,
                     OpKind kind, const char* name, bool save, F&& f) {
    check_same_shape(a, b, name);
    TensorT<T> y(a.rows, a.cols);
    for (std::size_t i = 0; i < a.size(); ++i) y.data[i] = f(a.data[i], b.data[i]);
    if (tape && (a.node >= 0 || b.node >= 0)) {
        typename TapeT<T>::Node n;
        n.kind = kind;
        n.in0 = a.node;
        n.in1 = b.node;
        if (save) {
            n.s0 = a;
            n.s1 = b;
        }
        y.node = tape->push(std::move(n), y.rows, y.cols);
    }
    return y;
}

}  // namespace detail

template <typename T>
TensorT<T> add(TapeT<T>* tape, const TensorT<T>& a, const TensorT<T>& b) {
    return detail::binary_ew(tape, a, b, OpKind::Add, "add", false,
                             [](T x, T y) { return x + y; });
}

template <typename T>
TensorT<T> sub(TapeT<T>* tape, const TensorT<T>& a, const TensorT<T>& b) {
    return detail::binary_ew(tape, a, b, OpKind::Sub, "sub", false,
                             [](T x, T y) { return x - y; });
}

template <typename T>
TensorT<T> mul(TapeT<T>* tape, const TensorT<T>& a, const TensorT<T>& b) {
    return detail::binary_ew(tape, a, b, OpKind::Mul, "mul", true,
                             [](T x, T y) { return x * y; });
}

// x[i,j] * c[i], the row-scaling used by attentive fusion.
template <typename T>
TensorT<T> mul_colvec(TapeT<T>* tape, const TensorT<T>& x, const TensorT<T>& c) {
    if (c.rows != x.rows || c.cols != 1)
        throw DimensionError("mul_colvec: x " + x.shape_str() + " vs c " + c.shape_str());
    TensorT<T> y(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const T w = c.data[i];
        const T* in = x.row_ptr(i);
        T* out = y.row_ptr(i);
        for (std::size_t j = 0; j < x.cols; ++j) out[j] = w * in[j];
    }
    if (tape && (x.node >= 0 || c.node >= 0)) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::MulColVec;
        n.in0 = x.node;
        n.in1 = c.node;
        n.s0 = x;
        n.s1 = c;
        y.node = tape->push(std::move(n), y.rows, y.cols);
    }
    return y;
}

// x[i,j] + b[j], the bias broadcast.
template <typename T>
TensorT<T> add_rowvec(TapeT<T>* tape, const TensorT<T>& x, const TensorT<T>& b) {
    if (b.rows != 1 || b.cols != x.cols)
        throw DimensionError("add_rowvec: x " + x.shape_str() + " vs b " + b.shape_str());
    TensorT<T> y(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) y.at(i, j) = x.at(i, j) + b.data[j];
    if (tape && (x.node >= 0 || b.node >= 0)) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::AddRowVec;
        n.in0 = x.node;
        n.in1 = b.node;
        y.node = tape->push(std::move(n), y.rows, y.cols);
    }
    return y;
}

template <typename T>
TensorT<T> row_sums(TapeT<T>* tape, const TensorT<T>& x) {
    TensorT<T> y(x.rows, 1);
    for (std::size_t i = 0; i < x.rows; ++i) {
        T s = T(0);
        for (std::size_t j = 0; j < x.cols; ++j) s += x.at(i, j);
        y.data[i] = s;
    }
    if (tape && x.node >= 0) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::RowSums;
        n.in0 = x.node;
        y.node = tape->push(std::move(n), y.rows, y.cols);
    }
    return y;
}

template <typename T>
TensorT<T> sum_all(TapeT<T>* tape, const TensorT<T>& x) {
    T s = T(0);
    for (T v : x.data) s += v;
    TensorT<T> y = TensorT<T>::scalar(s);
    if (tape && x.node >= 0) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::SumAll;
        n.in0 = x.node;
        y.node = tape->push(std::move(n), 1, 1);
    }
    return y;
}

template <typename T>
TensorT<T> mean_all(TapeT<T>* tape, const TensorT<T>& x) {
    if (x.size() == 0) throw ContractError("mean_all: empty tensor");
    T s = T(0);
    for (T v : x.data) s += v;
    TensorT<T> y = TensorT<T>::scalar(s / static_cast<T>(x.size()));
    if (tape && x.node >= 0) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::MeanAll;
        n.in0 = x.node;
        y.node = tape->push(std::move(n), 1, 1);
    }
    return y;
}

template <typename T>
TensorT<T> scale(TapeT<T>* tape, const TensorT<T>& x, T c) {
    TensorT<T> y(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i) y.data[i] = c * x.data[i];
    if (tape && x.node >= 0) {
        typename TapeT<T>::Node n;
        n.kind = OpKind::Scale;
        n.in0 = x.node;
        n.c0 = c;
        y.node = tape->push(std::move(n), y.rows, y.cols);
    }
    return y;
}

// ---- backward dispatch -------------------------------------------------

template <typename T>
void TapeT<T>::step_backward(int id) {
    const Node& n = nodes_[id];
    const TensorT<T>& g = grads_[id];
    auto acc = [&](int in) -> TensorT<T>* {
        if (in < 0) return nullptr;
        return &grad_buf(in);
    };
    switch (n.kind) {
        case OpKind::Leaf:
            break;
        case OpKind::MatMul: {
            if (auto* da = acc(n.in0)) detail::acc_matmul_bt(g, n.s1, *da);
            if (auto* db = acc(n.in1)) detail::acc_at_matmul(n.s0, g, *db);
            break;
        }
        case OpKind::Spmm: {
            if (auto* dx = acc(n.in0)) {
                TensorT<T> tmp;
                spmm_into(n.sp->mat_t, g, tmp);
                for (std::size_t i = 0; i < tmp.size(); ++i) dx->data[i] += tmp.data[i];
            }
            break;
        }
        case OpKind::SpmmEdgeWeighted: {
            const CsrT<T>& m = n.sp->mat;
            const std::size_t d = n.s1.cols;
            TensorT<T>* dalpha = acc(n.in0);
            TensorT<T>* dx = acc(n.in1);
            for (std::size_t t = 0; t < m.n_rows; ++t) {
                const T* gt = g.data.data() + t * d;
                for (std::size_t k = m.row_ptr[t]; k < m.row_ptr[t + 1]; ++k) {
                    const std::size_t s = m.col_idx[k];
                    if (dalpha) {
                        const T* xs = n.s1.data.data() + s * d;
                        T dot = T(0);
                        for (std::size_t j = 0; j < d; ++j) dot += gt[j] * xs[j];
                        dalpha->data[k] += dot;
                    }
                    if (dx) {
                        const T w = n.s0.data[k];
                        T* dxs = dx->data.data() + s * d;
                        for (std::size_t j = 0; j < d; ++j) dxs[j] += w * gt[j];
                    }
                }
            }
            break;
        }
        case OpKind::EdgeLogits: {
            const CsrT<T>& m = n.sp->mat;
            TensorT<T>* dl = acc(n.in0);
            TensorT<T>* dr = acc(n.in1);
            for (std::size_t t = 0; t < m.n_rows; ++t) {
                for (std::size_t k = m.row_ptr[t]; k < m.row_ptr[t + 1]; ++k) {
                    if (dl) dl->data[t] += g.data[k];
                    if (dr) dr->data[m.col_idx[k]] += g.data[k];
                }
            }
            break;
        }
        case OpKind::SegmentSoftmax: {
            if (auto* dz = acc(n.in0)) {
                const CsrT<T>& m = n.sp->mat;
                const TensorT<T>& alpha = n.s0;
                for (std::size_t t = 0; t < m.n_rows; ++t) {
                    const std::size_t k0 = m.row_ptr[t], k1 = m.row_ptr[t + 1];
                    if (k0 == k1) continue;
                    T dot = T(0);
                    for (std::size_t k = k0; k < k1; ++k) dot += g.data[k] * alpha.data[k];
                    for (std::size_t k = k0; k < k1; ++k)
                        dz->data[k] += alpha.data[k] * (g.data[k] - dot);
                }
            }
            break;
        }
        case OpKind::Relu: {
            if (auto* dx = acc(n.in0))
                for (std::size_t i = 0; i < g.size(); ++i)
                    if (n.s0.data[i] > T(0)) dx->data[i] += g.data[i];
            break;
        }
        case OpKind::LeakyRelu: {
            if (auto* dx = acc(n.in0))
                for (std::size_t i = 0; i < g.size(); ++i)
                    dx->data[i] += g.data[i] * (n.s0.data[i] > T(0) ? T(1) : n.c0);
            break;
        }
        case OpKind::Sigmoid: {
            if (auto* dx = acc(n.in0))
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const T y = n.s0.data[i];
                    dx->data[i] += g.data[i] * y * (T(1) - y);
                }
            break;
        }
        case OpKind::Ln: {
            // clamp keeps -ln sigmoid losses from exploding near zero input
            if (auto* dx = acc(n.in0))
                for (std::size_t i = 0; i < g.size(); ++i)
                    dx->data[i] += g.data[i] / std::max(n.s0.data[i], T(1e-12));
            break;
        }
        case OpKind::Softplus: {
            if (auto* dx = acc(n.in0))
                for (std::size_t i = 0; i < g.size(); ++i)
                    dx->data[i] += g.data[i] * detail::stable_sigmoid(n.s0.data[i]);
            break;
        }
        case OpKind::SoftmaxRows: {
            if (auto* dx = acc(n.in0)) {
                const TensorT<T>& y = n.s0;
                for (std::size_t i = 0; i < y.rows; ++i) {
                    const T* yr = y.row_ptr(i);
                    const T* gr = g.data.data() + i * y.cols;
                    T dot = T(0);
                    for (std::size_t j = 0; j < y.cols; ++j) dot += gr[j] * yr[j];
                    T* dxr = dx->data.data() + i * y.cols;
                    for (std::size_t j = 0; j < y.cols; ++j) dxr[j] += yr[j] * (gr[j] - dot);
                }
            }
            break;
        }
        case OpKind::GatherRows: {
            if (auto* dt = acc(n.in0)) {
                const auto& ids = *n.aux;
                for (std::size_t i = 0; i < ids.size(); ++i) {
                    T* dst = dt->data.data() + ids[i] * n.out_cols;
                    const T* src = g.data.data() + i * n.out_cols;
                    for (std::size_t j = 0; j < n.out_cols; ++j) dst[j] += src[j];
                }
            }
            break;
        }
        case OpKind::ConcatCols: {
            std::size_t off = 0;
            for (std::size_t p = 0; p < n.ins.size(); ++p) {
                const std::size_t w = (*n.aux)[p];
                if (n.ins[p] >= 0) {
                    TensorT<T>& dp = grad_buf(n.ins[p]);
                    for (std::size_t i = 0; i < n.out_rows; ++i) {
                        const T* src = g.data.data() + i * n.out_cols + off;
                        T* dst = dp.data.data() + i * w;
                        for (std::size_t j = 0; j < w; ++j) dst[j] += src[j];
                    }
                }
                off += w;
            }
            break;
        }
        case OpKind::SliceCols: {
            if (auto* dx = acc(n.in0)) {
                for (std::size_t i = 0; i < n.out_rows; ++i) {
                    const T* src = g.data.data() + i * n.out_cols;
                    T* dst = dx->data.data() + i * dx->cols + n.a0;
                    for (std::size_t j = 0; j < n.out_cols; ++j) dst[j] += src[j];
                }
            }
            break;
        }
        case OpKind::SliceRows: {
            if (auto* dx = acc(n.in0)) {
                for (std::size_t i = 0; i < n.out_rows; ++i) {
                    const T* src = g.data.data() + i * n.out_cols;
                    T* dst = dx->data.data() + (n.a0 + i) * n.out_cols;
                    for (std::size_t j = 0; j < n.out_cols; ++j) dst[j] += src[j];
                }
            }
            break;
        }
        case OpKind::Add: {
            if (auto* da = acc(n.in0))
                for (std::size_t i = 0; i < g.size(); ++i) da->data[i] += g.data[i];
            if (auto* db = acc(n.in1))
                for (std::size_t i = 0; i < g.size(); ++i) db->data[i] += g.data[i];
            break;
        }
        case OpKind::Sub: {
            if (auto* da = acc(n.in0))
                for (std::size_t i = 0; i < g.size(); ++i) da->data[i] += g.data[i];
            if (auto* db = acc(n.in1))
                for (std::size_t i = 0; i < g.size(); ++i) db->data[i] -= g.data[i];
            break;
        }
        case OpKind::Mul: {
            if (auto* da = acc(n.in0))
                for (std::size_t i = 0; i < g.size(); ++i) da->data[i] += g.data[i] * n.s1.data[i];
            if (auto* db = acc(n.in1))
                for (std::size_t i = 0; i < g.size(); ++i) db->data[i] += g.data[i] * n.s0.data[i];
            break;
        }
        case OpKind::MulColVec: {
            const TensorT<T>& x = n.s0;
            const TensorT<T>& c = n.s1;
            if (auto* dx = acc(n.in0))
                for (std::size_t i = 0; i < x.rows; ++i)
                    for (std::size_t j = 0; j < x.cols; ++j)
                        dx->at(i, j) += g.at(i, j) * c.data[i];
            if (auto* dc = acc(n.in1))
                for (std::size_t i = 0; i < x.rows; ++i) {
                    T s = T(0);
                    for (std::size_t j = 0; j < x.cols; ++j) s += g.at(i, j) * x.at(i, j);
                    dc->data[i] += s;
                }
            break;
        }
        case OpKind::AddRowVec: {
            if (auto* dx = acc(n.in0))
                for (std::size_t i = 0; i < g.size(); ++i) dx->data[i] += g.data[i];
            if (auto* db = acc(n.in1))
                for (std::size_t i = 0; i < n.out_rows; ++i)
                    for (std::size_t j = 0; j < n.out_cols; ++j)
                        db->data[j] += g.at(i, j);
            break;
        }
        case OpKind::RowSums: {
            if (auto* dx = acc(n.in0))
                for (std::size_t i = 0; i < dx->rows; ++i)
                    for (std::size_t j = 0; j < dx->cols; ++j) dx->at(i, j) += g.data[i];
            break;
        }
        case OpKind::SumAll: {
            if (auto* dx = acc(n.in0))
                for (std::size_t i = 0; i < dx->size(); ++i) dx->data[i] += g.data[0];
            break;
        }
        case OpKind::MeanAll: {
            if (auto* dx = acc(n.in0)) {
                const T w = g.data[0] / static_cast<T>(dx->size());
                for (std::size_t i = 0; i < dx->size(); ++i) dx->data[i] += w;
            }
            break;
        }
        case OpKind::Scale: {
            if (auto* dx = acc(n.in0))
                for (std::size_t i = 0; i < g.size(); ++i) dx->data[i] += n.c0 * g.data[i];
            break;
        }
    }
}

using Tape = TapeT<float>;

}  // namespace peagnn
