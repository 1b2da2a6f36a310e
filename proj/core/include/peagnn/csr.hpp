#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "peagnn/errors.hpp"
#include "peagnn/tensor.hpp"

namespace peagnn {

// Canonical CSR: row_ptr non-decreasing, column indices strictly increasing
// within each row, duplicate coordinates merged by addition at construction.
template <typename T>
struct CsrT {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::size_t> row_ptr;  // length n_rows + 1
    std::vector<std::size_t> col_idx;
    std::vector<T> values;

    CsrT() = default;
    CsrT(std::size_t r, std::size_t c) : n_rows(r), n_cols(c), row_ptr(r + 1, 0) {}

    std::size_t nnz() const { return col_idx.size(); }

    template <typename U>
    CsrT<U> cast() const {
        CsrT<U> out;
        out.n_rows = n_rows;
        out.n_cols = n_cols;
        out.row_ptr = row_ptr;
        out.col_idx = col_idx;
        out.values.resize(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            out.values[i] = static_cast<U>(values[i]);
        return out;
    }
};

using Csr = CsrT<float>;

template <typename T>
struct Coo {
    std::size_t row, col;
    T value;
};

template <typename T>
CsrT<T> csr_from_edges(std::size_t n_rows, std::size_t n_cols,
                       std::vector<Coo<T>> edges) {
    for (const auto& e : edges) {
        if (e.row >= n_rows || e.col >= n_cols)
            throw IndexError("edge (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                             ") outside " + std::to_string(n_rows) + "x" + std::to_string(n_cols));
    }
    std::sort(edges.begin(), edges.end(), [](const Coo<T>& a, const Coo<T>& b) {
        return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    CsrT<T> m(n_rows, n_cols);
    m.col_idx.reserve(edges.size());
    m.values.reserve(edges.size());
    for (std::size_t k = 0; k < edges.size();) {
        std::size_t r = edges[k].row, c = edges[k].col;
        T v = edges[k].value;
        ++k;
        while (k < edges.size() && edges[k].row == r && edges[k].col == c) {
            v += edges[k].value;  // duplicates merge by addition
            ++k;
        }
        m.col_idx.push_back(c);
        m.values.push_back(v);
        m.row_ptr[r + 1] = m.col_idx.size();
    }
    for (std::size_t r = 1; r <= n_rows; ++r)
        m.row_ptr[r] = std::max(m.row_ptr[r], m.row_ptr[r - 1]);
    return m;
}

template <typename T>
CsrT<T> transpose(const CsrT<T>& a) {
    CsrT<T> t(a.n_cols, a.n_rows);
    std::vector<std::size_t> count(a.n_cols, 0);
    for (std::size_t k = 0; k < a.nnz(); ++k) count[a.col_idx[k]]++;
    for (std::size_t c = 0; c < a.n_cols; ++c) t.row_ptr[c + 1] = t.row_ptr[c] + count[c];
    t.col_idx.resize(a.nnz());
    t.values.resize(a.nnz());
    std::vector<std::size_t> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (std::size_t r = 0; r < a.n_rows; ++r) {
        for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
            std::size_t pos = cursor[a.col_idx[k]]++;
            t.col_idx[pos] = r;  // source rows scanned in order keeps columns sorted
            t.values[pos] = a.values[k];
        }
    }
    return t;
}

// Each nonempty row rescaled to sum 1; empty rows stay empty.
template <typename T>
CsrT<T> row_normalize(const CsrT<T>& a) {
    CsrT<T> out = a;
    for (std::size_t r = 0; r < a.n_rows; ++r) {
        T s = 0;
        for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
            if (a.values[k] < T(0))
                throw ContractError("row_normalize: negative value at row " + std::to_string(r));
            s += a.values[k];
        }
        if (s <= T(0)) continue;
        for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            out.values[k] = a.values[k] / s;
    }
    return out;
}

// A + I on a square matrix; existing diagonal entries are incremented.
template <typename T>
CsrT<T> add_identity(const CsrT<T>& a) {
    if (a.n_rows != a.n_cols)
        throw DimensionError("add_identity needs a square matrix, got " +
                             std::to_string(a.n_rows) + "x" + std::to_string(a.n_cols));
    std::vector<Coo<T>> edges;
    edges.reserve(a.nnz() + a.n_rows);
    for (std::size_t r = 0; r < a.n_rows; ++r) {
        for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            edges.push_back({r, a.col_idx[k], a.values[k]});
        edges.push_back({r, r, T(1)});
    }
    return csr_from_edges(a.n_rows, a.n_cols, std::move(edges));
}

// y = A x, the raw kernel shared by the tape op and its backward.
template <typename T>
void spmm_into(const CsrT<T>& a, const TensorT<T>& x, TensorT<T>& y) {
    if (a.n_cols != x.rows)
        throw DimensionError("spmm: inner dimensions " + std::to_string(a.n_cols) +
                             " vs " + x.shape_str());
    y.rows = a.n_rows;
    y.cols = x.cols;
    y.data.assign(a.n_rows * x.cols, T(0));
    const std::size_t d = x.cols;
    for (std::size_t r = 0; r < a.n_rows; ++r) {
        T* out = y.data.data() + r * d;
        for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
            const T w = a.values[k];
            const T* src = x.data.data() + a.col_idx[k] * d;
            for (std::size_t j = 0; j < d; ++j) out[j] += w * src[j];
        }
    }
}

template <typename T>
TensorT<T> to_dense(const CsrT<T>& a) {
    TensorT<T> d(a.n_rows, a.n_cols);
    for (std::size_t r = 0; r < a.n_rows; ++r)
        for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            d.at(r, a.col_idx[k]) += a.values[k];
    return d;
}

template <typename T>
bool csr_canonical(const CsrT<T>& a) {
    if (a.row_ptr.size() != a.n_rows + 1) return false;
    if (a.row_ptr.front() != 0 || a.row_ptr.back() != a.nnz()) return false;
    if (a.values.size() != a.col_idx.size()) return false;
    for (std::size_t r = 0; r < a.n_rows; ++r) {
        if (a.row_ptr[r] > a.row_ptr[r + 1]) return false;
        for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
            if (a.col_idx[k] >= a.n_cols) return false;
            if (k > a.row_ptr[r] && a.col_idx[k] <= a.col_idx[k - 1]) return false;
        }
    }
    return true;
}

// A sparse matrix bundled with its transpose, shared by tape nodes so the
// backward pass never re-transposes per batch.
template <typename T>
struct SparseOperand {
    CsrT<T> mat;
    CsrT<T> mat_t;

    explicit SparseOperand(CsrT<T> m) : mat(std::move(m)), mat_t(transpose(mat)) {}
};

template <typename T>
using SparseRef = std::shared_ptr<const SparseOperand<T>>;

template <typename T>
SparseRef<T> make_sparse_ref(CsrT<T> m) {
    return std::make_shared<const SparseOperand<T>>(std::move(m));
}

}  // namespace peagnn
