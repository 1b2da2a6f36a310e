#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "peagnn/errors.hpp"
#include "peagnn/rng.hpp"

namespace peagnn {

// Dense row-major 2-D tensor. Scalars are 1x1, row vectors 1xN.
// `node` is a handle into the tape that recorded the producing operation;
// -1 marks an untracked value (constant w.r.t. differentiation).
template <typename T>
struct TensorT {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;
    int node = -1;

    TensorT() = default;
    TensorT(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T(0)) {}
    TensorT(std::size_t r, std::size_t c, std::vector<T> d)
        : rows(r), cols(c), data(std::move(d)) {
        if (data.size() != rows * cols)
            throw DimensionError("tensor data length " + std::to_string(data.size()) +
                                 " does not match shape " + shape_str());
    }

    static TensorT zeros(std::size_t r, std::size_t c) { return TensorT(r, c); }

    static TensorT full(std::size_t r, std::size_t c, T value) {
        TensorT t(r, c);
        std::fill(t.data.begin(), t.data.end(), value);
        return t;
    }

    static TensorT scalar(T value) { return full(1, 1, value); }

    static TensorT row(std::vector<T> values) {
        std::size_t n = values.size();
        return TensorT(1, n, std::move(values));
    }

    static TensorT from_rows(std::vector<std::vector<T>> rows_in) {
        std::size_t r = rows_in.size();
        std::size_t c = r ? rows_in[0].size() : 0;
        TensorT t(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows_in[i].size() != c)
                throw DimensionError("ragged row in tensor literal");
            for (std::size_t j = 0; j < c; ++j) t.data[i * c + j] = rows_in[i][j];
        }
        return t;
    }

    static TensorT identity(std::size_t n) {
        TensorT t(n, n);
        for (std::size_t i = 0; i < n; ++i) t.data[i * n + i] = T(1);
        return t;
    }

    static TensorT uniform(std::size_t r, std::size_t c, T lo, T hi, Rng& rng) {
        TensorT t(r, c);
        for (auto& v : t.data) v = static_cast<T>(rng.uniform(lo, hi));
        return t;
    }

    std::size_t size() const { return data.size(); }

    T& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    T at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    T* row_ptr(std::size_t i) { return data.data() + i * cols; }
    const T* row_ptr(std::size_t i) const { return data.data() + i * cols; }

    bool is_scalar() const { return rows == 1 && cols == 1; }

    T item() const {
        if (!is_scalar())
            throw ContractError("item() requires a scalar tensor, got " + shape_str());
        return data[0];
    }

    bool all_finite() const {
        for (T v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    bool same_shape(const TensorT& o) const { return rows == o.rows && cols == o.cols; }

    std::string shape_str() const {
        std::ostringstream os;
        os << "[" << rows << "x" << cols << "]";
        return os.str();
    }

    template <typename U>
    TensorT<U> cast() const {
        TensorT<U> out(rows, cols);
        for (std::size_t i = 0; i < data.size(); ++i)
            out.data[i] = static_cast<U>(data[i]);
        return out;
    }
};

using Tensor = TensorT<float>;

template <typename T>
inline void check_same_shape(const TensorT<T>& a, const TensorT<T>& b, const char* op) {
    if (!a.same_shape(b))
        throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_str() +
                             " vs " + b.shape_str());
}

}  // namespace peagnn
