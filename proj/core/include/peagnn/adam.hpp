#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "peagnn/errors.hpp"
#include "peagnn/model.hpp"
#include "peagnn/tape.hpp"

namespace peagnn {

// Mini-batch Adam with bias correction; beta1 0.9, beta2 0.999, eps 1e-8.
// Moment state is keyed by the model's fixed parameter registry order.
template <typename T>
class AdamT {
public:
    explicit AdamT(T lr, T beta1 = T(0.9), T beta2 = T(0.999), T eps = T(1e-8))
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    // params: tensors being trained; watched: the tape-registered copies
    // whose node handles address this step's gradients.
    void step(ModelParamsT<T>& params, ModelParamsT<T>& watched, const TapeT<T>& tape) {
        std::vector<TensorT<T>*> ps, ws;
        std::vector<std::string> names;
        params.for_each_param([&](const std::string& n, TensorT<T>& t) {
            ps.push_back(&t);
            names.push_back(n);
        });
        watched.for_each_param([&](const std::string&, TensorT<T>& t) { ws.push_back(&t); });
        if (ps.size() != ws.size())
            throw ContractError("adam: parameter registries differ in length");
        if (m_.empty()) {
            for (auto* p : ps) {
                m_.emplace_back(TensorT<T>::zeros(p->rows, p->cols));
                v_.emplace_back(TensorT<T>::zeros(p->rows, p->cols));
            }
        }
        ++t_;
        const T corr1 = T(1) - std::pow(beta1_, static_cast<T>(t_));
        const T corr2 = T(1) - std::pow(beta2_, static_cast<T>(t_));
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const TensorT<T> g = tape.grad(*ws[i]);
            if (!g.all_finite())
                throw TrainAbort("non-finite gradient in parameter '" + names[i] +
                                 "' at adam step " + std::to_string(t_));
            TensorT<T>& p = *ps[i];
            TensorT<T>& m = m_[i];
            TensorT<T>& v = v_[i];
            for (std::size_t j = 0; j < p.size(); ++j) {
                const T gj = g.data[j];
                m.data[j] = beta1_ * m.data[j] + (T(1) - beta1_) * gj;
                v.data[j] = beta2_ * v.data[j] + (T(1) - beta2_) * gj * gj;
                const T mhat = m.data[j] / corr1;
                const T vhat = v.data[j] / corr2;
                p.data[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

    std::uint64_t steps_taken() const { return t_; }
    T lr() const { return lr_; }
    void set_lr(T lr) { lr_ = lr; }

private:
    T lr_, beta1_, beta2_, eps_;
    std::uint64_t t_ = 0;
    std::vector<TensorT<T>> m_, v_;
};

using Adam = AdamT<float>;

}  // namespace peagnn
