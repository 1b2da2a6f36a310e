#pragma once

#include <functional>
#include <string>
#include <vector>

#include "peagnn/tape.hpp"
#include "peagnn/tensor.hpp"

namespace peagnn::testsupport {

struct GradCheckReport {
    bool ok = true;
    double max_err = 0.0;
    std::size_t n_checked = 0;
    std::size_t n_kinks = 0;  // probes rejected as non-differentiable points
    std::string detail;       // first offending entry, for failure messages
};

// Central finite differences against the tape's analytic gradients.
// Error metric: |a - n| <= tol * max(1, |a|, |n|), i.e. relative for
// large gradients and absolute at tol for tiny ones, which keeps the f32
// checks meaningful where FD noise (~ulp/h) dominates.
//
// The FD oracle is only valid where the loss is locally smooth. When a
// probe disagrees with the analytic gradient, the one-sided differences
// are compared: if they disagree with each other the probe straddles a
// kink (relu / leaky corner) and is discarded rather than counted as a
// failure. More than 5% discarded probes fails the check outright, so a
// broken backward cannot hide behind the kink filter.
//
// f must be a pure function of the leaves: f(tape, leaves) -> scalar.
template <typename T>
GradCheckReport check_gradients(
    const std::function<TensorT<T>(TapeT<T>*, const std::vector<TensorT<T>>&)>& f,
    const std::vector<TensorT<T>>& leaves, T fd_step, double tol) {
    GradCheckReport report;

    TapeT<T> tape;
    std::vector<TensorT<T>> watched;
    watched.reserve(leaves.size());
    for (const auto& l : leaves) watched.push_back(tape.leaf(l));
    TensorT<T> loss = f(&tape, watched);
    tape.backward(loss);

    std::vector<TensorT<T>> work = leaves;
    const double f0 = static_cast<double>(f(nullptr, work).item());
    const double h = static_cast<double>(fd_step);
    for (std::size_t li = 0; li < leaves.size(); ++li) {
        const TensorT<T> analytic = tape.grad(watched[li]);
        for (std::size_t j = 0; j < leaves[li].size(); ++j) {
            const T saved = work[li].data[j];
            work[li].data[j] = saved + fd_step;
            const double up = static_cast<double>(f(nullptr, work).item());
            work[li].data[j] = saved - fd_step;
            const double down = static_cast<double>(f(nullptr, work).item());
            work[li].data[j] = saved;
            report.n_checked++;
            const double numeric = (up - down) / (2.0 * h);
            const double a = static_cast<double>(analytic.data[j]);
            const double err =
                std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
            if (err <= tol) {
                report.max_err = std::max(report.max_err, err);
                continue;
            }
            const double fwd = (up - f0) / h;
            const double bwd = (f0 - down) / h;
            const double sided_gap =
                std::abs(fwd - bwd) / std::max({1.0, std::abs(fwd), std::abs(bwd)});
            if (sided_gap > 2.0 * tol) {
                report.n_kinks++;  // non-smooth point, FD is not an oracle here
                continue;
            }
            report.max_err = std::max(report.max_err, err);
            if (report.ok) {
                report.ok = false;
                report.detail = "leaf " + std::to_string(li) + " entry " + std::to_string(j) +
                                ": analytic " + std::to_string(a) + " vs fd " +
                                std::to_string(numeric);
            }
        }
    }
    if (report.n_checked > 0 && report.n_kinks * 20 > report.n_checked) {
        report.ok = false;  // > 5% rejected probes: filter would mask real bugs
        report.detail = "too many kink rejections: " + std::to_string(report.n_kinks) + " of " +
                        std::to_string(report.n_checked);
    }
    return report;
}

}  // namespace peagnn::testsupport
