#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "peagnn/model.hpp"

namespace peagnn {

inline double hit_ratio_at_k(std::size_t rank, std::size_t k) {
    if (rank < 1) throw ContractError("rank is 1-based");
    return rank <= k ? 1.0 : 0.0;
}

inline double ndcg_at_k(std::size_t rank, std::size_t k) {
    if (rank < 1) throw ContractError("rank is 1-based");
    return rank <= k ? 1.0 / std::log2(static_cast<double>(rank) + 1.0) : 0.0;
}

struct PerUserEval {
    std::size_t user;
    std::size_t rank;
    double hr, ndcg;
};

struct EvalReport {
    double hr_at_10 = 0.0;
    double ndcg_at_10 = 0.0;
    std::size_t n_users = 0;
    std::size_t n_candidates = 0;
    std::uint64_t seed = 0;
    std::vector<PerUserEval> per_user;
};

// One forward over the full graph, then every held-out positive is ranked
// against its candidate list. Score ties resolve against the held-out item
// (pessimistic rank). threads > 1 parallelizes candidate scoring across
// users without changing any result.
EvalReport evaluate_leave_one_out(
    const ModelParams& params, const PreparedGraph& graph,
    const std::vector<Interaction>& held_out,
    const std::unordered_map<std::size_t, std::vector<std::size_t>>& candidates,
    std::size_t k = 10, std::size_t threads = 1, bool keep_per_user = false);

// Same protocol but scores come from a caller-supplied function; used by
// the metric-calibration oracles (planted best scorer, random scorer).
EvalReport evaluate_with_scores(
    const std::vector<Interaction>& held_out,
    const std::unordered_map<std::size_t, std::vector<std::size_t>>& candidates,
    const std::function<double(std::size_t user, std::size_t item)>& score, std::size_t k = 10);

struct AttentionRow {
    std::string metapath;
    std::string terminal;  // "user" | "item"
    double mean_attention;
};

// Mean node-wise fusion attention per metapath, per terminal type.
std::vector<AttentionRow> attention_report(const ModelParams& params, const PreparedGraph& graph);

std::string eval_report_json(const EvalReport& report);

}  // namespace peagnn
