#include "peagnn/evaluation.hpp"

#include <algorithm>
#include <thread>

#include <json.hpp>

namespace peagnn {

namespace {

// pessimistic rank: the held-out item loses every tie
std::size_t rank_of_target(const std::vector<double>& scores, std::size_t target_pos) {
    const double target = scores[target_pos];
    std::size_t rank = 1;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (i == target_pos) continue;
        if (scores[i] >= target) ++rank;
    }
    return rank;
}

EvalReport finish_report(std::vector<PerUserEval> rows, std::size_t n_candidates,
                         std::size_t /*k*/, bool keep_per_user) {
    EvalReport r;
    r.n_users = rows.size();
    r.n_candidates = n_candidates;
    std::sort(rows.begin(), rows.end(),
              [](const PerUserEval& a, const PerUserEval& b) { return a.user < b.user; });
    for (const auto& row : rows) {
        r.hr_at_10 += row.hr;
        r.ndcg_at_10 += row.ndcg;
    }
    if (!rows.empty()) {
        r.hr_at_10 /= static_cast<double>(rows.size());
        r.ndcg_at_10 /= static_cast<double>(rows.size());
    }
    if (keep_per_user) r.per_user = std::move(rows);
    return r;
}

}  // namespace

EvalReport evaluate_leave_one_out(
    const ModelParams& params, const PreparedGraph& graph,
    const std::vector<Interaction>& held_out,
    const std::unordered_map<std::size_t, std::vector<std::size_t>>& candidates,
    std::size_t k, std::size_t threads, bool keep_per_user) {
    FusedRepr fused = forward_all<float>(nullptr, params, graph);

    std::vector<Interaction> ordered = held_out;
    std::sort(ordered.begin(), ordered.end(),
              [](const Interaction& a, const Interaction& b) { return a.user < b.user; });

    std::vector<PerUserEval> rows(ordered.size());
    std::size_t n_candidates = 0;

    auto eval_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const auto& h = ordered[idx];
            auto it = candidates.find(h.user);
            if (it == candidates.end())
                throw ContractError("no candidate list for user " + std::to_string(h.user));
            const auto& cand = it->second;
            std::vector<std::size_t> users(cand.size(), h.user);
            Tensor s = score_pairs<float>(nullptr, fused, params, users, cand);
            std::vector<double> scores(s.data.begin(), s.data.end());
            const auto target_it = std::find(cand.begin(), cand.end(), h.item);
            if (target_it == cand.end())
                throw ContractError("candidate list for user " + std::to_string(h.user) +
                                    " does not contain the held-out item");
            const std::size_t rank =
                rank_of_target(scores, static_cast<std::size_t>(target_it - cand.begin()));
            rows[idx] = {h.user, rank, hit_ratio_at_k(rank, k), ndcg_at_k(rank, k)};
        }
    };

    if (!candidates.empty()) n_candidates = candidates.begin()->second.size();
    if (threads <= 1 || ordered.size() < 2) {
        eval_range(0, ordered.size());
    } else {
        const std::size_t n_threads = std::min(threads, ordered.size());
        std::vector<std::thread> pool;
        const std::size_t chunk = (ordered.size() + n_threads - 1) / n_threads;
        for (std::size_t t = 0; t < n_threads; ++t) {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(ordered.size(), lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(eval_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    return finish_report(std::move(rows), n_candidates, k, keep_per_user);
}

EvalReport evaluate_with_scores(
    const std::vector<Interaction>& held_out,
    const std::unordered_map<std::size_t, std::vector<std::size_t>>& candidates,
    const std::function<double(std::size_t, std::size_t)>& score, std::size_t k) {
    std::vector<PerUserEval> rows;
    std::vector<Interaction> ordered = held_out;
    std::sort(ordered.begin(), ordered.end(),
              [](const Interaction& a, const Interaction& b) { return a.user < b.user; });
    std::size_t n_candidates = 0;
    for (const auto& h : ordered) {
        const auto& cand = candidates.at(h.user);
        n_candidates = cand.size();
        std::vector<double> scores;
        scores.reserve(cand.size());
        std::size_t target_pos = cand.size();
        for (std::size_t i = 0; i < cand.size(); ++i) {
            scores.push_back(score(h.user, cand[i]));
            if (cand[i] == h.item) target_pos = i;
        }
        if (target_pos == cand.size())
            throw ContractError("candidate list missing held-out item for user " +
                                std::to_string(h.user));
        const std::size_t rank = rank_of_target(scores, target_pos);
        rows.push_back({h.user, rank, hit_ratio_at_k(rank, k), ndcg_at_k(rank, k)});
    }
    return finish_report(std::move(rows), n_candidates, k, true);
}

std::vector<AttentionRow> attention_report(const ModelParams& params,
                                           const PreparedGraph& graph) {
    FusedRepr fused = forward_all<float>(nullptr, params, graph);
    std::vector<AttentionRow> rows;
    auto column_means = [](const Tensor& att) {
        std::vector<double> means(att.cols, 0.0);
        for (std::size_t i = 0; i < att.rows; ++i)
            for (std::size_t j = 0; j < att.cols; ++j) means[j] += att.at(i, j);
        for (auto& m : means) m /= att.rows ? static_cast<double>(att.rows) : 1.0;
        return means;
    };
    const auto user_means = column_means(fused.att_user);
    const auto item_means = column_means(fused.att_item);
    std::size_t ui = 0, ii = 0;
    for (std::size_t m = 0; m < graph.metapath_names.size(); ++m) {
        if (graph.ends_at_user[m])
            rows.push_back({graph.metapath_names[m], "user", user_means[ui++]});
        else
            rows.push_back({graph.metapath_names[m], "item", item_means[ii++]});
    }
    return rows;
}

std::string eval_report_json(const EvalReport& report) {
    nlohmann::json j;
    j["hr_at_10"] = report.hr_at_10;
    j["ndcg_at_10"] = report.ndcg_at_10;
    j["n_users"] = report.n_users;
    j["n_candidates"] = report.n_candidates;
    j["seed"] = report.seed;
    return j.dump(2);
}

}  // namespace peagnn
