#include <doctest.h>

#include "peagnn/datagen.hpp"
#include "peagnn/evaluation.hpp"
#include "peagnn/rng.hpp"
#include "peagnn/split.hpp"

using namespace peagnn;

TEST_CASE("hit_ratio_at_k and ndcg_at_k boundaries") {
    CHECK(hit_ratio_at_k(1, 10) == 1.0);
    CHECK(hit_ratio_at_k(10, 10) == 1.0);
    CHECK(hit_ratio_at_k(11, 10) == 0.0);
    CHECK(ndcg_at_k(1, 10) == doctest::Approx(1.0));
    CHECK(ndcg_at_k(3, 10) == doctest::Approx(0.5));  // 1/log2(4)
    CHECK(ndcg_at_k(11, 10) == 0.0);
    CHECK_THROWS_AS(hit_ratio_at_k(0, 10), ContractError);
}

namespace {

struct EvalFixture {
    Hin hin;
    SplitDataset split;
    std::unordered_map<std::size_t, std::vector<std::size_t>> candidates;

    EvalFixture(std::size_t n_users, std::size_t n_items, std::size_t n_candidates,
                std::uint64_t seed) {
        PlantedConfig pc;
        pc.n_users = n_users;
        pc.n_items = n_items;
        pc.n_flavors = 5;
        pc.seed = seed;
        hin = make_planted_hin(pc);
        split = leave_one_out_split(hin, seed);
        Rng rng(seed);
        candidates = sample_eval_candidates(split.test_pos, split, hin, n_candidates, rng);
    }
};

}  // namespace

TEST_CASE("oracle scorer reaches exactly HR = NDCG = 1") {
    EvalFixture fx(30, 50, 20, 3);
    std::unordered_map<std::size_t, std::size_t> test_item;
    for (const auto& t : fx.split.test_pos) test_item[t.user] = t.item;
    EvalReport r = evaluate_with_scores(
        fx.split.test_pos, fx.candidates,
        [&](std::size_t u, std::size_t i) { return i == test_item.at(u) ? 1.0 : 0.0; });
    CHECK(r.hr_at_10 == 1.0);
    CHECK(r.ndcg_at_10 == 1.0);
}

TEST_CASE("constant scores rank the held-out item last (pessimistic ties)") {
    EvalFixture fx(10, 50, 20, 5);
    EvalReport r = evaluate_with_scores(fx.split.test_pos, fx.candidates,
                                        [](std::size_t, std::size_t) { return 0.5; });
    CHECK(r.hr_at_10 == 0.0);
    for (const auto& row : r.per_user) CHECK(row.rank == 20);
}

TEST_CASE("random scores over 1000 users x 100 candidates calibrate to HR ~ 0.10") {
    // synthetic candidate lists, no graph needed
    std::vector<Interaction> held;
    std::unordered_map<std::size_t, std::vector<std::size_t>> candidates;
    Rng rng(123);
    for (std::size_t u = 0; u < 1000; ++u) {
        std::vector<std::size_t> list(100);
        for (std::size_t i = 0; i < 100; ++i) list[i] = 10000 + u * 100 + i;
        const std::size_t target = list[rng.below(100)];
        held.push_back({u, target, 0});
        candidates[u] = std::move(list);
    }
    EvalReport r = evaluate_with_scores(held, candidates, [](std::size_t u, std::size_t i) {
        return static_cast<double>(Rng::splitmix64(u * 1315423911ULL + i));
    });
    CHECK(r.hr_at_10 == doctest::Approx(0.10).epsilon(0.30));  // +-0.03 absolute
    CHECK(r.hr_at_10 >= 0.07);
    CHECK(r.hr_at_10 <= 0.13);
    for (const auto& row : r.per_user) {
        CHECK(row.ndcg <= row.hr);
        if (row.hr == 0.0) CHECK(row.ndcg == 0.0);
    }
    CHECK(r.ndcg_at_10 <= r.hr_at_10);
}

TEST_CASE("model evaluation is deterministic and thread-count independent") {
    EvalFixture fx(15, 30, 12, 9);
    auto metapaths = planted_metapaths(fx.hin);
    PreparedGraph graph = prepare_graph<float>(fx.hin, metapaths, LayerKind::Sage);
    Rng init(4);
    ModelParams params =
        init_model_params<float>(graph, fx.hin.n_nodes(), 6, 4, 6, LayerKind::Sage, init);

    EvalReport a = evaluate_leave_one_out(params, graph, fx.split.test_pos, fx.candidates, 10, 1);
    EvalReport b = evaluate_leave_one_out(params, graph, fx.split.test_pos, fx.candidates, 10, 4);
    CHECK(a.hr_at_10 == b.hr_at_10);
    CHECK(a.ndcg_at_10 == b.ndcg_at_10);
    CHECK(a.n_users == fx.split.test_pos.size());

    EvalReport c = evaluate_leave_one_out(params, graph, fx.split.test_pos, fx.candidates, 10, 1);
    CHECK(a.hr_at_10 == c.hr_at_10);

    auto missing = fx.candidates;
    missing.erase(fx.split.test_pos[0].user);
    CHECK_THROWS_AS(
        evaluate_leave_one_out(params, graph, fx.split.test_pos, missing, 10, 1),
        ContractError);
}

TEST_CASE("attention report: per-terminal means sum to one, gamma=1 reports 1.0") {
    EvalFixture fx(12, 20, 12, 2);
    auto metapaths = planted_metapaths(fx.hin);
    PreparedGraph graph = prepare_graph<float>(fx.hin, metapaths, LayerKind::Gcn);
    Rng init(8);
    ModelParams params =
        init_model_params<float>(graph, fx.hin.n_nodes(), 6, 4, 6, LayerKind::Gcn, init);

    auto rows = attention_report(params, graph);
    REQUIRE(rows.size() == metapaths.size());
    double user_sum = 0, item_sum = 0;
    for (const auto& r : rows) (r.terminal == "user" ? user_sum : item_sum) += r.mean_attention;
    CHECK(user_sum == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(item_sum == doctest::Approx(1.0).epsilon(1e-4));

    auto rows2 = attention_report(params, graph);
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(rows[i].mean_attention == rows2[i].mean_attention);

    // degenerate single-path-per-type config
    std::vector<Metapath> minimal = {parse_metapath(fx.hin, "F-M-U"),
                                     parse_metapath(fx.hin, "C-U-M")};
    PreparedGraph g1 = prepare_graph<float>(fx.hin, minimal, LayerKind::Gcn);
    Rng init2(9);
    ModelParams p1 = init_model_params<float>(g1, fx.hin.n_nodes(), 6, 4, 6, LayerKind::Gcn, init2);
    for (const auto& r : attention_report(p1, g1))
        CHECK(r.mean_attention == doctest::Approx(1.0));
}
