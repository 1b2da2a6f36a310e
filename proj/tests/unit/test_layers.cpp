#include <doctest.h>

#include "peagnn/layers.hpp"
#include "support/gradcheck.hpp"

using namespace peagnn;
using peagnn::testsupport::check_gradients;

namespace {

template <typename T>
CsrT<T> csr_of(std::size_t n, std::vector<Coo<T>> edges) {
    return csr_from_edges(n, n, std::move(edges));
}

// random directed graph with at least one edge
Csr random_graph(std::size_t n, Rng& rng) {
    std::vector<Coo<float>> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && rng.below(3) == 0) edges.push_back({i, j, 1.0f});
    edges.push_back({0, n - 1, 1.0f});
    return csr_from_edges(n, n, std::move(edges));
}

}  // namespace

TEST_CASE("gcn_step: zero adjacency with identity weights is the identity on relu-safe input") {
    const std::size_t n = 4, d = 3;
    Rng rng(1);
    Tensor x = Tensor::uniform(n, d, 0.1f, 2.0f, rng);  // non-negative
    LayerParams p;
    p.kind = LayerKind::Gcn;
    p.w = Tensor::identity(d);
    auto prep = prepare_step<float>(LayerKind::Gcn, Csr(n, n));
    Tensor y = gcn_step<float>(nullptr, x, prep, p);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(y.data[i] == doctest::Approx(x.data[i]).epsilon(1e-6));
}

TEST_CASE("gcn_step: single edge averages self and neighbor") {
    // edge s=0 -> t=1, x_0 = [2,0], x_1 = [0,0], W = I
    LayerParams p;
    p.kind = LayerKind::Gcn;
    p.w = Tensor::identity(2);
    Tensor x = Tensor::from_rows({{2, 0}, {0, 0}});
    auto prep = prepare_step<float>(LayerKind::Gcn, csr_of<float>(2, {{1, 0, 1.0f}}));
    Tensor y = gcn_step<float>(nullptr, x, prep, p);
    CHECK(y.at(1, 0) == doctest::Approx(1.0));  // mean of self 0 and neighbor 2
    CHECK(y.at(1, 1) == doctest::Approx(0.0));
    CHECK(y.at(0, 0) == doctest::Approx(2.0));  // only the self loop
}

TEST_CASE("sage_step: empty adjacency, singleton mean, basis-vector mean") {
    LayerParams p;
    p.kind = LayerKind::Sage;
    p.w = Tensor::identity(3);
    p.w_self = Tensor::identity(3);
    Rng rng(2);
    Tensor x = Tensor::uniform(4, 3, -1.0f, 1.0f, rng);

    auto empty = prepare_step<float>(LayerKind::Sage, Csr(4, 4));
    Tensor y = sage_step<float>(nullptr, x, empty, p);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(y.data[i] == doctest::Approx(std::max(0.0f, x.data[i])));

    // one neighbor: mean is that neighbor's vector (w_self = 0 isolates it)
    LayerParams p2 = p;
    p2.w_self = Tensor::zeros(3, 3);
    Tensor x2 = Tensor::from_rows({{0.5, -0.25, 1.0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
    auto one = prepare_step<float>(LayerKind::Sage, csr_of<float>(4, {{3, 0, 1.0f}}));
    Tensor y2 = sage_step<float>(nullptr, x2, one, p2);
    CHECK(y2.at(3, 0) == doctest::Approx(0.5));
    CHECK(y2.at(3, 1) == doctest::Approx(0.0));  // relu clips the negative entry
    CHECK(y2.at(3, 2) == doctest::Approx(1.0));

    // three standard-basis neighbors, W = I, W_self = 0 -> [1/3, 1/3, 1/3]
    Tensor basis = Tensor::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
    auto three =
        prepare_step<float>(LayerKind::Sage, csr_of<float>(4, {{3, 0, 1}, {3, 1, 1}, {3, 2, 1}}));
    Tensor y3 = sage_step<float>(nullptr, basis, three, p2);
    for (std::size_t j = 0; j < 3; ++j) CHECK(y3.at(3, j) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("gat_step: zero attention reduces to unweighted mean over N(t) + self") {
    const std::size_t n = 4, d = 2;
    Rng rng(3);
    Tensor x = Tensor::uniform(n, d, -1.0f, 1.0f, rng);
    LayerParams p;
    p.kind = LayerKind::Gat;
    p.w = Tensor::identity(d);
    p.attn = Tensor::zeros(2 * d, 1);
    Csr graph = csr_of<float>(n, {{1, 0, 1}, {1, 2, 1}, {3, 0, 1}});
    auto prep = prepare_step<float>(LayerKind::Gat, graph);
    Tensor y = gat_step<float>(nullptr, x, prep, p);

    // node 1 attends uniformly over {0, 1, 2}
    for (std::size_t j = 0; j < d; ++j) {
        const float mean = (x.at(0, j) + x.at(1, j) + x.at(2, j)) / 3.0f;
        CHECK(y.at(1, j) == doctest::Approx(std::max(0.0f, mean)).epsilon(1e-5));
    }
    // node 2 has no in-edges: attends only to itself
    for (std::size_t j = 0; j < d; ++j)
        CHECK(y.at(2, j) == doctest::Approx(std::max(0.0f, x.at(2, j))));
}

TEST_CASE("gat_step attention rows sum to one over each in-neighborhood") {
    const std::size_t n = 5, d = 3;
    Rng rng(4);
    Tensor x = Tensor::uniform(n, d, -1.0f, 1.0f, rng);
    LayerParams p = init_layer_params<float>(LayerKind::Gat, d, d, rng);
    Csr graph = random_graph(n, rng);
    auto prep = prepare_step<float>(LayerKind::Gat, graph);

    // recompute the alpha vector exactly as gat_step does
    Tensor xw = matmul<float>(nullptr, x, p.w);
    Tensor a_l = slice_rows<float>(nullptr, p.attn, 0, d);
    Tensor a_r = slice_rows<float>(nullptr, p.attn, d, 2 * d);
    Tensor l = matmul<float>(nullptr, xw, a_l);
    Tensor r = matmul<float>(nullptr, xw, a_r);
    Tensor alpha = segment_softmax<float>(
        nullptr, prep.prop, leaky_relu<float>(nullptr, edge_logits<float>(nullptr, prep.prop, l, r)));
    const auto& m = prep.prop->mat;
    for (std::size_t t = 0; t < m.n_rows; ++t) {
        if (m.row_ptr[t] == m.row_ptr[t + 1]) continue;
        float s = 0;
        for (std::size_t k = m.row_ptr[t]; k < m.row_ptr[t + 1]; ++k) s += alpha.data[k];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("node relabeling equivariance for all three layer kinds") {
    const std::size_t n = 6, d_in = 4, d_out = 3;
    for (LayerKind kind : {LayerKind::Gcn, LayerKind::Sage, LayerKind::Gat}) {
        Rng rng(50 + static_cast<int>(kind));
        TensorT<double> x = TensorT<double>::uniform(n, d_in, -1.0, 1.0, rng);
        LayerParamsT<double> p = init_layer_params<double>(kind, d_in, d_out, rng);
        Csr graph = random_graph(n, rng);

        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(perm);  // perm[i] = new id of node i

        std::vector<Coo<float>> pedges;
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t k = graph.row_ptr[t]; k < graph.row_ptr[t + 1]; ++k)
                pedges.push_back({perm[t], perm[graph.col_idx[k]], 1.0f});
        Csr pgraph = csr_from_edges(n, n, std::move(pedges));
        TensorT<double> px(n, d_in);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d_in; ++j) px.at(perm[i], j) = x.at(i, j);

        auto prep = prepare_step<double>(kind, graph);
        auto pprep = prepare_step<double>(kind, pgraph);
        TensorT<double> y = layer_step<double>(nullptr, x, prep, p);
        TensorT<double> py = layer_step<double>(nullptr, px, pprep, p);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d_out; ++j)
                CHECK(py.at(perm[i], j) == doctest::Approx(y.at(i, j)).epsilon(1e-12));
    }
}

TEST_CASE("all three layers pass finite-difference checks on random 8-node graphs") {
    const std::size_t n = 8, d_in = 3, d_out = 2;
    for (LayerKind kind : {LayerKind::Gcn, LayerKind::Sage, LayerKind::Gat}) {
        for (std::uint64_t trial = 0; trial < 5; ++trial) {
            Rng rng(300 + 10 * static_cast<int>(kind) + trial);
            Csr graph = random_graph(n, rng);
            auto prep = prepare_step<double>(kind, graph);
            LayerParamsT<double> proto = init_layer_params<double>(kind, d_in, d_out, rng);

            std::vector<TensorT<double>> leaves{TensorT<double>::uniform(n, d_in, -1, 1, rng),
                                                proto.w};
            if (kind == LayerKind::Sage) leaves.push_back(proto.w_self);
            if (kind == LayerKind::Gat) leaves.push_back(proto.attn);

            auto f = [&](TapeT<double>* t, const std::vector<TensorT<double>>& l) {
                LayerParamsT<double> p;
                p.kind = kind;
                p.w = l[1];
                if (kind == LayerKind::Sage) p.w_self = l[2];
                if (kind == LayerKind::Gat) p.attn = l[2];
                return mean_all(t, layer_step(t, l[0], prep, p));
            };
            auto rep = check_gradients<double>(f, leaves, 1e-6, 1e-5);
            INFO("kind ", layer_kind_name(kind), " trial ", trial, " ", rep.detail);
            CHECK(rep.ok);
        }
    }
}
