#include <doctest.h>

#include <cmath>

#include "peagnn/tape.hpp"
#include "peagnn/tensor.hpp"

using namespace peagnn;

TEST_CASE("matmul identity and known product") {
    Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
    Tensor y = matmul<float>(nullptr, a, Tensor::identity(2));
    CHECK(y.data == std::vector<float>{1, 2, 3, 4});

    Tensor b = Tensor::from_rows({{5}, {6}});
    Tensor p = matmul<float>(nullptr, a, b);
    CHECK(p.rows == 2);
    CHECK(p.cols == 1);
    CHECK(p.data[0] == doctest::Approx(17));
    CHECK(p.data[1] == doctest::Approx(39));
}

TEST_CASE("matmul against a naive triple loop on random shapes") {
    Rng rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t m = 1 + rng.below(6), k = 1 + rng.below(6), n = 1 + rng.below(6);
        Tensor a = Tensor::uniform(m, k, -2.0f, 2.0f, rng);
        Tensor b = Tensor::uniform(k, n, -2.0f, 2.0f, rng);
        Tensor y = matmul<float>(nullptr, a, b);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                float acc = 0;
                for (std::size_t p = 0; p < k; ++p) acc += a.at(i, p) * b.at(p, j);
                CHECK(y.at(i, j) == doctest::Approx(acc).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("matmul shape mismatch names both shapes") {
    Tensor a(2, 3), b(2, 3);
    CHECK_THROWS_WITH_AS(matmul<float>(nullptr, a, b),
                         doctest::Contains("[2x3]"), DimensionError);
}

TEST_CASE("activations: relu, sigmoid, leaky_relu, ln, softplus") {
    Tensor x = Tensor::row({-1, 0, 2});
    Tensor r = relu<float>(nullptr, x);
    CHECK(r.data == std::vector<float>{0, 0, 2});

    CHECK(sigmoid<float>(nullptr, Tensor::scalar(0)).item() == doctest::Approx(0.5));

    Tensor l = leaky_relu<float>(nullptr, Tensor::scalar(-10), 0.2f);
    CHECK(l.item() == doctest::Approx(-2.0));

    CHECK_THROWS_AS(ln<float>(nullptr, Tensor::row({1, 0})), DomainError);
    CHECK(ln<float>(nullptr, Tensor::scalar(std::exp(1.0f))).item() == doctest::Approx(1.0));

    // softplus(0) = ln 2; softplus is finite far into both tails
    CHECK(softplus<float>(nullptr, Tensor::scalar(0)).item() ==
          doctest::Approx(std::log(2.0)));
    CHECK(softplus<float>(nullptr, Tensor::scalar(-200.0f)).item() == doctest::Approx(0.0));
    CHECK(softplus<float>(nullptr, Tensor::scalar(200.0f)).item() == doctest::Approx(200.0));
}

TEST_CASE("sigmoid stays finite on extreme inputs") {
    Tensor x = Tensor::row({-120, -40, 0, 40, 120});
    Tensor y = sigmoid<float>(nullptr, x);
    CHECK(y.all_finite());
    CHECK(y.data.front() >= 0.0f);
    CHECK(y.data.back() <= 1.0f);
}

TEST_CASE("softmax_rows: symmetry, closed form, shift invariance") {
    Tensor z = softmax_rows<float>(nullptr, Tensor::row({0, 0, 0}));
    for (float v : z.data) CHECK(v == doctest::Approx(1.0 / 3.0));

    Tensor logs = Tensor::row({std::log(1.0f), std::log(2.0f), std::log(3.0f)});
    Tensor s = softmax_rows<float>(nullptr, logs);
    CHECK(s.data[0] == doctest::Approx(1.0 / 6.0));
    CHECK(s.data[1] == doctest::Approx(2.0 / 6.0));
    CHECK(s.data[2] == doctest::Approx(3.0 / 6.0));

    Tensor big = softmax_rows<float>(nullptr, Tensor::row({1000, 1000}));
    CHECK(big.data[0] == doctest::Approx(0.5));
    CHECK(big.data[1] == doctest::Approx(0.5));
    CHECK(big.all_finite());
}

TEST_CASE("softmax_rows rows sum to one and shifting a row changes nothing") {
    Rng rng(7);
    Tensor x = Tensor::uniform(5, 4, -3.0f, 3.0f, rng);
    Tensor y = softmax_rows<float>(nullptr, x);
    Tensor x_shift = x;
    for (std::size_t j = 0; j < x.cols; ++j) x_shift.at(2, j) += 13.5f;
    Tensor y_shift = softmax_rows<float>(nullptr, x_shift);
    for (std::size_t i = 0; i < y.rows; ++i) {
        float sum = 0;
        for (std::size_t j = 0; j < y.cols; ++j) sum += y.at(i, j);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
    for (std::size_t j = 0; j < y.cols; ++j)
        CHECK(y_shift.at(2, j) == doctest::Approx(y.at(2, j)).epsilon(1e-6));
}

TEST_CASE("gather_rows forward, scatter-add backward, bounds") {
    Tensor t = Tensor::from_rows({{1, 2}, {3, 4}, {5, 6}, {7, 8}});
    Tensor one = gather_rows<float>(nullptr, t, {0});
    CHECK(one.rows == 1);
    CHECK(one.data == std::vector<float>{1, 2});

    Tape tape;
    Tensor wt = tape.leaf(t);
    Tensor g = gather_rows(&tape, wt, {3, 3});
    Tensor loss = sum_all(&tape, g);
    tape.backward(loss);
    Tensor grad = tape.grad(wt);
    CHECK(grad.at(3, 0) == doctest::Approx(2.0));  // duplicates accumulate
    CHECK(grad.at(3, 1) == doctest::Approx(2.0));
    CHECK(grad.at(0, 0) == doctest::Approx(0.0));

    Tensor small(5, 2);
    CHECK_THROWS_AS(gather_rows<float>(nullptr, small, {7}), IndexError);
}

TEST_CASE("concat_cols and slicing") {
    Tensor a = Tensor::from_rows({{1}});
    Tensor b = Tensor::from_rows({{2}});
    Tensor c = concat_cols<float>(nullptr, a, b);
    CHECK(c.rows == 1);
    CHECK(c.data == std::vector<float>{1, 2});

    Rng rng(3);
    Tensor l = Tensor::uniform(4, 16, -1.0f, 1.0f, rng);
    Tensor r = Tensor::uniform(4, 16, -1.0f, 1.0f, rng);
    Tensor wide = concat_cols<float>(nullptr, l, r);
    CHECK(wide.cols == 32);
    Tensor back = slice_cols<float>(nullptr, wide, 16, 32);
    CHECK(back.data == r.data);

    Tensor single = concat_cols<float>(nullptr, std::vector<Tensor>{l});
    CHECK(single.data == l.data);

    Tensor bad(3, 2);
    CHECK_THROWS_AS(concat_cols<float>(nullptr, Tensor(2, 2), bad), DimensionError);
}

TEST_CASE("backward: sum of squares gives 2x") {
    Rng rng(11);
    Tensor x = Tensor::uniform(3, 3, -2.0f, 2.0f, rng);
    Tape tape;
    Tensor wx = tape.leaf(x);
    Tensor loss = sum_all(&tape, mul(&tape, wx, wx));
    tape.backward(loss);
    CHECK(tape.grad(loss).item() == doctest::Approx(1.0));  // d loss / d loss == 1
    Tensor g = tape.grad(wx);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(g.data[i] == doctest::Approx(2.0f * x.data[i]).epsilon(1e-5));
}

TEST_CASE("backward: sigmoid(w*x) at w=0, x=1 gives dw = 0.25") {
    Tape tape;
    Tensor w = tape.leaf(Tensor::scalar(0));
    Tensor x = Tensor::scalar(1);
    Tensor loss = sigmoid(&tape, mul(&tape, w, x));
    tape.backward(loss);
    CHECK(tape.grad(w).item() == doctest::Approx(0.25));
}

TEST_CASE("backward rejects non-scalar loss and foreign tensors") {
    Tape tape;
    Tensor x = tape.leaf(Tensor::from_rows({{1, 2}}));
    Tensor y = relu(&tape, x);
    CHECK_THROWS_AS(tape.backward(y), ContractError);
    Tensor foreign = Tensor::scalar(1);
    CHECK_THROWS_AS(tape.backward(foreign), ContractError);
}

TEST_CASE("unreached leaves read back as zero gradients") {
    Tape tape;
    Tensor used = tape.leaf(Tensor::scalar(2));
    Tensor unused = tape.leaf(Tensor::from_rows({{1, 2}, {3, 4}}));
    Tensor loss = mul(&tape, used, used);
    tape.backward(loss);
    Tensor g = tape.grad(unused);
    CHECK(g.rows == 2);
    CHECK(g.cols == 2);
    for (float v : g.data) CHECK(v == 0.0f);
}

TEST_CASE("two backward calls on independent tapes are bitwise identical") {
    Rng rng(99);
    Tensor x = Tensor::uniform(4, 3, -1.0f, 1.0f, rng);
    Tensor w = Tensor::uniform(3, 2, -1.0f, 1.0f, rng);
    auto run = [&]() {
        Tape tape;
        Tensor wx = tape.leaf(x);
        Tensor ww = tape.leaf(w);
        Tensor loss = mean_all(&tape, softplus(&tape, matmul(&tape, wx, ww)));
        tape.backward(loss);
        return std::make_pair(tape.grad(wx).data, tape.grad(ww).data);
    };
    auto [gx1, gw1] = run();
    auto [gx2, gw2] = run();
    CHECK(gx1 == gx2);
    CHECK(gw1 == gw2);
}

TEST_CASE("broadcast helpers: mul_colvec, add_rowvec, row_sums, scale") {
    Tensor x = Tensor::from_rows({{1, 2}, {3, 4}});
    Tensor c(2, 1, {10, 100});
    Tensor y = mul_colvec<float>(nullptr, x, c);
    CHECK(y.data == std::vector<float>{10, 20, 300, 400});

    Tensor b = Tensor::row({5, -5});
    Tensor z = add_rowvec<float>(nullptr, x, b);
    CHECK(z.data == std::vector<float>{6, -3, 8, -1});

    Tensor s = row_sums<float>(nullptr, x);
    CHECK(s.data == std::vector<float>{3, 7});

    CHECK(scale<float>(nullptr, x, 0.5f).data == std::vector<float>{0.5, 1, 1.5, 2});
    CHECK(mean_all<float>(nullptr, x).item() == doctest::Approx(2.5));
}
