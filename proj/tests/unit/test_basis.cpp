#include "seqmon/basis.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace seqmon;

TEST_CASE("linear basis prepends an intercept") {
    CHECK(make_linear(3).q == 4);
    const auto b0 = make_linear(0);
    CHECK(b0.q == 1);
    CHECK(eval_basis(b0, std::vector<double>{})[0] == 1.0);

    const auto b2 = make_linear(2);
    const Eigen::VectorXd phi = eval_basis(b2, std::vector<double>{1.0, 2.0});
    CHECK(phi[0] == 1.0);
    CHECK(phi[1] == 1.0);
    CHECK(phi[2] == 2.0);
    const Eigen::VectorXd phi2 = eval_basis(b2, std::vector<double>{0.5, -1.0});
    CHECK(phi2[1] == 0.5);
    CHECK(phi2[2] == -1.0);
}

TEST_CASE("spline dimension and knot placement") {
    const auto s = make_additive_cubic_spline(3, 4, Interval{-2.0, 2.0});
    CHECK(s.q == 22);
    REQUIRE(s.knots.size() == 3);
    const std::vector<double> want{-1.2, -0.4, 0.4, 1.2};
    for (const auto& k : s.knots) {
        REQUIRE(k.size() == 4);
        for (std::size_t j = 0; j < 4; ++j) CHECK(k[j] == doctest::Approx(want[j]).epsilon(1e-15));
    }
    CHECK(make_additive_cubic_spline(1, 1, Interval{0.0, 1.0}).q == 5);
}

TEST_CASE("spline construction rejects bad arguments") {
    CHECK_THROWS_AS(make_additive_cubic_spline(3, 0, Interval{-2.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_additive_cubic_spline(3, 4, Interval{1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_additive_cubic_spline(0, 4, Interval{-2.0, 2.0}), std::invalid_argument);
}

TEST_CASE("spline features match the recursive Cox-de Boor oracle") {
    const int m = 4;
    const auto s = make_additive_cubic_spline(3, m, Interval{-2.0, 2.0});
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> x{u(rng), u(rng), u(rng)};
        if (t == 0) x = {-2.0, 2.0, 0.4};  // both endpoints and a knot
        const Eigen::VectorXd got = eval_basis(s, x);
        const Eigen::VectorXd want = oracle::additive_spline(x, m, -2.0, 2.0);
        CHECK((got - want).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("full spline block is a partition of unity") {
    const auto s = make_additive_cubic_spline(1, 4, Interval{-2.0, 2.0});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 1000; ++t) {
        const Eigen::VectorXd block = eval_spline_block(s, 0, u(rng));
        CHECK(std::abs(block.sum() - 1.0) < 1e-12);
        CHECK(block.minCoeff() >= 0.0);
    }
}

TEST_CASE("covariates outside the support") {
    const auto s = make_additive_cubic_spline(2, 4, Interval{-2.0, 2.0});
    CHECK_NOTHROW(eval_basis(s, std::vector<double>{2.0 + 1e-10, -2.0 - 1e-10}));
    CHECK(eval_basis(s, std::vector<double>{2.0 + 1e-10, 0.0}) == eval_basis(s, std::vector<double>{2.0, 0.0}));
    CHECK_THROWS_AS(eval_basis(s, std::vector<double>{2.001, 0.0}), std::domain_error);
    CHECK_THROWS_AS(eval_basis(s, std::vector<double>{0.0}), std::invalid_argument);
}

TEST_CASE("spline basis is Lipschitz on a fine grid") {
    const auto s = make_additive_cubic_spline(3, 4, Interval{-2.0, 2.0});
    const int res = 41;
    const double h = 4.0 / (res - 1);
    double lip = 0.0;
    for (int dim = 0; dim < 3; ++dim)
        for (int i = 0; i + 1 < res; ++i) {
            std::vector<double> x{0.3, -0.7, 1.1};
            std::vector<double> y = x;
            x[dim] = -2.0 + i * h;
            y[dim] = -2.0 + (i + 1) * h;
            lip = std::max(lip, (eval_basis(s, x) - eval_basis(s, y)).norm() / h);
        }
    CHECK(std::isfinite(lip));
    // cubic B-spline derivatives are bounded by 3 / min knot gap = 3 / 0.8
    CHECK(lip < 3.0 / 0.8 * 2.0);
}

TEST_CASE("evaluation is pure and the Gram matrix is positive definite") {
    const auto s = make_additive_cubic_spline(3, 4, Interval{-2.0, 2.0});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(s.q, s.q);
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const std::vector<double> x{u(rng), u(rng), u(rng)};
        const Eigen::VectorXd a = eval_basis(s, x);
        if (i < 10) CHECK(a == eval_basis(s, x));
        gram += a * a.transpose() / n;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    CHECK(es.eigenvalues().minCoeff() > 1e-4);
}

TEST_CASE("same_basis compares structure") {
    const auto a = make_additive_cubic_spline(3, 4, Interval{-2.0, 2.0});
    CHECK(same_basis(a, make_additive_cubic_spline(3, 4, Interval{-2.0, 2.0})));
    CHECK_FALSE(same_basis(a, make_additive_cubic_spline(3, 5, Interval{-2.0, 2.0})));
    CHECK_FALSE(same_basis(a, make_linear(3)));
}
