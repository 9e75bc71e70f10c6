#include "seqmon/linalg.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace seqmon;

namespace {

Eigen::MatrixXd random_psd(std::mt19937_64& rng, int q, int rank) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd a(rank, q);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = z(rng);
    return a.transpose() * a;
}

}  // namespace

TEST_CASE("psd_sqrt on diagonal inputs") {
    CHECK(psd_sqrt(Eigen::MatrixXd::Identity(4, 4)).isApprox(Eigen::MatrixXd::Identity(4, 4), 1e-15));
    Eigen::MatrixXd d = Eigen::Vector2d(4.0, 9.0).asDiagonal();
    const Eigen::MatrixXd r = psd_sqrt(d);
    CHECK(r(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r(1, 1) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(std::abs(r(0, 1)) < 1e-15);
    CHECK(psd_sqrt(Eigen::MatrixXd::Zero(3, 3)).isZero());
}

TEST_CASE("psd_sqrt reconstructs random PSD matrices") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 50; ++t) {
        const int q = 1 + t % 12;
        const int rank = t % 3 == 0 ? std::max(1, q / 2) : q + 2;
        const Eigen::MatrixXd m = random_psd(rng, q, rank);
        const Eigen::MatrixXd r = psd_sqrt(m);
        CHECK(oracle::relative_error(r * r, m) < 1e-10);
        CHECK((r - r.transpose()).norm() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
        CHECK(es.eigenvalues().minCoeff() > -1e-10 * std::max(1.0, es.eigenvalues().maxCoeff()));
    }
}

TEST_CASE("psd_sqrt rejects asymmetric and indefinite input") {
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 0.5, 0.0, 1.0;
    CHECK_THROWS_AS(psd_sqrt(a), std::domain_error);
    Eigen::MatrixXd b = Eigen::Vector2d(1.0, -0.1).asDiagonal();
    CHECK_THROWS_AS(psd_sqrt(b), std::domain_error);
    // tiny negative round-off is clipped
    Eigen::MatrixXd c = Eigen::Vector2d(1.0, -1e-14).asDiagonal();
    const Eigen::MatrixXd rc = psd_sqrt(c);
    CHECK(rc(1, 1) == 0.0);
}

TEST_CASE("pinv_sym matches an SVD pseudoinverse") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 30; ++t) {
        const int q = 2 + t % 8;
        const int rank = t % 2 ? q : std::max(1, q - 2);
        const Eigen::MatrixXd m = random_psd(rng, q, rank);
        const Eigen::MatrixXd p = pinv_sym(m);
        const Eigen::MatrixXd want = oracle::pinv(m);
        CHECK(oracle::relative_error(p, want) < 1e-8);
        // Moore-Penrose conditions
        CHECK(oracle::relative_error(m * p * m, m) < 1e-9);
        CHECK(oracle::relative_error(p * m * p, p) < 1e-9);
    }
    CHECK(pinv_sym(Eigen::MatrixXd::Zero(3, 3)).isZero());
}
