#include "seqmon/bootstrap.hpp"
#include "seqmon/checkpoint.hpp"
#include "seqmon/linalg.hpp"
#include "seqmon/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace seqmon;

namespace {

Eigen::MatrixXd random_psd(std::mt19937_64& rng, int q) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd a(q + 1, q);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = z(rng);
    return a.transpose() * a;
}

}  // namespace

TEST_CASE("draws are keyed per column and independent of B") {
    BootstrapEnsemble small(3, 4, 99), large(50, 4, 99);
    const Eigen::MatrixXd a = small.draws(2, 1), b = large.draws(2, 1);
    CHECK(a == b.leftCols(3));
    CHECK(small.draws(2, 0) != a);
    CHECK(small.draws(3, 1) != a);
    CHECK(BootstrapEnsemble(3, 4, 100).draws(2, 1) != a);
}

TEST_CASE("draws are standard normal") {
    BootstrapEnsemble e(20000, 2, 5);
    const Eigen::MatrixXd d = e.draws(1, 0);
    const double mean = d.mean();
    const double var = (d.array() - mean).square().mean();
    CHECK(std::abs(mean) < 4.0 / std::sqrt(40000.0));
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / 40000.0));
    const double corr = (d.row(0).array() * d.row(1).array()).mean();
    CHECK(std::abs(corr) < 4.0 / std::sqrt(20000.0));
}

TEST_CASE("stage update with zero sandwich only decays") {
    BootstrapEnsemble e(8, 2, 1);
    std::mt19937_64 rng(1);
    e.stage_update(psd_sqrt(random_psd(rng, 2)), psd_sqrt(random_psd(rng, 2)), 100, 100, 1);
    const Eigen::MatrixXd before = e.paths(1);
    e.stage_update(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2), 150, 50, 2);
    CHECK(e.paths(1).isApprox(before * (1.0 - 50.0 / 150.0), 1e-15));
    CHECK_THROWS_AS(e.stage_update(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2), 10, 11, 3),
                    std::invalid_argument);
}

TEST_CASE("single stage is the scaled root times the draws") {
    std::mt19937_64 rng(2);
    BootstrapEnsemble e(16, 3, 42);
    const Eigen::MatrixXd r0 = psd_sqrt(random_psd(rng, 3)), r1 = psd_sqrt(random_psd(rng, 3));
    e.stage_update(r0, r1, 250, 250, 1);
    CHECK(oracle::relative_error(e.paths(0), r0 * e.draws(1, 0) / 250.0) < 1e-15);
    CHECK(oracle::relative_error(e.paths(1), r1 * e.draws(1, 1) / 250.0) < 1e-15);
}

TEST_CASE("online updates telescope to the closed-form sum") {
    std::mt19937_64 rng(3);
    const int q = 5, B = 64, K = 5;
    BootstrapEnsemble e(B, q, 7);
    CounterNormal normals(7);
    std::vector<Eigen::MatrixXd> roots[2];
    std::int64_t n = 0;
    const std::int64_t sizes[K] = {400, 37, 200, 1, 90};
    for (int k = 1; k <= K; ++k) {
        n += sizes[k - 1];
        for (auto& r : roots) r.push_back(psd_sqrt(random_psd(rng, q)));
        e.stage_update(roots[0].back(), roots[1].back(), n, sizes[k - 1], k);
    }
    for (int a = 0; a < 2; ++a) {
        Eigen::MatrixXd want = Eigen::MatrixXd::Zero(q, B);
        for (int k = 1; k <= K; ++k) {
            Eigen::MatrixXd ek(q, B);
            for (int b = 0; b < B; ++b) {
                auto s = normals.stream(k, b, a);
                for (int j = 0; j < q; ++j) ek(j, b) = s.next();
            }
            want += roots[a][k - 1] * ek;
        }
        want /= static_cast<double>(n);
        CHECK((e.paths(a) - want).cwiseAbs().maxCoeff() <= 1e-12 * want.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("boundary is the ceil(p|I|)-th largest survivor") {
    BootstrapEnsemble e(10, 1, 0);
    const std::vector<double> s{5, 1, 9, 3, 7, 2, 8, 4, 6, 10};
    auto r = e.solve_boundary(s, 0.25);  // p|I| = 2.5 -> 3rd largest
    CHECK(r.spend_level == doctest::Approx(0.25));
    CHECK(r.z == 8.0);
    CHECK(r.newly_pruned == 2);
    CHECK(e.survivors() == 8);
    CHECK_FALSE(e.alive(2));
    CHECK_FALSE(e.alive(9));

    // second stage: spent 0.2, alpha 0.4 -> p = 0.25 of 8 survivors -> 2nd largest
    const std::vector<double> s2{1, 2, 3, 4, 5, 6, 7, 8, 100, 100};
    r = e.solve_boundary(s2, 0.4);
    CHECK(r.spend_level == doctest::Approx(0.25));
    std::vector<double> live;
    for (int b : {0, 1, 3, 4, 5, 6, 7, 8}) live.push_back(s2[b]);
    CHECK(r.z == oracle::kth_largest(live, 2));
    CHECK(r.z == 8.0);
    CHECK(e.survivors() == 7);
}

TEST_CASE("nothing to spend means an infinite boundary") {
    BootstrapEnsemble e(20, 1, 0);
    std::vector<double> s(20);
    for (int b = 0; b < 20; ++b) s[b] = b;
    auto r = e.solve_boundary(s, 0.0);
    CHECK(std::isinf(r.z));
    CHECK(e.survivors() == 20);
    r = e.solve_boundary(s, 0.01);  // p|I| = 0.2 -> rank 1
    CHECK(r.z == 19.0);
    CHECK(r.newly_pruned == 0);
    // spend target below what is already spent clips to zero
    BootstrapEnsemble f(10, 1, 0);
    std::vector<double> t{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
    f.solve_boundary(t, 0.5);
    r = f.solve_boundary(t, 0.3);
    CHECK(r.spend_level == 0.0);
    CHECK(std::isinf(r.z));
    CHECK_THROWS_AS(f.solve_boundary(std::vector<double>(3, 0.0), 0.1), std::invalid_argument);
}

TEST_CASE("scalar path telescopes") {
    BootstrapEnsemble e(32, 1, 11, true);
    e.scalar_stage_update(4.0, 100, 100, 1);
    e.scalar_stage_update(9.0, 150, 50, 2);
    const Eigen::VectorXd want = (2.0 * e.scalar_draws(1) + 3.0 * e.scalar_draws(2)) / 150.0;
    CHECK((e.scalar_path() - want).cwiseAbs().maxCoeff() < 1e-15);
    BootstrapEnsemble plain(4, 1, 0);
    CHECK_THROWS_AS(plain.scalar_stage_update(1.0, 1, 1, 1), std::logic_error);
}

TEST_CASE("ensemble checkpoint round trip") {
    std::mt19937_64 rng(4);
    BootstrapEnsemble e(40, 3, 123, true);
    e.stage_update(psd_sqrt(random_psd(rng, 3)), psd_sqrt(random_psd(rng, 3)), 300, 300, 1);
    e.scalar_stage_update(2.0, 300, 300, 1);
    std::vector<double> s(40);
    for (int b = 0; b < 40; ++b) s[b] = e.paths(1)(0, b);
    e.solve_boundary(s, 0.1);
    std::stringstream ss;
    CheckpointWriter w(ss);
    e.save(w);
    CheckpointReader r(ss);
    const BootstrapEnsemble f = BootstrapEnsemble::load(r);
    CHECK(f.B() == 40);
    CHECK(f.seed() == 123);
    CHECK(f.paths(0) == e.paths(0));
    CHECK(f.paths(1) == e.paths(1));
    CHECK(f.scalar_path() == e.scalar_path());
    CHECK(f.survivors() == e.survivors());
    for (int b = 0; b < 40; ++b) CHECK(f.alive(b) == e.alive(b));
    CHECK(f.draws(2, 0) == e.draws(2, 0));
}

TEST_CASE("single-look boundary on ten thousand synthetic statistics") {
    const int B = 10000;
    BootstrapEnsemble e(B, 1, 0);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> z;
    std::vector<double> s(B);
    for (auto& v : s) v = z(rng);
    const auto r = e.solve_boundary(s, 0.05);
    CHECK(r.z == oracle::kth_largest(s, 500));
    CHECK(r.newly_pruned <= 500);
    CHECK(r.newly_pruned == 499);  // continuous draws: no ties at the order statistic
}

TEST_CASE("tied statistics prune all or nothing") {
    BootstrapEnsemble e(50, 1, 0);
    const std::vector<double> s(50, 1.25);
    const auto r = e.solve_boundary(s, 0.1);
    CHECK(r.z == 1.25);
    CHECK(r.newly_pruned == 0);
    CHECK(e.survivors() == 50);
}
