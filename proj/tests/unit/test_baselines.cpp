#include "seqmon/baselines.hpp"
#include "seqmon/checkpoint.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace seqmon;

namespace {

MonitorConfig cfg_for(Method m, std::int64_t n_total) {
    MonitorConfig cfg;
    cfg.method = m;
    cfg.B = 10;
    cfg.n_total = n_total;
    return cfg;
}

// Direct mixture likelihood ratio from per-arm samples.
double avt_reference(const std::vector<double>& y0, const std::vector<double>& y1, double tau2) {
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    const double m0 = mean(y0), m1 = mean(y1);
    double ss = 0.0;
    for (double x : y0) ss += (x - m0) * (x - m0);
    for (double x : y1) ss += (x - m1) * (x - m1);
    const double s2 = ss / static_cast<double>(y0.size() + y1.size() - 2);
    const double v = s2 * (1.0 / y0.size() + 1.0 / y1.size());
    const double d = m0 - m1;
    return std::sqrt(v / (v + tau2)) * std::exp(tau2 * d * d / (2.0 * v * (v + tau2)));
}

}  // namespace

TEST_CASE("LIL bound closed form") {
    CHECK(lil_bound_from(2.0, 1000, 0.0) == 0.0);
    const double b = lil_bound_from(1.5, 1000, 4.0);
    CHECK(b == doctest::Approx(1.5 * std::sqrt(2.0 * std::log(std::log(1000.0)) / 1000.0) * 2.0).epsilon(1e-14));
    const double ratio = lil_bound_from(1.0, 10000, 3.0) / lil_bound_from(1.0, 1000000, 3.0);
    const double want = std::sqrt(std::log(std::log(1e4)) / 1e4) / std::sqrt(std::log(std::log(1e6)) / 1e6);
    CHECK(std::abs(ratio - want) < 1e-6 * want);
    CHECK_THROWS_AS(lil_bound_from(1.0, 2, 1.0), std::domain_error);
    double prev = lil_bound_from(1.0, 16, 1.0);
    for (std::int64_t n = 17; n < 5000; n += 7) {
        const double cur = lil_bound_from(1.0, n, 1.0);
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("LIL variance term is the mean squared influence norm") {
    std::mt19937_64 rng(3);
    const auto basis = make_linear(2);
    const auto data = oracle::random_stream(rng, 500, 2);
    ArmState s(basis.q);
    for (const auto& o : data) s.ingest(basis, o);
    s.refresh_coefficients();
    s.stage_accumulate(basis, data);
    s.stage_close();
    double sum = 0.0;
    for (const auto& o : data) {
        const Eigen::VectorXd phi = eval_basis(basis, o.x);
        const int a = o.arm;
        const double r = o.y - phi.dot(s.beta_hat(a));
        sum += (s.sigma_inv(a) * phi * r).squaredNorm();
    }
    CHECK(lil_variance_term(s) == doctest::Approx(sum / 500.0).epsilon(1e-12));
}

TEST_CASE("LIL monitor with exact fits never rejects") {
    const auto basis = make_linear(1);
    LilMonitor mon(basis, cfg_for(Method::Lil, 200));
    std::vector<Observation> batch;
    for (int i = 0; i < 100; ++i) batch.push_back({{0.01 * i}, i % 2, 1.0 + 0.01 * i});
    const auto d = mon.interim(batch);
    CHECK(d.boundary < 1e-12);
    CHECK(d.statistic < 1e-12);
    CHECK(d.verdict == Verdict::Continue);
    CHECK(d.argmax_x.size() == 1);
}

TEST_CASE("AVT statistic") {
    AvtState s;
    for (double y : {1.0, 2.0, 3.0}) s.add(0, y);
    for (double y : {2.0, 1.0, 3.0}) s.add(1, y);
    CHECK(s.difference() == 0.0);
    const double v = s.pooled_variance() * (1.0 / 3 + 1.0 / 3);
    CHECK(avt_statistic(s) == doctest::Approx(std::sqrt(v / (v + 1.0))).epsilon(1e-14));
    CHECK(avt_statistic(s) < 1.0);

    std::mt19937_64 rng(8);
    std::normal_distribution<double> z;
    std::vector<double> y0, y1;
    AvtState t, shuffled;
    for (int i = 0; i < 300; ++i) {
        const int a = i % 3 == 0;
        const double y = z(rng) + 0.2 * a;
        (a ? y1 : y0).push_back(y);
        t.add(a, y);
    }
    CHECK(avt_statistic(t) == doctest::Approx(avt_reference(y0, y1, 1.0)).epsilon(1e-10));
    // order invariance
    for (auto it = y1.rbegin(); it != y1.rend(); ++it) shuffled.add(1, *it);
    for (auto it = y0.rbegin(); it != y0.rend(); ++it) shuffled.add(0, *it);
    CHECK(avt_statistic(shuffled) == doctest::Approx(avt_statistic(t)).epsilon(1e-12));
    // vanishing mixture variance: ratio tends to one
    t.tau2 = 1e-12;
    CHECK(avt_statistic(t) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("AVT degenerate cases") {
    AvtState s;
    s.add(0, 1.0);
    s.add(0, 1.0);
    s.add(1, 2.0);
    s.add(1, 2.0);
    CHECK(std::isinf(avt_log_statistic(s)));
    CHECK(avt_log_statistic(s) > 0.0);
    AvtState few;
    few.add(0, 1.0);
    few.add(1, 1.0);
    CHECK_THROWS(avt_log_statistic(few));
}

TEST_CASE("AVT monitor rejects only for treatment-favouring differences") {
    const auto basis = make_linear(0);
    auto batch = [](double shift) {
        std::vector<Observation> b;
        std::mt19937_64 rng(1);
        std::normal_distribution<double> z;
        for (int i = 0; i < 400; ++i) b.push_back({{}, i % 2, z(rng) + (i % 2) * shift});
        return b;
    };
    AvtMonitor up(basis, cfg_for(Method::Avt, 400)), down(basis, cfg_for(Method::Avt, 400));
    const auto du = up.interim(batch(1.0));
    CHECK(du.verdict == Verdict::Reject);
    CHECK(du.boundary == doctest::Approx(20.0));
    CHECK(down.interim(batch(-1.0)).verdict == Verdict::Continue);

    AvtMonitor early(basis, cfg_for(Method::Avt, 400));
    std::vector<Observation> tiny{{{}, 0, 1.0}, {{}, 1, 2.0}};
    CHECK(early.interim(tiny).warning);
}

TEST_CASE("baseline checkpoints round trip") {
    const auto basis = make_linear(1);
    std::mt19937_64 rng(2);
    const auto data = oracle::random_stream(rng, 300, 1, 0.5, 0.0);
    for (Method m : {Method::Lil, Method::Avt}) {
        auto a = make_sequential_test(basis, cfg_for(m, 300));
        a->interim(std::span<const Observation>(data.data(), 200));
        std::stringstream ss;
        CheckpointWriter w(ss);
        a->save(w);
        auto b = make_sequential_test(basis, cfg_for(m, 300));
        CheckpointReader r(ss);
        b->load(r);
        const std::span<const Observation> rest(data.data() + 200, 100);
        const auto da = a->interim(rest), db = b->interim(rest);
        CHECK(da.statistic == db.statistic);
        CHECK(da.boundary == db.boundary);
    }
}
