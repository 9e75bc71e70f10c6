#include "seqmon/simlab.hpp"

#include "seqmon/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace seqmon {

namespace {
constexpr std::uint64_t kDgpDomain = 0x44475053545245ULL;
}

std::string to_string(Scenario s) { return s == Scenario::S1 ? "S1" : "S2"; }

Scenario scenario_from_string(const std::string& s) {
    if (s == "S1") return Scenario::S1;
    if (s == "S2") return Scenario::S2;
    throw std::invalid_argument("unknown scenario '" + s + "'");
}

Eigen::MatrixXd Dgp::covariance() const {
    Eigen::MatrixXd s(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s(i, j) = std::pow(corr_base, std::abs(i - j));
    return s;
}

double Dgp::tau(std::span<const double> x) const {
    const double u = (x[0] + x[1]) / std::numbers::sqrt2;
    const double g = scenario == Scenario::S1 ? delta * u * u / 3.0 : delta * std::cos(std::numbers::pi * u);
    return g * x[2] * x[2];
}

double Dgp::q0(std::span<const double> x, int a) const { return 1.0 + (x[0] - x[1]) / 2.0 + a * tau(x); }

std::vector<double> gen_covariates_raw(const Dgp& dgp, std::mt19937_64& rng) {
    // Cholesky factor of the fixed covariance, computed once per thread/dgp shape
    thread_local Eigen::MatrixXd chol;
    thread_local double chol_corr = -1.0;
    thread_local int chol_d = -1;
    if (chol_d != dgp.d || chol_corr != dgp.corr_base) {
        chol = dgp.covariance().llt().matrixL();
        chol_d = dgp.d;
        chol_corr = dgp.corr_base;
    }
    std::normal_distribution<double> z01(0.0, 1.0);
    Eigen::VectorXd z(dgp.d);
    for (int j = 0; j < dgp.d; ++j) z[j] = z01(rng);
    const Eigen::VectorXd x = chol * z;
    return std::vector<double>(x.data(), x.data() + x.size());
}

std::vector<double> gen_covariates(const Dgp& dgp, std::mt19937_64& rng) {
    auto x = gen_covariates_raw(dgp, rng);
    for (double& v : x) v = std::clamp(v, -dgp.trunc, dgp.trunc);
    return x;
}

double outcome_given_noise(const Dgp& dgp, std::span<const double> x, int a, double eps) {
    return dgp.q0(x, a) + eps;
}

double gen_outcome(const Dgp& dgp, std::span<const double> x, int a, std::mt19937_64& rng) {
    if (a != 0 && a != 1) throw std::invalid_argument("arm must be 0 or 1");
    std::normal_distribution<double> eps(0.0, dgp.noise_sd);
    return outcome_given_noise(dgp, x, a, eps(rng));
}

void TrialConfig::validate() const {
    if (n_first < 1) throw std::invalid_argument("trial: n_first must be >= 1");
    if (stages < 1) throw std::invalid_argument("trial: stages must be >= 1");
    if (stages > 1 && batch_n < 1) throw std::invalid_argument("trial: batch size must be >= 1");
    if (policy_refresh < 1) throw std::invalid_argument("trial: policy refresh interval must be >= 1");
    if (basis.dim_x != dgp.d) throw std::invalid_argument("trial: basis dimension does not match the DGP");
    if (dgp.noise_sd < 0.0) throw std::invalid_argument("trial: noise sd must be >= 0");
    policy.validate();
}

TrialResult run_trial(const TrialConfig& cfg) {
    cfg.validate();
    MonitorConfig mc = cfg.monitor;
    mc.n_total = cfg.total_samples();
    mc.seed = cfg.seed;
    auto test = make_sequential_test(cfg.basis, mc);

    std::mt19937_64 rng(mix64(cfg.seed, kDgpDomain));
    const bool greedy = cfg.policy.kind == PolicyKind::EpsilonGreedy;
    ArmState tracker(cfg.basis.q);
    PolicySnapshot snap;
    Eigen::VectorXd phi(cfg.basis.q);

    TrialResult res;
    std::int64_t j = 0;
    std::vector<Observation> batch;
    for (int k = 1; k <= cfg.stages; ++k) {
        const std::int64_t m = cfg.stage_size(k);
        batch.clear();
        batch.reserve(static_cast<std::size_t>(m));
        for (std::int64_t i = 0; i < m; ++i) {
            ++j;
            Observation o;
            o.x = gen_covariates(cfg.dgp, rng);
            if (greedy) eval_basis_into(cfg.basis, o.x, phi);
            const Assignment asg = assign(cfg.policy, phi, snap, j, rng);
            o.arm = asg.arm;
            o.y = gen_outcome(cfg.dgp, o.x, o.arm, rng);
            if (o.arm == cfg.dgp.oracle_arm(o.x)) ++res.greedy_matches;
            if (greedy) {
                tracker.ingest(phi, o.arm, o.y);
                if (j % cfg.policy_refresh == 0) {
                    tracker.refresh_coefficients();
                    snap = PolicySnapshot::from(tracker);
                }
            }
            if (cfg.record_log) res.log.push_back({k, o, asg.propensity});
            batch.push_back(std::move(o));
        }
        MonitorDecision d = test->interim(batch);
        if (cfg.record_trace) res.trace.push_back(d);
        if (d.verdict == Verdict::Reject) {
            res.rejected = true;
            res.stop_n = d.samples_used;
            res.stop_stage = k;
            return res;
        }
    }
    res.stop_n = test->arms().n();
    res.stop_stage = cfg.stages;
    return res;
}

Aggregate aggregate(std::span<const TrialResult> results) {
    Aggregate a;
    a.replications = static_cast<int>(results.size());
    if (results.empty()) return a;
    const double r = static_cast<double>(results.size());
    double rej = 0.0;
    double sum = 0.0;
    for (const auto& t : results) {
        rej += t.rejected ? 1.0 : 0.0;
        sum += static_cast<double>(t.stop_n);
    }
    a.rej_prob = rej / r;
    a.se_rej = std::sqrt(a.rej_prob * (1.0 - a.rej_prob) / r);
    a.mean_stop = sum / r;
    if (results.size() > 1) {
        double ss = 0.0;
        for (const auto& t : results) {
            const double dv = static_cast<double>(t.stop_n) - a.mean_stop;
            ss += dv * dv;
        }
        a.se_stop = std::sqrt(ss / (r - 1.0) / r);
    }
    return a;
}

std::vector<TrialResult> run_replications(const TrialConfig& cfg, int replications, int threads) {
    if (replications < 1) throw std::invalid_argument("monte carlo: need at least one replication");
    cfg.validate();
    std::vector<TrialResult> results(static_cast<std::size_t>(replications));
    const int workers = std::clamp(threads, 1, replications);

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto work = [&] {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= replications) return;
            try {
                TrialConfig c = cfg;
                c.seed = cfg.seed + static_cast<std::uint64_t>(r);
                results[static_cast<std::size_t>(r)] = run_trial(c);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next.store(replications);
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

Aggregate run_monte_carlo(const TrialConfig& cfg, int replications, int threads) {
    if (replications < 2) throw std::invalid_argument("monte carlo: need R >= 2");
    const auto results = run_replications(cfg, replications, threads);
    return aggregate(results);
}

}  // namespace seqmon
