#pragma once

#include "seqmon/basis.hpp"
#include "seqmon/decision.hpp"
#include "seqmon/policies.hpp"
#include "seqmon/sequential_test.hpp"
#include "seqmon/stream_core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace seqmon {

enum class Scenario { S1, S2 };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

// Y*(a) = 1 + (x1 - x2)/2 + a tau(x) + eps, eps ~ N(0, noise_sd^2),
// tau(x) = g((x1 + x2)/sqrt 2) x3^2 with g(u) = delta u^2 / 3 (S1) or
// delta cos(pi u) (S2). Covariates are N(0, {corr^|i-j|}) hard-truncated to
// [-trunc, trunc].
struct Dgp {
    Scenario scenario = Scenario::S1;
    double delta = 0.0;
    double noise_sd = 0.5;
    int d = 3;
    double trunc = 2.0;
    double corr_base = 0.5;

    Eigen::MatrixXd covariance() const;
    double tau(std::span<const double> x) const;
    double q0(std::span<const double> x, int a) const;
    double sigma2(std::span<const double> /*x*/, int /*a*/) const { return noise_sd * noise_sd; }
    // Arm favoured by the true contrast; ties go to arm 0.
    int oracle_arm(std::span<const double> x) const { return tau(x) > 0.0 ? 1 : 0; }
};

// Pre-truncation draw, exposed for moment checks.
std::vector<double> gen_covariates_raw(const Dgp& dgp, std::mt19937_64& rng);
std::vector<double> gen_covariates(const Dgp& dgp, std::mt19937_64& rng);
double gen_outcome(const Dgp& dgp, std::span<const double> x, int a, std::mt19937_64& rng);
// Outcome with a supplied noise value.
double outcome_given_noise(const Dgp& dgp, std::span<const double> x, int a, double eps);

struct TrialConfig {
    Dgp dgp;
    BasisSpec basis;
    MonitorConfig monitor;   // n_total and seed are filled in per trial
    Policy policy;
    int policy_refresh = 10; // greedy snapshot refreshed every this many observations
    std::int64_t n_first = 2000;
    std::int64_t batch_n = 200;  // each later stage holds 2 * batch_n observations
    int stages = 5;
    std::uint64_t seed = 1;
    bool record_trace = false;
    bool record_log = false;

    std::int64_t total_samples() const { return n_first + (stages - 1) * 2 * batch_n; }
    std::int64_t stage_size(int k) const { return k == 1 ? n_first : 2 * batch_n; }
    void validate() const;
};

struct LoggedObservation {
    std::int64_t stage = 0;
    Observation obs;
    double propensity = 0.5;
};

struct TrialResult {
    bool rejected = false;
    std::int64_t stop_n = 0;
    std::int64_t stop_stage = 0;
    std::int64_t greedy_matches = 0;  // assignments equal to the oracle arm
    std::vector<MonitorDecision> trace;
    std::vector<LoggedObservation> log;
};

TrialResult run_trial(const TrialConfig& cfg);

struct Aggregate {
    int replications = 0;
    double rej_prob = 0.0;
    double se_rej = 0.0;
    double mean_stop = 0.0;
    double se_stop = 0.0;
};

Aggregate aggregate(std::span<const TrialResult> results);

// Trial r runs with seed cfg.seed + r. Results are collected by index, so
// the aggregate does not depend on the thread count.
std::vector<TrialResult> run_replications(const TrialConfig& cfg, int replications, int threads);
Aggregate run_monte_carlo(const TrialConfig& cfg, int replications, int threads);

}  // namespace seqmon
