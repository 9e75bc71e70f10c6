#pragma once

#include "seqmon/bootstrap.hpp"
#include "seqmon/sequential_test.hpp"
#include "seqmon/stream_core.hpp"

#include <Eigen/Dense>

#include <vector>

namespace seqmon {

// ArmState plus the running covariate-feature mean and the per-stage
// covariate-mean variability accumulator.
struct AteState {
    ArmState arms;
    Eigen::VectorXd phi_bar;
    double phi_hat = 0.0;      // open stage: sum [(phi_i - phi_bar)' (beta1 - beta0)]^2
    double cum_phi_hat = 0.0;  // sum of closed-stage phi_hat values

    explicit AteState(int q = 1) : arms(q), phi_bar(Eigen::VectorXd::Zero(q)) {}

    void ingest(const Eigen::Ref<const Eigen::VectorXd>& phi, int arm, double y);
    // Call after refresh_coefficients.
    void accumulate_phi_hat(const FeatureBatch& batch);
    void close_stage();
};

// phi_bar' (beta1 - beta0).
double ate_statistic(const AteState& state);

// Contrast paths as in the QTE bootstrap, plus the scalar covariate-mean
// term N_k^-1 sqrt(phi_hat) e2 carried on the ensemble's scalar path.
void ate_bootstrap_stage_update(BootstrapEnsemble& ens, const AteState& state, std::int64_t n_k, std::int64_t m,
                                std::int64_t stage);

// phi_bar' (beta1_b - beta0_b) + scalar_b for every draw.
std::vector<double> ate_bootstrap_stats(const BootstrapEnsemble& ens, const AteState& state);

// Conditional variance of the bootstrap statistic given the data:
// N^-2 [ sum_a phi_bar' cum_sandwich[a] phi_bar + sum_stages phi_hat ].
double ate_bootstrap_variance(const AteState& state);

class AteMonitor final : public SequentialTest {
public:
    AteMonitor(const BasisSpec& basis, const MonitorConfig& cfg);

    MonitorDecision interim(std::span<const Observation> batch) override;

    Method method() const override { return Method::BatAte; }
    bool terminated() const override { return terminated_; }
    std::int64_t stage() const override { return stage_; }
    const ArmState& arms() const override { return state_.arms; }
    const AteState& state() const { return state_; }
    const BootstrapEnsemble& ensemble() const { return ens_; }

    void save(CheckpointWriter& w) const override;
    void load(CheckpointReader& r) override;

private:
    BasisSpec basis_;
    MonitorConfig cfg_;
    AteState state_;
    BootstrapEnsemble ens_;
    std::int64_t stage_ = 0;
    bool terminated_ = false;
};

}  // namespace seqmon
