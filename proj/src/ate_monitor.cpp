#include "seqmon/ate_monitor.hpp"

#include "seqmon/checkpoint.hpp"
#include "seqmon/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace seqmon {

void AteState::ingest(const Eigen::Ref<const Eigen::VectorXd>& phi, int arm, double y) {
    arms.ingest(phi, arm, y);
    const double n = static_cast<double>(arms.n());
    phi_bar = ((n - 1.0) / n) * phi_bar + phi / n;
}

void AteState::accumulate_phi_hat(const FeatureBatch& batch) {
    const Eigen::VectorXd c = arms.contrast();
    const double centre = phi_bar.dot(c);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double dev = batch.phi.col(static_cast<Eigen::Index>(i)).dot(c) - centre;
        phi_hat += dev * dev;
    }
}

void AteState::close_stage() {
    arms.stage_close();
    cum_phi_hat += phi_hat;
    phi_hat = 0.0;
}

double ate_statistic(const AteState& state) { return state.phi_bar.dot(state.arms.contrast()); }

void ate_bootstrap_stage_update(BootstrapEnsemble& ens, const AteState& state, std::int64_t n_k, std::int64_t m,
                                std::int64_t stage) {
    ens.stage_update(psd_sqrt(state.arms.stage_sandwich(0)), psd_sqrt(state.arms.stage_sandwich(1)), n_k, m, stage);
    ens.scalar_stage_update(state.phi_hat, n_k, m, stage);
}

std::vector<double> ate_bootstrap_stats(const BootstrapEnsemble& ens, const AteState& state) {
    const Eigen::RowVectorXd proj = state.phi_bar.transpose() * (ens.paths(1) - ens.paths(0));
    std::vector<double> out(static_cast<std::size_t>(ens.B()));
    for (int b = 0; b < ens.B(); ++b) out[static_cast<std::size_t>(b)] = proj[b] + ens.scalar_path()[b];
    return out;
}

double ate_bootstrap_variance(const AteState& state) {
    const double n = static_cast<double>(state.arms.n());
    double v = state.cum_phi_hat;
    for (int a = 0; a < 2; ++a) v += state.phi_bar.dot(state.arms.cum_sandwich(a) * state.phi_bar);
    return v / (n * n);
}

AteMonitor::AteMonitor(const BasisSpec& basis, const MonitorConfig& cfg)
    : basis_(basis), cfg_(cfg), state_(basis.q), ens_(cfg.B, basis.q, cfg.seed, true) {
    cfg_.validate();
}

MonitorDecision AteMonitor::interim(std::span<const Observation> batch) {
    if (terminated_) throw std::logic_error("monitor already terminated");
    const FeatureBatch fb = featurize(basis_, batch);
    for (std::size_t i = 0; i < fb.size(); ++i)
        state_.ingest(fb.phi.col(static_cast<Eigen::Index>(i)), fb.arm[i], fb.y[static_cast<Eigen::Index>(i)]);
    if (state_.arms.n() == 0) throw std::logic_error("interim analysis before any observation");
    ++stage_;

    state_.arms.refresh_coefficients();
    state_.accumulate_phi_hat(fb);
    state_.arms.stage_accumulate(fb);
    ate_bootstrap_stage_update(ens_, state_, state_.arms.n(), state_.arms.stage_count(), stage_);
    state_.close_stage();

    MonitorDecision d;
    d.method = Method::BatAte;
    d.stage = stage_;
    d.samples_used = state_.arms.n();
    d.spend_target = spend_at(cfg_, state_.arms.n());
    d.survivors = ens_.survivors();
    if (state_.arms.count(0) == 0 || state_.arms.count(1) == 0) {
        d.warning = true;
        return d;
    }
    d.statistic = ate_statistic(state_);
    const BoundaryResult br = ens_.solve_boundary(ate_bootstrap_stats(ens_, state_), d.spend_target);
    d.boundary = br.z;
    d.survivors = ens_.survivors();
    if (d.statistic > d.boundary) {
        d.verdict = Verdict::Reject;
        terminated_ = true;
    }
    return d;
}

void AteMonitor::save(CheckpointWriter& w) const {
    w.put_int("monitor.stage", stage_);
    w.put_int("monitor.terminated", terminated_ ? 1 : 0);
    state_.arms.save(w);
    w.put_vec("ate.phi_bar", {state_.phi_bar.data(), static_cast<std::size_t>(state_.phi_bar.size())});
    w.put("ate.phi_hat", state_.phi_hat);
    w.put("ate.cum_phi_hat", state_.cum_phi_hat);
    ens_.save(w);
}

void AteMonitor::load(CheckpointReader& r) {
    stage_ = r.get_int("monitor.stage");
    terminated_ = r.get_int("monitor.terminated") != 0;
    state_.arms = ArmState::load(r);
    state_.phi_bar = r.get_evec("ate.phi_bar");
    state_.phi_hat = r.get("ate.phi_hat");
    state_.cum_phi_hat = r.get("ate.cum_phi_hat");
    ens_ = BootstrapEnsemble::load(r);
    if (state_.arms.q() != basis_.q || state_.phi_bar.size() != basis_.q || ens_.q() != basis_.q ||
        ens_.B() != cfg_.B || !ens_.has_scalar_path())
        throw CheckpointError("checkpoint parse error: monitor shape does not match configuration");
}

}  // namespace seqmon
