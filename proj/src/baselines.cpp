#include "seqmon/baselines.hpp"

#include "seqmon/checkpoint.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqmon {

double lil_variance_term(const ArmState& state) {
    if (state.n() < 1) throw std::logic_error("lil: no observations");
    return (state.cum_sandwich(0).trace() + state.cum_sandwich(1).trace()) / static_cast<double>(state.n());
}

double lil_bound_from(double sup_phi_norm, std::int64_t n, double variance_term) {
    if (n < 3) throw std::domain_error("lil bound needs N >= 3");
    const double nn = static_cast<double>(n);
    return sup_phi_norm * std::sqrt(2.0 * std::log(std::log(nn)) / nn) * std::sqrt(std::max(variance_term, 0.0));
}

double lil_bound(const ArmState& state, const BasisSpec& basis, const SupGrid& grid) {
    if (grid.empty()) throw std::invalid_argument("lil bound: empty grid");
    const double sup_norm = grid.features(basis).rowwise().norm().maxCoeff();
    return lil_bound_from(sup_norm, state.n(), lil_variance_term(state));
}

LilMonitor::LilMonitor(const BasisSpec& basis, const MonitorConfig& cfg)
    : basis_(basis), cfg_(cfg), arms_(basis.q), grid_(cfg.grid, basis, cfg.seed) {}

MonitorDecision LilMonitor::interim(std::span<const Observation> batch) {
    if (terminated_) throw std::logic_error("monitor already terminated");
    const FeatureBatch fb = featurize(basis_, batch);
    for (std::size_t i = 0; i < fb.size(); ++i) {
        arms_.ingest(fb.phi.col(static_cast<Eigen::Index>(i)), fb.arm[i], fb.y[static_cast<Eigen::Index>(i)]);
        grid_.observe(clamp_to_support(basis_, batch[i].x));
    }
    if (arms_.n() == 0) throw std::logic_error("interim analysis before any observation");
    ++stage_;
    arms_.refresh_coefficients();
    arms_.stage_accumulate(fb);
    arms_.stage_close();

    MonitorDecision d;
    d.method = Method::Lil;
    d.stage = stage_;
    d.samples_used = arms_.n();
    if (arms_.n() < 3 || arms_.count(0) == 0 || arms_.count(1) == 0) {
        d.warning = true;
        return d;
    }
    const Eigen::MatrixXd& g = grid_.features(basis_);
    const Eigen::VectorXd contrast_on_grid = g * arms_.contrast();
    Eigen::Index best = 0;
    d.statistic = contrast_on_grid.maxCoeff(&best);
    d.argmax_x = grid_.points()[static_cast<std::size_t>(best)];
    d.boundary = lil_bound(arms_, basis_, grid_);
    if (d.statistic > d.boundary) {
        d.verdict = Verdict::Reject;
        terminated_ = true;
    }
    return d;
}

void LilMonitor::save(CheckpointWriter& w) const {
    w.put_int("monitor.stage", stage_);
    w.put_int("monitor.terminated", terminated_ ? 1 : 0);
    arms_.save(w);
    grid_.save(w);
}

void LilMonitor::load(CheckpointReader& r) {
    stage_ = r.get_int("monitor.stage");
    terminated_ = r.get_int("monitor.terminated") != 0;
    arms_ = ArmState::load(r);
    grid_ = SupGrid::load(r);
    if (arms_.q() != basis_.q) throw CheckpointError("checkpoint parse error: monitor shape does not match configuration");
}

void AvtState::add(int arm, double y) {
    if (arm != 0 && arm != 1) throw std::invalid_argument("arm must be 0 or 1");
    ++n[arm];
    const double delta = y - mean[arm];
    mean[arm] += delta / static_cast<double>(n[arm]);
    m2[arm] += delta * (y - mean[arm]);
}

double AvtState::pooled_variance() const {
    const std::int64_t total = n[0] + n[1];
    if (total <= 2) throw std::domain_error("pooled variance needs N > 2");
    return std::max(m2[0] + m2[1], 0.0) / static_cast<double>(total - 2);
}

double avt_log_statistic(const AvtState& s) {
    if (s.n[0] < 2 || s.n[1] < 2) throw std::domain_error("avt statistic needs two observations per arm");
    if (!(s.tau2 > 0.0)) throw std::invalid_argument("avt: tau2 must be > 0");
    const double v = s.pooled_variance() * (1.0 / static_cast<double>(s.n[0]) + 1.0 / static_cast<double>(s.n[1]));
    const double diff = s.difference();
    if (v == 0.0)
        return diff != 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    return 0.5 * std::log(v / (v + s.tau2)) + s.tau2 * diff * diff / (2.0 * v * (v + s.tau2));
}

double avt_statistic(const AvtState& s) { return std::exp(avt_log_statistic(s)); }

AvtMonitor::AvtMonitor(const BasisSpec& basis, const MonitorConfig& cfg) : basis_(basis), cfg_(cfg), arms_(basis.q) {
    avt_.tau2 = cfg.tau2;
}

MonitorDecision AvtMonitor::interim(std::span<const Observation> batch) {
    if (terminated_) throw std::logic_error("monitor already terminated");
    const FeatureBatch fb = featurize(basis_, batch);
    for (std::size_t i = 0; i < fb.size(); ++i) {
        const double y = fb.y[static_cast<Eigen::Index>(i)];
        arms_.ingest(fb.phi.col(static_cast<Eigen::Index>(i)), fb.arm[i], y);
        avt_.add(fb.arm[i], y);
    }
    if (arms_.n() == 0) throw std::logic_error("interim analysis before any observation");
    ++stage_;
    arms_.refresh_coefficients();
    arms_.stage_close();

    MonitorDecision d;
    d.method = Method::Avt;
    d.stage = stage_;
    d.samples_used = arms_.n();
    d.boundary = 1.0 / cfg_.spending.alpha;
    if (avt_.n[0] < 2 || avt_.n[1] < 2) {
        d.warning = true;
        return d;
    }
    const double log_lambda = avt_log_statistic(avt_);
    d.statistic = std::exp(log_lambda);
    const bool favours_treatment = avt_.mean[1] > avt_.mean[0];
    if (favours_treatment && log_lambda >= std::log(d.boundary)) {
        d.verdict = Verdict::Reject;
        terminated_ = true;
    }
    return d;
}

void AvtMonitor::save(CheckpointWriter& w) const {
    w.put_int("monitor.stage", stage_);
    w.put_int("monitor.terminated", terminated_ ? 1 : 0);
    arms_.save(w);
    for (int a = 0; a < 2; ++a) {
        const std::string p = "avt" + std::to_string(a) + ".";
        w.put_int(p + "n", avt_.n[a]);
        w.put(p + "mean", avt_.mean[a]);
        w.put(p + "m2", avt_.m2[a]);
    }
    w.put("avt.tau2", avt_.tau2);
}

void AvtMonitor::load(CheckpointReader& r) {
    stage_ = r.get_int("monitor.stage");
    terminated_ = r.get_int("monitor.terminated") != 0;
    arms_ = ArmState::load(r);
    for (int a = 0; a < 2; ++a) {
        const std::string p = "avt" + std::to_string(a) + ".";
        avt_.n[a] = r.get_int(p + "n");
        avt_.mean[a] = r.get(p + "mean");
        avt_.m2[a] = r.get(p + "m2");
    }
    avt_.tau2 = r.get("avt.tau2");
    if (arms_.q() != basis_.q || avt_.n[0] + avt_.n[1] != arms_.n())
        throw CheckpointError("checkpoint parse error: monitor shape does not match configuration");
}

}  // namespace seqmon
