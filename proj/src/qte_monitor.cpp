#include "seqmon/qte_monitor.hpp"

#include "seqmon/checkpoint.hpp"
#include "seqmon/linalg.hpp"
#include "seqmon/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqmon {

GridScale studentize_grid(const ArmState& state, const Eigen::MatrixXd& grid_features) {
    const Eigen::MatrixXd cum = state.cum_sandwich(0) + state.cum_sandwich(1);
    const double nn = static_cast<double>(state.n());
    // row-wise quadratic forms phi' C phi
    const Eigen::VectorXd quad = ((grid_features * cum).cwiseProduct(grid_features)).rowwise().sum();
    GridScale out;
    for (Eigen::Index g = 0; g < grid_features.rows(); ++g)
        if (quad[g] > 0.0) out.index.push_back(static_cast<std::size_t>(g));
    out.features.resize(static_cast<Eigen::Index>(out.index.size()), grid_features.cols());
    for (std::size_t k = 0; k < out.index.size(); ++k) {
        const auto g = static_cast<Eigen::Index>(out.index[k]);
        const double se = std::sqrt(quad[g]) / nn;
        out.features.row(static_cast<Eigen::Index>(k)) = grid_features.row(g) / se;
    }
    return out;
}

namespace {

SupResult sup_over(const GridScale& scale, const Eigen::VectorXd& contrast) {
    if (scale.index.empty()) throw std::domain_error("degenerate variance");
    const Eigen::VectorXd t = scale.features * contrast;
    SupResult r;
    r.value = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < t.size(); ++k) {
        if (t[k] > r.value) {
            r.value = t[k];
            r.argmax = scale.index[static_cast<std::size_t>(k)];
        }
    }
    return r;
}

}  // namespace

SupResult sup_statistic(const ArmState& state, const Eigen::MatrixXd& grid_features) {
    return sup_over(studentize_grid(state, grid_features), state.contrast());
}

SupResult sup_statistic(const ArmState& state, const BasisSpec& basis, const SupGrid& grid) {
    return sup_statistic(state, grid.features(basis));
}

std::vector<double> bootstrap_sup(const BootstrapEnsemble& ens, const ArmState& state, const GridScale& scale) {
    if (scale.index.empty()) throw std::domain_error("degenerate variance");
    const int B = ens.B();
    const double root_n = std::sqrt(static_cast<double>(state.n()));
    std::vector<double> out(static_cast<std::size_t>(B));
    constexpr int kChunk = 256;
    for (int b0 = 0; b0 < B; b0 += kChunk) {
        const int w = std::min(kChunk, B - b0);
        const Eigen::MatrixXd diff = ens.paths(1).middleCols(b0, w) - ens.paths(0).middleCols(b0, w);
        const Eigen::MatrixXd t = scale.features * diff;
        const Eigen::RowVectorXd best = t.colwise().maxCoeff();
        for (int j = 0; j < w; ++j) out[static_cast<std::size_t>(b0 + j)] = root_n * best[j];
    }
    return out;
}

std::vector<double> bootstrap_sup(const BootstrapEnsemble& ens, const ArmState& state, const BasisSpec& basis,
                                  const SupGrid& grid) {
    return bootstrap_sup(ens, state, studentize_grid(state, grid.features(basis)));
}

QteMonitor::QteMonitor(const BasisSpec& basis, const MonitorConfig& cfg)
    : basis_(basis), cfg_(cfg), arms_(basis.q), ens_(cfg.B, basis.q, cfg.seed), grid_(cfg.grid, basis, cfg.seed) {
    cfg_.validate();
}

MonitorDecision QteMonitor::interim(std::span<const Observation> batch) {
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
    ens_.stage_update(psd_sqrt(arms_.stage_sandwich(0)), psd_sqrt(arms_.stage_sandwich(1)), arms_.n(),
                      arms_.stage_count(), stage_);
    arms_.stage_close();

    MonitorDecision d;
    d.method = Method::BatQte;
    d.stage = stage_;
    d.samples_used = arms_.n();
    d.spend_target = spend_at(cfg_, arms_.n());
    d.survivors = ens_.survivors();

    const GridScale scale = arms_.count(0) > 0 && arms_.count(1) > 0 ? studentize_grid(arms_, grid_.features(basis_))
                                                                      : GridScale{};
    if (scale.index.empty()) {
        // one-sided early stage: nothing is spent, the budget rolls forward
        d.warning = true;
        return d;
    }

    const SupResult obs = sup_over(scale, arms_.contrast());
    d.statistic = std::sqrt(static_cast<double>(arms_.n())) * obs.value;
    d.argmax_x = grid_.points()[obs.argmax];

    const std::vector<double> boot = bootstrap_sup(ens_, arms_, scale);
    const BoundaryResult br = ens_.solve_boundary(boot, d.spend_target);
    d.boundary = br.z;
    d.survivors = ens_.survivors();
    if (d.statistic > d.boundary) {
        d.verdict = Verdict::Reject;
        terminated_ = true;
    }
    return d;
}

void QteMonitor::save(CheckpointWriter& w) const {
    w.put_int("monitor.stage", stage_);
    w.put_int("monitor.terminated", terminated_ ? 1 : 0);
    arms_.save(w);
    ens_.save(w);
    grid_.save(w);
}

void QteMonitor::load(CheckpointReader& r) {
    stage_ = r.get_int("monitor.stage");
    terminated_ = r.get_int("monitor.terminated") != 0;
    arms_ = ArmState::load(r);
    ens_ = BootstrapEnsemble::load(r);
    grid_ = SupGrid::load(r);
    if (arms_.q() != basis_.q || ens_.q() != basis_.q || ens_.B() != cfg_.B)
        throw CheckpointError("checkpoint parse error: monitor shape does not match configuration");
}

namespace {

MonitorConfig negated_side(MonitorConfig cfg) {
    cfg.seed = mix64(cfg.seed, 0x4E454741544956ULL);
    return cfg;
}

}  // namespace

TwoSidedMonitor::TwoSidedMonitor(const BasisSpec& basis, const MonitorConfig& cfg)
    : pos_(basis, cfg), neg_(basis, negated_side(cfg)) {}

TwoSidedDecision TwoSidedMonitor::interim(std::span<const Observation> batch) {
    if (terminated()) throw std::logic_error("monitor already terminated");
    TwoSidedDecision out;
    if (!pos_.terminated()) {
        out.positive = pos_.interim(batch);
        if (out.positive->verdict == Verdict::Reject) pos_stop_ = out.positive->stage;
    }
    if (!neg_.terminated()) {
        std::vector<Observation> flipped(batch.begin(), batch.end());
        for (auto& o : flipped) o.y = -o.y;
        out.negative = neg_.interim(flipped);
        if (out.negative->verdict == Verdict::Reject) neg_stop_ = out.negative->stage;
    }
    out.verdict = (pos_stop_ && neg_stop_) ? Verdict::Reject : Verdict::Continue;
    return out;
}

Verdict two_sided(const QteMonitor& positive, const QteMonitor& negative) {
    if (!positive.terminated() && !negative.terminated() && positive.arms().n() != negative.arms().n())
        throw std::invalid_argument("two_sided: monitors saw different streams");
    return positive.terminated() && negative.terminated() ? Verdict::Reject : Verdict::Continue;
}

}  // namespace seqmon
