#pragma once

#include "seqmon/bootstrap.hpp"
#include "seqmon/grid.hpp"
#include "seqmon/sequential_test.hpp"
#include "seqmon/stream_core.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace seqmon {

// Studentizing denominators over a grid: se(x) = sqrt(variance_at(phi(x))).
struct GridScale {
    Eigen::MatrixXd features;        // usable grid rows (se > 0), scaled by 1/se
    std::vector<std::size_t> index;  // original grid index of each usable row
};

GridScale studentize_grid(const ArmState& state, const Eigen::MatrixXd& grid_features);

struct SupResult {
    double value = 0.0;       // sup_x phi'(x) (beta1 - beta0) / se(x)
    std::size_t argmax = 0;   // grid index, first index on ties
};

// Throws std::domain_error("degenerate variance") if no grid point has se > 0.
SupResult sup_statistic(const ArmState& state, const BasisSpec& basis, const SupGrid& grid);
SupResult sup_statistic(const ArmState& state, const Eigen::MatrixXd& grid_features);

// Per-draw studentized supremum times sqrt(N), one entry per draw (pruned
// draws included). Uses the same denominators as sup_statistic.
std::vector<double> bootstrap_sup(const BootstrapEnsemble& ens, const ArmState& state, const GridScale& scale);
std::vector<double> bootstrap_sup(const BootstrapEnsemble& ens, const ArmState& state, const BasisSpec& basis,
                                  const SupGrid& grid);

// One-sided sequential test that some covariate region has a positive
// treatment contrast: studentized supremum statistic against a
// multiplier-bootstrap boundary under alpha spending.
class QteMonitor final : public SequentialTest {
public:
    QteMonitor(const BasisSpec& basis, const MonitorConfig& cfg);

    MonitorDecision interim(std::span<const Observation> batch) override;

    Method method() const override { return Method::BatQte; }
    bool terminated() const override { return terminated_; }
    std::int64_t stage() const override { return stage_; }
    const ArmState& arms() const override { return arms_; }
    const BootstrapEnsemble& ensemble() const { return ens_; }
    const SupGrid& grid() const { return grid_; }

    void save(CheckpointWriter& w) const override;
    void load(CheckpointReader& r) override;

private:
    BasisSpec basis_;
    MonitorConfig cfg_;
    ArmState arms_;
    BootstrapEnsemble ens_;
    SupGrid grid_;
    std::int64_t stage_ = 0;
    bool terminated_ = false;
};

struct TwoSidedDecision {
    std::optional<MonitorDecision> positive;  // empty once that side has stopped
    std::optional<MonitorDecision> negative;
    Verdict verdict = Verdict::Continue;
};

// Union-intersection two-sided test: the positive side monitors the raw
// stream, the negative side the stream with rewards negated. The two-sided
// null is rejected once both sides have rejected.
class TwoSidedMonitor {
public:
    TwoSidedMonitor(const BasisSpec& basis, const MonitorConfig& cfg);

    TwoSidedDecision interim(std::span<const Observation> batch);

    const QteMonitor& positive() const { return pos_; }
    const QteMonitor& negative() const { return neg_; }
    std::optional<std::int64_t> positive_stop() const { return pos_stop_; }
    std::optional<std::int64_t> negative_stop() const { return neg_stop_; }
    bool terminated() const { return pos_.terminated() && neg_.terminated(); }

private:
    QteMonitor pos_;
    QteMonitor neg_;
    std::optional<std::int64_t> pos_stop_;
    std::optional<std::int64_t> neg_stop_;
};

// Joint verdict of two one-sided monitors. Still-active sides must have seen
// the same number of samples; throws std::invalid_argument otherwise.
Verdict two_sided(const QteMonitor& positive, const QteMonitor& negative);

}  // namespace seqmon
