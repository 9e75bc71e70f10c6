#pragma once

#include "seqmon/grid.hpp"
#include "seqmon/sequential_test.hpp"
#include "seqmon/stream_core.hpp"

#include <array>
#include <cstdint>

namespace seqmon {

// ---- law-of-iterated-logarithm boundary --------------------------------

// N^-1 sum_i || 1(A_i=1) S1^-1 phi_i r_i1 - 1(A_i=0) S0^-1 phi_i r_i0 ||^2,
// which is the trace of the accumulated sandwiches over N.
double lil_variance_term(const ArmState& state);

// sup_phi_norm * sqrt(2 log log N / N) * sqrt(variance_term). Throws
// std::domain_error for N < 3.
double lil_bound_from(double sup_phi_norm, std::int64_t n, double variance_term);

double lil_bound(const ArmState& state, const BasisSpec& basis, const SupGrid& grid);

// Rejects when the unnormalized supremum sup_x phi'(x)(beta1 - beta0)
// exceeds the LIL bound.
class LilMonitor final : public SequentialTest {
public:
    LilMonitor(const BasisSpec& basis, const MonitorConfig& cfg);

    MonitorDecision interim(std::span<const Observation> batch) override;

    Method method() const override { return Method::Lil; }
    bool terminated() const override { return terminated_; }
    std::int64_t stage() const override { return stage_; }
    const ArmState& arms() const override { return arms_; }

    void save(CheckpointWriter& w) const override;
    void load(CheckpointReader& r) override;

private:
    BasisSpec basis_;
    MonitorConfig cfg_;
    ArmState arms_;
    SupGrid grid_;
    std::int64_t stage_ = 0;
    bool terminated_ = false;
};

// ---- always-valid mixture SPRT -----------------------------------------

struct AvtState {
    std::array<std::int64_t, 2> n{0, 0};
    std::array<double, 2> mean{0.0, 0.0};
    std::array<double, 2> m2{0.0, 0.0};  // Welford sums of squared deviations
    double tau2 = 1.0;

    void add(int arm, double y);
    // {(n0-1) s0^2 + (n1-1) s1^2} / (N-2)
    double pooled_variance() const;
    // ybar0 - ybar1
    double difference() const { return mean[0] - mean[1]; }
};

// log of the mixture likelihood ratio
//   sqrt(v/(v+tau2)) exp(tau2 D^2 / (2 v (v+tau2))),  v = s^2 (1/n0 + 1/n1).
// Requires n0 >= 2 and n1 >= 2. Zero variance gives +inf for D != 0 and
// -inf (ratio 0) for D == 0.
double avt_log_statistic(const AvtState& s);
double avt_statistic(const AvtState& s);

// Rejects when the ratio reaches 1/alpha and the treatment mean is larger.
class AvtMonitor final : public SequentialTest {
public:
    AvtMonitor(const BasisSpec& basis, const MonitorConfig& cfg);

    MonitorDecision interim(std::span<const Observation> batch) override;

    Method method() const override { return Method::Avt; }
    bool terminated() const override { return terminated_; }
    std::int64_t stage() const override { return stage_; }
    const ArmState& arms() const override { return arms_; }
    const AvtState& avt() const { return avt_; }

    void save(CheckpointWriter& w) const override;
    void load(CheckpointReader& r) override;

private:
    BasisSpec basis_;
    MonitorConfig cfg_;
    ArmState arms_;
    AvtState avt_;
    std::int64_t stage_ = 0;
    bool terminated_ = false;
};

}  // namespace seqmon
