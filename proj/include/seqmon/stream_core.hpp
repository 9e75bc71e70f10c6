#pragma once

#include "seqmon/basis.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace seqmon {

class CheckpointWriter;
class CheckpointReader;

struct Observation {
    std::vector<double> x;
    int arm = 0;
    double y = 0.0;
};

// Throws std::invalid_argument on a non-binary arm or non-finite x / y.
void validate(const Observation& obs);

// Basis features of one batch, evaluated once and shared by every pass.
struct FeatureBatch {
    Eigen::MatrixXd phi;  // q x m, one column per observation
    std::vector<int> arm;
    Eigen::VectorXd y;

    std::size_t size() const { return arm.size(); }
};

FeatureBatch featurize(const BasisSpec& spec, std::span<const Observation> batch);

// Per-arm streaming sufficient statistics. Single writer: ingest a stage,
// refresh, accumulate the stage sandwich, then close the stage.
class ArmState {
public:
    explicit ArmState(int q = 1);

    int q() const { return q_; }
    std::int64_t n() const { return n_; }
    std::int64_t count(int a) const { return count_[a]; }
    std::int64_t stage_count() const { return stage_count_; }

    const Eigen::MatrixXd& sigma_hat(int a) const { return sigma_hat_[a]; }
    const Eigen::VectorXd& gamma_hat(int a) const { return gamma_hat_[a]; }
    const Eigen::VectorXd& beta_hat(int a) const { return beta_hat_[a]; }
    const Eigen::MatrixXd& sigma_inv(int a) const { return sigma_inv_[a]; }
    const Eigen::MatrixXd& cum_sandwich(int a) const { return cum_sandwich_[a]; }
    const Eigen::MatrixXd& stage_sandwich(int a) const { return stage_sandwich_[a]; }

    // beta_hat(1) - beta_hat(0) as of the last refresh.
    Eigen::VectorXd contrast() const { return beta_hat_[1] - beta_hat_[0]; }

    // Running-average update; beta_hat is not refreshed here.
    void ingest(const Eigen::Ref<const Eigen::VectorXd>& phi, int arm, double y);
    void ingest(const BasisSpec& spec, const Observation& obs);

    void refresh_coefficients();

    // Adds sigma_inv * phi phi' r^2 * sigma_inv for each member, with r the
    // residual under the current (refreshed) coefficients.
    void stage_accumulate(const FeatureBatch& batch);
    void stage_accumulate(const BasisSpec& spec, std::span<const Observation> batch);

    void stage_close();

    // N^-2 * sum_a phi' cum_sandwich[a] phi.
    double variance_at(const Eigen::Ref<const Eigen::VectorXd>& phi) const;

    void save(CheckpointWriter& w) const;
    static ArmState load(CheckpointReader& r);

private:
    int q_;
    std::int64_t n_ = 0;
    std::array<std::int64_t, 2> count_{0, 0};
    std::int64_t stage_count_ = 0;
    std::array<Eigen::MatrixXd, 2> sigma_hat_;
    std::array<Eigen::VectorXd, 2> gamma_hat_;
    std::array<Eigen::VectorXd, 2> beta_hat_;
    std::array<Eigen::MatrixXd, 2> sigma_inv_;
    std::array<Eigen::MatrixXd, 2> cum_sandwich_;
    std::array<Eigen::MatrixXd, 2> stage_sandwich_;
};

}  // namespace seqmon
