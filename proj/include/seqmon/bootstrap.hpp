#pragma once

#include "seqmon/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace seqmon {

class CheckpointWriter;
class CheckpointReader;

struct BoundaryResult {
    double z = 0.0;          // +inf when nothing is spent this stage
    double spend_level = 0;  // p, the conditional upper percentile level
    std::int64_t newly_pruned = 0;
};

// B multiplier-bootstrap coefficient paths per arm (columns of a q x B
// matrix), an optional scalar path, and the survivor set of paths that have
// not yet crossed an earlier boundary.
class BootstrapEnsemble {
public:
    BootstrapEnsemble() = default;
    BootstrapEnsemble(int B, int q, std::uint64_t seed, bool with_scalar_path = false);

    int B() const { return B_; }
    int q() const { return q_; }
    std::uint64_t seed() const { return normals_.seed(); }

    const Eigen::MatrixXd& paths(int arm) const { return paths_[arm]; }
    const Eigen::VectorXd& scalar_path() const { return scalar_; }
    bool has_scalar_path() const { return scalar_.size() > 0; }

    bool alive(int b) const { return alive_[b] != 0; }
    std::int64_t survivors() const { return survivors_; }
    std::int64_t pruned() const { return B_ - survivors_; }

    // q x B matrix of standard normals for (stage, arm); column b is keyed by
    // (seed, stage, b, arm) and does not depend on B or on other columns.
    Eigen::MatrixXd draws(std::int64_t stage, int arm) const;
    // Scalar normals for the covariate-mean term, one per draw.
    Eigen::VectorXd scalar_draws(std::int64_t stage) const;

    // paths[a] <- (1 - m/N_k) paths[a] + N_k^-1 * block_root[a] * e_a.
    // block_root[a] is the PSD square root of the stage sandwich.
    void stage_update(const Eigen::MatrixXd& block_root0, const Eigen::MatrixXd& block_root1, std::int64_t n_k,
                      std::int64_t m, std::int64_t stage);

    // scalar <- (1 - m/N_k) scalar + N_k^-1 * sqrt(phi_hat) * e2.
    void scalar_stage_update(double phi_hat, std::int64_t n_k, std::int64_t m, std::int64_t stage);

    // stats has one entry per draw (length B); entries of pruned draws are
    // ignored. Sets z to the ceil(p*|I|)-th largest surviving statistic with
    // p = (spend_now - |I^c|/B) / (1 - |I^c|/B) clipped to [0,1], then drops
    // every surviving draw whose statistic exceeds z.
    BoundaryResult solve_boundary(std::span<const double> stats, double spend_now);

    void save(CheckpointWriter& w) const;
    static BootstrapEnsemble load(CheckpointReader& r);

private:
    int B_ = 0;
    int q_ = 0;
    CounterNormal normals_{0};
    Eigen::MatrixXd paths_[2];
    Eigen::VectorXd scalar_;
    std::vector<char> alive_;
    std::int64_t survivors_ = 0;
};

}  // namespace seqmon
