#include "seqmon/bootstrap.hpp"

#include "seqmon/checkpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqmon {

namespace {
constexpr int kScalarStream = 2;

double decay_factor(std::int64_t n_k, std::int64_t m) {
    if (n_k < 1) throw std::invalid_argument("bootstrap update: N_k must be >= 1");
    if (m < 0 || m > n_k) throw std::invalid_argument("bootstrap update: stage size exceeds N_k");
    return 1.0 - static_cast<double>(m) / static_cast<double>(n_k);
}
}  // namespace

BootstrapEnsemble::BootstrapEnsemble(int B, int q, std::uint64_t seed, bool with_scalar_path)
    : B_(B), q_(q), normals_(seed), alive_(static_cast<std::size_t>(B), 1), survivors_(B) {
    if (B < 1) throw std::invalid_argument("bootstrap: B must be >= 1");
    if (q < 1) throw std::invalid_argument("bootstrap: q must be >= 1");
    paths_[0] = Eigen::MatrixXd::Zero(q, B);
    paths_[1] = Eigen::MatrixXd::Zero(q, B);
    if (with_scalar_path) scalar_ = Eigen::VectorXd::Zero(B);
}

Eigen::MatrixXd BootstrapEnsemble::draws(std::int64_t stage, int arm) const {
    Eigen::MatrixXd e(q_, B_);
    for (int b = 0; b < B_; ++b) {
        auto s = normals_.stream(static_cast<std::uint64_t>(stage), static_cast<std::uint64_t>(b),
                                 static_cast<std::uint64_t>(arm));
        for (int j = 0; j < q_; ++j) e(j, b) = s.next();
    }
    return e;
}

Eigen::VectorXd BootstrapEnsemble::scalar_draws(std::int64_t stage) const {
    Eigen::VectorXd e(B_);
    for (int b = 0; b < B_; ++b)
        e[b] = normals_.stream(static_cast<std::uint64_t>(stage), static_cast<std::uint64_t>(b), kScalarStream).next();
    return e;
}

void BootstrapEnsemble::stage_update(const Eigen::MatrixXd& block_root0, const Eigen::MatrixXd& block_root1,
                                     std::int64_t n_k, std::int64_t m, std::int64_t stage) {
    const double decay = decay_factor(n_k, m);
    const double inv_n = 1.0 / static_cast<double>(n_k);
    const Eigen::MatrixXd* roots[2] = {&block_root0, &block_root1};
    for (int a = 0; a < 2; ++a) {
        if (roots[a]->rows() != q_ || roots[a]->cols() != q_)
            throw std::invalid_argument("bootstrap update: block shape mismatch");
        paths_[a] *= decay;
        if (roots[a]->isZero(0.0)) continue;
        paths_[a].noalias() += inv_n * (*roots[a]) * draws(stage, a);
    }
}

void BootstrapEnsemble::scalar_stage_update(double phi_hat, std::int64_t n_k, std::int64_t m, std::int64_t stage) {
    if (!has_scalar_path()) throw std::logic_error("bootstrap: ensemble has no scalar path");
    if (!(phi_hat >= 0.0)) throw std::invalid_argument("bootstrap: phi_hat must be >= 0");
    const double decay = decay_factor(n_k, m);
    scalar_ *= decay;
    if (phi_hat > 0.0) scalar_ += (std::sqrt(phi_hat) / static_cast<double>(n_k)) * scalar_draws(stage);
}

BoundaryResult BootstrapEnsemble::solve_boundary(std::span<const double> stats, double spend_now) {
    if (static_cast<int>(stats.size()) != B_) throw std::invalid_argument("solve_boundary: need one statistic per draw");
    if (survivors_ < 1) throw std::logic_error("solve_boundary: survivor set is empty");

    const double spent = static_cast<double>(B_ - survivors_) / B_;
    double p = (spend_now - spent) / (1.0 - spent);
    p = std::clamp(p, 0.0, 1.0);

    BoundaryResult res;
    res.spend_level = p;
    // p*|I| is an integer in exact arithmetic whenever alpha*B is; absorb round-off
    const double target = p * static_cast<double>(survivors_);
    const auto rank = static_cast<std::int64_t>(std::ceil(target - 1e-9));
    if (rank <= 0) {
        res.z = std::numeric_limits<double>::infinity();
        return res;
    }

    std::vector<double> live;
    live.reserve(static_cast<std::size_t>(survivors_));
    for (int b = 0; b < B_; ++b)
        if (alive_[b]) live.push_back(stats[b]);
    const auto k = static_cast<std::size_t>(std::min<std::int64_t>(rank, survivors_));
    // k-th largest
    std::nth_element(live.begin(), live.begin() + static_cast<std::ptrdiff_t>(k - 1), live.end(), std::greater<>());
    res.z = live[k - 1];

    for (int b = 0; b < B_; ++b) {
        if (alive_[b] && stats[b] > res.z) {
            alive_[b] = 0;
            --survivors_;
            ++res.newly_pruned;
        }
    }
    return res;
}

void BootstrapEnsemble::save(CheckpointWriter& w) const {
    w.put_int("boot.B", B_);
    w.put_int("boot.q", q_);
    w.put_u64("boot.seed", normals_.seed());
    w.put_mat("boot.paths0", paths_[0]);
    w.put_mat("boot.paths1", paths_[1]);
    w.put_vec("boot.scalar", {scalar_.data(), static_cast<std::size_t>(scalar_.size())});
    std::vector<double> alive(alive_.begin(), alive_.end());
    w.put_vec("boot.alive", alive);
}

BootstrapEnsemble BootstrapEnsemble::load(CheckpointReader& r) {
    const auto B = r.get_int("boot.B");
    const auto q = r.get_int("boot.q");
    const auto seed = r.get_u64("boot.seed");
    if (B < 1 || q < 1) throw CheckpointError("checkpoint parse error: bad ensemble shape");
    BootstrapEnsemble e(static_cast<int>(B), static_cast<int>(q), seed);
    for (int a = 0; a < 2; ++a) {
        e.paths_[a] = r.get_mat(a == 0 ? "boot.paths0" : "boot.paths1");
        if (e.paths_[a].rows() != q || e.paths_[a].cols() != B)
            throw CheckpointError("checkpoint parse error: ensemble path shape");
    }
    e.scalar_ = r.get_evec("boot.scalar");
    if (e.scalar_.size() != 0 && e.scalar_.size() != B) throw CheckpointError("checkpoint parse error: scalar path");
    const auto alive = r.get_vec("boot.alive");
    if (static_cast<std::int64_t>(alive.size()) != B) throw CheckpointError("checkpoint parse error: survivor set");
    e.survivors_ = 0;
    for (std::size_t b = 0; b < alive.size(); ++b) {
        if (alive[b] != 0.0 && alive[b] != 1.0) throw CheckpointError("checkpoint parse error: survivor flag");
        e.alive_[b] = alive[b] != 0.0;
        e.survivors_ += e.alive_[b];
    }
    return e;
}

}  // namespace seqmon
