#include "seqmon/stream_core.hpp"

#include "seqmon/checkpoint.hpp"
#include "seqmon/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace seqmon {

void validate(const Observation& obs) {
    if (obs.arm != 0 && obs.arm != 1) throw std::invalid_argument("arm must be 0 or 1");
    if (!std::isfinite(obs.y)) throw std::invalid_argument("non-finite reward");
    for (double v : obs.x)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite covariate");
}

FeatureBatch featurize(const BasisSpec& spec, std::span<const Observation> batch) {
    FeatureBatch fb;
    fb.phi.resize(spec.q, static_cast<Eigen::Index>(batch.size()));
    fb.arm.resize(batch.size());
    fb.y.resize(static_cast<Eigen::Index>(batch.size()));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        validate(batch[i]);
        eval_basis_into(spec, batch[i].x, fb.phi.col(static_cast<Eigen::Index>(i)));
        fb.arm[i] = batch[i].arm;
        fb.y[static_cast<Eigen::Index>(i)] = batch[i].y;
    }
    return fb;
}

ArmState::ArmState(int q) : q_(q) {
    if (q < 1) throw std::invalid_argument("ArmState: q must be >= 1");
    for (int a = 0; a < 2; ++a) {
        sigma_hat_[a] = Eigen::MatrixXd::Zero(q, q);
        gamma_hat_[a] = Eigen::VectorXd::Zero(q);
        beta_hat_[a] = Eigen::VectorXd::Zero(q);
        sigma_inv_[a] = Eigen::MatrixXd::Zero(q, q);
        cum_sandwich_[a] = Eigen::MatrixXd::Zero(q, q);
        stage_sandwich_[a] = Eigen::MatrixXd::Zero(q, q);
    }
}

void ArmState::ingest(const Eigen::Ref<const Eigen::VectorXd>& phi, int arm, double y) {
    if (arm != 0 && arm != 1) throw std::invalid_argument("arm must be 0 or 1");
    if (!std::isfinite(y)) throw std::invalid_argument("non-finite reward");
    if (phi.size() != q_) throw std::invalid_argument("feature dimension mismatch");
    if (!phi.allFinite()) throw std::invalid_argument("non-finite features");

    ++n_;
    ++stage_count_;
    ++count_[arm];
    const double w = 1.0 / static_cast<double>(n_);
    for (int a = 0; a < 2; ++a) {
        sigma_hat_[a] *= (1.0 - w);
        gamma_hat_[a] *= (1.0 - w);
    }
    sigma_hat_[arm].noalias() += w * phi * phi.transpose();
    gamma_hat_[arm] += (w * y) * phi;
}

void ArmState::ingest(const BasisSpec& spec, const Observation& obs) {
    validate(obs);
    ingest(eval_basis(spec, obs.x), obs.arm, obs.y);
}

void ArmState::refresh_coefficients() {
    for (int a = 0; a < 2; ++a) {
        // symmetrize against round-off in the rank-one updates
        const Eigen::MatrixXd s = 0.5 * (sigma_hat_[a] + sigma_hat_[a].transpose());
        sigma_inv_[a] = pinv_sym(s);
        beta_hat_[a] = sigma_inv_[a] * gamma_hat_[a];
    }
}

void ArmState::stage_accumulate(const FeatureBatch& batch) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const int a = batch.arm[i];
        const auto phi = batch.phi.col(static_cast<Eigen::Index>(i));
        const double r = batch.y[static_cast<Eigen::Index>(i)] - phi.dot(beta_hat_[a]);
        if (r == 0.0) continue;
        const Eigen::VectorXd u = sigma_inv_[a] * phi;
        stage_sandwich_[a].noalias() += (r * r) * u * u.transpose();
    }
}

void ArmState::stage_accumulate(const BasisSpec& spec, std::span<const Observation> batch) {
    stage_accumulate(featurize(spec, batch));
}

void ArmState::stage_close() {
    for (int a = 0; a < 2; ++a) {
        cum_sandwich_[a] += stage_sandwich_[a];
        stage_sandwich_[a].setZero();
    }
    stage_count_ = 0;
}

double ArmState::variance_at(const Eigen::Ref<const Eigen::VectorXd>& phi) const {
    if (n_ < 1) throw std::logic_error("variance_at: no observations");
    double v = 0.0;
    for (int a = 0; a < 2; ++a) v += phi.dot(cum_sandwich_[a] * phi);
    const double nn = static_cast<double>(n_);
    return std::max(v, 0.0) / (nn * nn);
}

void ArmState::save(CheckpointWriter& w) const {
    w.put_int("arm.q", q_);
    w.put_int("arm.n", n_);
    w.put_int("arm.count0", count_[0]);
    w.put_int("arm.count1", count_[1]);
    w.put_int("arm.stage_count", stage_count_);
    for (int a = 0; a < 2; ++a) {
        const std::string p = "arm" + std::to_string(a) + ".";
        w.put_mat(p + "sigma_hat", sigma_hat_[a]);
        w.put_vec(p + "gamma_hat", {gamma_hat_[a].data(), static_cast<std::size_t>(q_)});
        w.put_vec(p + "beta_hat", {beta_hat_[a].data(), static_cast<std::size_t>(q_)});
        w.put_mat(p + "sigma_inv", sigma_inv_[a]);
        w.put_mat(p + "cum_sandwich", cum_sandwich_[a]);
        w.put_mat(p + "stage_sandwich", stage_sandwich_[a]);
    }
}

ArmState ArmState::load(CheckpointReader& r) {
    const auto q = r.get_int("arm.q");
    if (q < 1 || q > 100000) throw CheckpointError("checkpoint parse error: bad arm.q");
    ArmState s(static_cast<int>(q));
    s.n_ = r.get_int("arm.n");
    s.count_[0] = r.get_int("arm.count0");
    s.count_[1] = r.get_int("arm.count1");
    s.stage_count_ = r.get_int("arm.stage_count");
    if (s.n_ < 0 || s.count_[0] < 0 || s.count_[1] < 0 || s.count_[0] + s.count_[1] != s.n_)
        throw CheckpointError("checkpoint parse error: inconsistent arm counts");
    auto expect_mat = [&](const std::string& key) {
        Eigen::MatrixXd m = r.get_mat(key);
        if (m.rows() != q || m.cols() != q) throw CheckpointError("checkpoint parse error: " + key + " shape");
        return m;
    };
    auto expect_vec = [&](const std::string& key) {
        Eigen::VectorXd v = r.get_evec(key);
        if (v.size() != q) throw CheckpointError("checkpoint parse error: " + key + " length");
        return v;
    };
    for (int a = 0; a < 2; ++a) {
        const std::string p = "arm" + std::to_string(a) + ".";
        s.sigma_hat_[a] = expect_mat(p + "sigma_hat");
        s.gamma_hat_[a] = expect_vec(p + "gamma_hat");
        s.beta_hat_[a] = expect_vec(p + "beta_hat");
        s.sigma_inv_[a] = expect_mat(p + "sigma_inv");
        s.cum_sandwich_[a] = expect_mat(p + "cum_sandwich");
        s.stage_sandwich_[a] = expect_mat(p + "stage_sandwich");
    }
    return s;
}

}  // namespace seqmon
