#include "seqmon/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqmon {

Eigen::MatrixXd pinv_sym(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("pinv_sym: matrix not square");
    if (m.size() == 0) return m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("pinv_sym: eigendecomposition failed");
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double cutoff = kPinvRelCutoff * std::max(lam.maxCoeff(), 1e-300);
    Eigen::VectorXd inv(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) inv[i] = lam[i] > cutoff ? 1.0 / lam[i] : 0.0;
    const Eigen::MatrixXd& v = es.eigenvectors();
    return v * inv.asDiagonal() * v.transpose();
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("psd_sqrt: matrix not square");
    if (m.size() == 0) return m;
    const double fro = m.norm();
    if (fro == 0.0) return Eigen::MatrixXd::Zero(m.rows(), m.cols());
    if ((m - m.transpose()).norm() > 1e-8 * fro) throw std::domain_error("psd_sqrt: matrix not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("psd_sqrt: eigendecomposition failed");
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double spectral = lam.cwiseAbs().maxCoeff();
    if (lam.minCoeff() < -1e-10 * spectral) throw std::domain_error("psd_sqrt: matrix is indefinite");
    const Eigen::VectorXd root = lam.cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd& v = es.eigenvectors();
    Eigen::MatrixXd r = v * root.asDiagonal() * v.transpose();
    // exact symmetry
    return 0.5 * (r + r.transpose());
}

}  // namespace seqmon
