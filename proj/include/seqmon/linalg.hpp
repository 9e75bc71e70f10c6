#pragma once

#include <Eigen/Dense>

namespace seqmon {

// Relative eigenvalue cutoff for the pseudoinverse: eigenvalues at or below
// kPinvRelCutoff * max(lambda_max, 1e-300) are treated as zero.
inline constexpr double kPinvRelCutoff = 1e-10;

// Moore-Penrose pseudoinverse of a symmetric matrix via eigendecomposition.
Eigen::MatrixXd pinv_sym(const Eigen::MatrixXd& m);

// Symmetric PSD square root R with R*R = M. Eigenvalues down to
// -1e-10 * ||M||_2 are clipped to zero; anything more negative, or an
// asymmetry above 1e-8 relative Frobenius, throws std::domain_error.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

}  // namespace seqmon
