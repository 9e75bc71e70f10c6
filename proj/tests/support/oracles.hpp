#pragma once

// Reference implementations used as test oracles. They are written
// directly from the textbook definitions and share no code with the
// library beyond plain data types.

#include "seqmon/stream_core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

// Recursive Cox-de Boor definition of B_{i,k} (order k, degree k-1). The
// right end of the knot vector is closed so the last function equals 1 there.
inline double bspline(const std::vector<double>& t, int i, int k, double x) {
    if (k == 1) {
        const double a = t[i], b = t[i + 1];
        if (a == b) return 0.0;
        if (x >= a && x < b) return 1.0;
        // closed right end: x == last knot belongs to the last nonempty span
        if (x == t.back() && b == t.back()) return 1.0;
        return 0.0;
    }
    double left = 0.0, right = 0.0;
    const double d1 = t[i + k - 1] - t[i];
    const double d2 = t[i + k] - t[i + 1];
    if (d1 > 0.0) left = (x - t[i]) / d1 * bspline(t, i, k - 1, x);
    if (d2 > 0.0) right = (t[i + k] - x) / d2 * bspline(t, i + 1, k - 1, x);
    return left + right;
}

inline std::vector<double> clamped_knots(double lo, double hi, int m) {
    std::vector<double> t(4, lo);
    for (int j = 1; j <= m; ++j) t.push_back(lo + j * (hi - lo) / (m + 1));
    for (int j = 0; j < 4; ++j) t.push_back(hi);
    return t;
}

// Intercept followed by, for each coordinate, the cubic B-splines 2..m+4
// (the first function of each block is dropped).
inline Eigen::VectorXd additive_spline(const std::vector<double>& x, int m, double lo, double hi) {
    const int d = static_cast<int>(x.size());
    const auto t = clamped_knots(lo, hi, m);
    Eigen::VectorXd out(1 + d * (m + 3));
    out[0] = 1.0;
    int k = 1;
    for (int j = 0; j < d; ++j)
        for (int i = 1; i < m + 4; ++i) out[k++] = bspline(t, i, 4, x[j]);
    return out;
}

struct BatchFit {
    Eigen::MatrixXd sigma[2];
    Eigen::VectorXd gamma[2];
    Eigen::VectorXd beta[2];
};

// Offline fit on the first n records: Sigma_a = n^-1 sum 1(A=a) phi phi',
// gamma_a likewise, beta_a the minimum-norm least-squares solution.
inline BatchFit batch_fit(const std::vector<Eigen::VectorXd>& phi, const std::vector<int>& arm,
                          const std::vector<double>& y, std::size_t n) {
    const auto q = phi.front().size();
    BatchFit f;
    for (int a = 0; a < 2; ++a) {
        f.sigma[a] = Eigen::MatrixXd::Zero(q, q);
        f.gamma[a] = Eigen::VectorXd::Zero(q);
    }
    for (std::size_t i = 0; i < n; ++i) {
        f.sigma[arm[i]] += phi[i] * phi[i].transpose();
        f.gamma[arm[i]] += phi[i] * y[i];
    }
    for (int a = 0; a < 2; ++a) {
        f.sigma[a] /= static_cast<double>(n);
        f.gamma[a] /= static_cast<double>(n);
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(f.sigma[a]);
        cod.setThreshold(1e-10);
        f.beta[a] = cod.solve(f.gamma[a]);
    }
    return f;
}

// Pseudoinverse via SVD, independent of the library's eigen-based routine.
inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cut = 1e-10 * std::max(s.size() ? s[0] : 0.0, 1e-300);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > cut) inv[i] = 1.0 / s[i];
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

// Stage-wise sandwich accumulation recomputed from scratch: every stage uses
// the coefficients fitted on all data up to its end.
inline void offline_sandwich(const std::vector<Eigen::VectorXd>& phi, const std::vector<int>& arm,
                             const std::vector<double>& y, const std::vector<std::size_t>& stage_ends,
                             Eigen::MatrixXd cum[2]) {
    const auto q = phi.front().size();
    cum[0] = cum[1] = Eigen::MatrixXd::Zero(q, q);
    std::size_t start = 0;
    for (std::size_t end : stage_ends) {
        const BatchFit f = batch_fit(phi, arm, y, end);
        Eigen::MatrixXd inv[2] = {pinv(f.sigma[0]), pinv(f.sigma[1])};
        for (std::size_t i = start; i < end; ++i) {
            const int a = arm[i];
            const double r = y[i] - phi[i].dot(f.beta[a]);
            cum[a] += inv[a] * phi[i] * phi[i].transpose() * inv[a] * (r * r);
        }
        start = end;
    }
}

// k-th largest value (1-based) of v.
inline double kth_largest(std::vector<double> v, std::size_t k) {
    std::sort(v.begin(), v.end(), std::greater<>());
    return v[k - 1];
}

inline double relative_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    const double scale = std::max(want.norm(), 1e-300);
    return (got - want).norm() / scale;
}

// Random observation stream with a linear-plus-noise truth; arms are drawn
// with probability p1 of arm 1.
inline std::vector<seqmon::Observation> random_stream(std::mt19937_64& rng, std::size_t n, int d, double p1 = 0.5,
                                                      double effect = 0.3) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::bernoulli_distribution coin(p1);
    std::vector<seqmon::Observation> out(n);
    for (auto& o : out) {
        o.x.resize(static_cast<std::size_t>(d));
        for (auto& v : o.x) v = u(rng);
        o.arm = coin(rng) ? 1 : 0;
        o.y = 1.0 + 0.5 * o.x[0] + o.arm * effect * o.x[d - 1] + (0.5 + 0.25 * std::abs(o.x[0])) * z(rng);
    }
    return out;
}

}  // namespace oracle
