#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace seqmon {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

enum class BasisKind { Linear, AdditiveCubicSpline };

// Deterministic covariate-to-feature map. Immutable once built; build it
// through make_linear / make_additive_cubic_spline.
struct BasisSpec {
    BasisKind kind = BasisKind::Linear;
    int dim_x = 0;
    int q = 1;
    int internal_knots = 0;                    // spline kind only
    std::vector<Interval> support;             // empty for Linear (unbounded)
    std::vector<std::vector<double>> knots;    // interior knots per dimension
    std::vector<std::vector<double>> knot_vectors;  // clamped: 4x lo, interior, 4x hi

    // Functions per dimension block before the first one is dropped.
    int full_block_size() const { return internal_knots + 4; }
};

// Covariates may overshoot the support by this much and get clamped.
inline constexpr double kSupportClampTol = 1e-9;

BasisSpec make_linear(int d);

// Interior knots are equally spaced strictly inside each support interval:
// lo + j (hi - lo) / (m + 1), j = 1..m.
BasisSpec make_additive_cubic_spline(int d, int internal_knots, std::span<const Interval> support);
BasisSpec make_additive_cubic_spline(int d, int internal_knots, Interval support_per_dim);

Eigen::VectorXd eval_basis(const BasisSpec& spec, std::span<const double> x);
void eval_basis_into(const BasisSpec& spec, std::span<const double> x, Eigen::Ref<Eigen::VectorXd> out);

// All m+4 cubic B-spline values of one coordinate block, nothing dropped.
Eigen::VectorXd eval_spline_block(const BasisSpec& spec, int dim, double x);

// Throws std::domain_error when a coordinate lies outside support by more
// than kSupportClampTol; otherwise returns the clamped vector.
std::vector<double> clamp_to_support(const BasisSpec& spec, std::span<const double> x);

bool same_basis(const BasisSpec& a, const BasisSpec& b);

}  // namespace seqmon
