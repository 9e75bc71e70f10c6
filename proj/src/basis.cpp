#include "seqmon/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace seqmon {

namespace {

constexpr int kDegree = 3;

// Full clamped knot vector: lo repeated degree+1 times, interior, hi repeated.
std::vector<double> clamped_knot_vector(const Interval& iv, const std::vector<double>& interior) {
    std::vector<double> t;
    t.reserve(interior.size() + 2 * (kDegree + 1));
    t.insert(t.end(), kDegree + 1, iv.lo);
    t.insert(t.end(), interior.begin(), interior.end());
    t.insert(t.end(), kDegree + 1, iv.hi);
    return t;
}

// Cox-de Boor recursion in triangular form. Writes the degree+1 nonzero
// basis values into out[span-degree .. span].
void cox_de_boor(const std::vector<double>& t, int n_basis, double x, double* out) {
    // locate span with t[span] <= x < t[span+1]; right endpoint maps to last span
    int span = n_basis - 1;
    if (x < t[n_basis]) {
        auto it = std::upper_bound(t.begin() + kDegree, t.begin() + n_basis + 1, x);
        span = static_cast<int>(it - t.begin()) - 1;
    }

    double left[kDegree + 1];
    double right[kDegree + 1];
    double N[kDegree + 1];
    N[0] = 1.0;
    for (int j = 1; j <= kDegree; ++j) {
        left[j] = x - t[span + 1 - j];
        right[j] = t[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[r + 1] + left[j - r];
            const double temp = denom == 0.0 ? 0.0 : N[r] / denom;
            N[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        N[j] = saved;
    }
    for (int j = 0; j <= kDegree; ++j) out[span - kDegree + j] = N[j];
}

}  // namespace

BasisSpec make_linear(int d) {
    if (d < 0) throw std::invalid_argument("make_linear: d must be >= 0");
    BasisSpec spec;
    spec.kind = BasisKind::Linear;
    spec.dim_x = d;
    spec.q = d + 1;
    return spec;
}

BasisSpec make_additive_cubic_spline(int d, int internal_knots, std::span<const Interval> support) {
    if (d < 1) throw std::invalid_argument("spline basis: d must be >= 1");
    if (internal_knots < 1) throw std::invalid_argument("spline basis: need at least one internal knot");
    if (static_cast<int>(support.size()) != d)
        throw std::invalid_argument("spline basis: support must list one interval per dimension");

    BasisSpec spec;
    spec.kind = BasisKind::AdditiveCubicSpline;
    spec.dim_x = d;
    spec.internal_knots = internal_knots;
    spec.q = 1 + d * (internal_knots + 3);
    for (const Interval& iv : support) {
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi))
            throw std::invalid_argument("spline basis: degenerate support interval");
        std::vector<double> k(internal_knots);
        const double step = (iv.hi - iv.lo) / (internal_knots + 1);
        for (int j = 0; j < internal_knots; ++j) k[j] = iv.lo + (j + 1) * step;
        spec.support.push_back(iv);
        spec.knot_vectors.push_back(clamped_knot_vector(iv, k));
        spec.knots.push_back(std::move(k));
    }
    return spec;
}

BasisSpec make_additive_cubic_spline(int d, int internal_knots, Interval support_per_dim) {
    std::vector<Interval> sup(d > 0 ? d : 0, support_per_dim);
    return make_additive_cubic_spline(d, internal_knots, sup);
}

std::vector<double> clamp_to_support(const BasisSpec& spec, std::span<const double> x) {
    if (static_cast<int>(x.size()) != spec.dim_x)
        throw std::invalid_argument("covariate arity " + std::to_string(x.size()) + " does not match basis d=" +
                                    std::to_string(spec.dim_x));
    std::vector<double> out(x.begin(), x.end());
    for (std::size_t j = 0; j < out.size(); ++j) {
        if (!std::isfinite(out[j])) throw std::domain_error("non-finite covariate");
        if (spec.support.empty()) continue;
        const Interval& iv = spec.support[j];
        if (out[j] < iv.lo - kSupportClampTol || out[j] > iv.hi + kSupportClampTol)
            throw std::domain_error("covariate " + std::to_string(j + 1) + " outside basis support");
        out[j] = std::clamp(out[j], iv.lo, iv.hi);
    }
    return out;
}

Eigen::VectorXd eval_spline_block(const BasisSpec& spec, int dim, double x) {
    if (spec.kind != BasisKind::AdditiveCubicSpline) throw std::logic_error("eval_spline_block: not a spline basis");
    const Interval& iv = spec.support.at(dim);
    if (x < iv.lo - kSupportClampTol || x > iv.hi + kSupportClampTol)
        throw std::domain_error("covariate outside basis support");
    x = std::clamp(x, iv.lo, iv.hi);
    const int n_basis = spec.full_block_size();
    Eigen::VectorXd block = Eigen::VectorXd::Zero(n_basis);
    cox_de_boor(spec.knot_vectors[dim], n_basis, x, block.data());
    return block;
}

void eval_basis_into(const BasisSpec& spec, std::span<const double> x, Eigen::Ref<Eigen::VectorXd> out) {
    const auto xc = clamp_to_support(spec, x);
    if (out.size() != spec.q) throw std::invalid_argument("eval_basis_into: output size mismatch");
    out[0] = 1.0;
    if (spec.kind == BasisKind::Linear) {
        for (int j = 0; j < spec.dim_x; ++j) out[j + 1] = xc[j];
        return;
    }
    const int n_basis = spec.full_block_size();
    double block[64];
    std::vector<double> heap;
    double* buf = block;
    if (n_basis > 64) {
        heap.resize(n_basis);
        buf = heap.data();
    }
    for (int j = 0; j < spec.dim_x; ++j) {
        std::fill(buf, buf + n_basis, 0.0);
        cox_de_boor(spec.knot_vectors[j], n_basis, xc[j], buf);
        // first function of each block dropped: the intercept carries it
        const int offset = 1 + j * (n_basis - 1);
        for (int k = 1; k < n_basis; ++k) out[offset + k - 1] = buf[k];
    }
}

Eigen::VectorXd eval_basis(const BasisSpec& spec, std::span<const double> x) {
    Eigen::VectorXd out(spec.q);
    eval_basis_into(spec, x, out);
    return out;
}

bool same_basis(const BasisSpec& a, const BasisSpec& b) {
    if (a.kind != b.kind || a.dim_x != b.dim_x || a.q != b.q || a.internal_knots != b.internal_knots) return false;
    if (a.support.size() != b.support.size()) return false;
    for (std::size_t j = 0; j < a.support.size(); ++j)
        if (a.support[j].lo != b.support[j].lo || a.support[j].hi != b.support[j].hi) return false;
    return true;
}

}  // namespace seqmon
