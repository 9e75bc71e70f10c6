#include "seqmon/spending.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace seqmon {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Acklam's rational approximation refined by one Halley step against erfc.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -INFINITY;
        if (p == 1.0) return INFINITY;
        throw std::domain_error("normal_quantile: p outside [0,1]");
    }
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p <= 1 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        const double q = std::sqrt(-2 * std::log(1 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
    return x - u / (1 + x * u / 2);
}

void SpendingFunction::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("spending: alpha must lie in (0,1)");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("spending: horizon must be > 0");
    if (kind == SpendingKind::Power && !(param > 0.0)) throw std::invalid_argument("spending: theta must be > 0");
    if (kind == SpendingKind::Exponential && (param == 0.0 || !std::isfinite(param)))
        throw std::invalid_argument("spending: gamma must be nonzero");
}

double alpha_spend(const SpendingFunction& f, double t) {
    f.validate();
    if (!(t >= 0.0 && t <= f.horizon)) throw std::domain_error("alpha_spend: t outside [0, T]");
    const double frac = t / f.horizon;
    switch (f.kind) {
        case SpendingKind::Pocock:
            return f.alpha * std::log(1.0 + (std::numbers::e - 1.0) * frac);
        case SpendingKind::OBrienFleming: {
            if (t == 0.0) return 0.0;
            const double z = normal_quantile(1.0 - f.alpha / 2.0);
            // 2 - 2 Phi(u) written as 2 Phi(-u) to avoid cancellation
            return 2.0 * normal_cdf(-z / std::sqrt(frac));
        }
        case SpendingKind::Power:
            return f.alpha * std::pow(frac, f.param);
        case SpendingKind::Exponential:
            return f.alpha * std::expm1(-f.param * frac) / std::expm1(-f.param);
    }
    throw std::logic_error("alpha_spend: unknown kind");
}

std::string to_string(SpendingKind k) {
    switch (k) {
        case SpendingKind::Pocock: return "pocock";
        case SpendingKind::OBrienFleming: return "obf";
        case SpendingKind::Power: return "power";
        case SpendingKind::Exponential: return "exponential";
    }
    return "?";
}

SpendingKind spending_kind_from_string(const std::string& s) {
    if (s == "pocock") return SpendingKind::Pocock;
    if (s == "obf") return SpendingKind::OBrienFleming;
    if (s == "power") return SpendingKind::Power;
    if (s == "exponential") return SpendingKind::Exponential;
    throw std::invalid_argument("unknown spending function '" + s + "'");
}

}  // namespace seqmon
