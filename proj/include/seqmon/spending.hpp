#pragma once

#include <string>

namespace seqmon {

enum class SpendingKind { Pocock, OBrienFleming, Power, Exponential };

// alpha(t) on [0, horizon]; alpha(0) = 0, alpha(horizon) = alpha.
struct SpendingFunction {
    SpendingKind kind = SpendingKind::Pocock;
    double alpha = 0.05;
    double horizon = 1.0;
    double param = 1.0;  // theta for Power, gamma for Exponential

    // Checks alpha in (0,1), horizon > 0, theta > 0, gamma != 0.
    void validate() const;
};

double alpha_spend(const SpendingFunction& f, double t);

double normal_cdf(double z);
double normal_quantile(double p);

std::string to_string(SpendingKind k);
SpendingKind spending_kind_from_string(const std::string& s);

}  // namespace seqmon
