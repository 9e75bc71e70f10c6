#include "seqmon/policies.hpp"

#include <stdexcept>

namespace seqmon {

Policy Policy::random(double p) {
    Policy out;
    out.kind = PolicyKind::Random;
    out.p = p;
    out.validate();
    return out;
}

Policy Policy::epsilon_greedy(double eps0, std::int64_t burn_in) {
    Policy out;
    out.kind = PolicyKind::EpsilonGreedy;
    out.eps0 = eps0;
    out.burn_in = burn_in;
    out.validate();
    return out;
}

void Policy::validate() const {
    if (kind == PolicyKind::Random && !(p > 0.0 && p < 1.0)) throw std::invalid_argument("policy: p must lie in (0,1)");
    if (kind == PolicyKind::EpsilonGreedy) {
        if (!(eps0 > 0.0 && eps0 < 1.0)) throw std::invalid_argument("policy: eps0 must lie in (0,1)");
        if (burn_in < 1) throw std::invalid_argument("policy: burn-in must be >= 1");
    }
}

PolicySnapshot PolicySnapshot::from(const ArmState& refreshed) {
    PolicySnapshot s;
    s.contrast = refreshed.contrast();
    s.valid = refreshed.count(0) > 0 && refreshed.count(1) > 0;
    return s;
}

double propensity(const Policy& policy, const Eigen::Ref<const Eigen::VectorXd>& phi_x, const PolicySnapshot& snap,
                  std::int64_t obs_index) {
    if (policy.kind == PolicyKind::Random) return policy.p;
    if (obs_index < policy.burn_in || !snap.valid) return 0.5;
    if (snap.contrast.size() != phi_x.size()) throw std::invalid_argument("propensity: feature dimension mismatch");
    return phi_x.dot(snap.contrast) > 0.0 ? 1.0 - policy.eps0 : policy.eps0;
}

Assignment assign(const Policy& policy, const Eigen::Ref<const Eigen::VectorXd>& phi_x, const PolicySnapshot& snap,
                  std::int64_t obs_index, std::mt19937_64& rng) {
    Assignment out;
    out.propensity = propensity(policy, phi_x, snap, obs_index);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    out.arm = u(rng) < out.propensity ? 1 : 0;
    return out;
}

std::string to_string(PolicyKind k) { return k == PolicyKind::Random ? "random" : "egreedy"; }

}  // namespace seqmon
