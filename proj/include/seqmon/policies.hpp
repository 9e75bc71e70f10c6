#pragma once

#include "seqmon/stream_core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>

namespace seqmon {

enum class PolicyKind { Random, EpsilonGreedy };

struct Policy {
    PolicyKind kind = PolicyKind::Random;
    double p = 0.5;          // Random: Pr(A = 1)
    double eps0 = 0.3;       // EpsilonGreedy exploration probability
    std::int64_t burn_in = 50;  // N0

    static Policy random(double p = 0.5);
    static Policy epsilon_greedy(double eps0, std::int64_t burn_in = 50);

    void validate() const;
};

// Coefficient contrast seen by the greedy policy. Invalid until both arms
// have at least one observation.
struct PolicySnapshot {
    Eigen::VectorXd contrast;
    bool valid = false;

    static PolicySnapshot from(const ArmState& refreshed);
};

// Pr(A = 1 | x). obs_index is the 1-based index j of the observation being
// assigned; for j < burn_in or with an invalid snapshot the greedy policy
// returns 0.5. A zero contrast counts as "arm 0 is greedy".
double propensity(const Policy& policy, const Eigen::Ref<const Eigen::VectorXd>& phi_x, const PolicySnapshot& snap,
                  std::int64_t obs_index);

struct Assignment {
    int arm = 0;
    double propensity = 0.5;
};

Assignment assign(const Policy& policy, const Eigen::Ref<const Eigen::VectorXd>& phi_x, const PolicySnapshot& snap,
                  std::int64_t obs_index, std::mt19937_64& rng);

std::string to_string(PolicyKind k);

}  // namespace seqmon
