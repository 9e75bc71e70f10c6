#pragma once

#include "seqmon/basis.hpp"
#include "seqmon/policies.hpp"
#include "seqmon/sequential_test.hpp"
#include "seqmon/simlab.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace seqmon {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimulationSuite {
    int replications = 200;
    std::vector<Method> methods{Method::BatQte};
    std::vector<PolicyKind> designs{PolicyKind::Random};
    std::vector<Scenario> scenarios{Scenario::S1};
    std::vector<double> deltas{0.0};
    std::vector<std::pair<std::int64_t, int>> schedules{{200, 5}};  // (n, K)
    std::int64_t n_first = 2000;
    double noise_sd = 0.5;
};

struct RunConfig {
    std::uint64_t seed = 1;
    int threads = 1;
    BasisSpec basis;
    MonitorConfig monitor;
    bool n_total_given = false;  // replay needs it; simulate derives it per trial
    Policy policy;
    int policy_refresh = 10;
    std::optional<SimulationSuite> simulation;
    std::string out_aggregate;
    std::string out_trace;
};

// JSON document with sections "basis", "monitor", "policy", "simulation",
// "output" plus top-level "seed" and "threads". Unknown keys are rejected.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

}  // namespace seqmon
