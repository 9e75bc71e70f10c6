#pragma once

#include "seqmon/basis.hpp"
#include "seqmon/policies.hpp"
#include "seqmon/sequential_test.hpp"

#include <iosfwd>
#include <memory>

namespace seqmon {

// Everything a checkpoint file carries: the configuration needed to rebuild
// the monitor and policy, followed by the monitor's own state.
struct Session {
    BasisSpec basis;
    MonitorConfig monitor;
    Policy policy;
    std::unique_ptr<SequentialTest> test;

    static Session fresh(const BasisSpec& basis, const MonitorConfig& monitor, const Policy& policy);
};

inline constexpr const char* kCheckpointMagic = "seqmon-checkpoint";

void save_session(const Session& s, std::ostream& os);
// Throws CheckpointError on any malformed or inconsistent content.
Session load_session(std::istream& is);

}  // namespace seqmon
