#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace seqmon {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitIo = 3, kExitData = 4, kExitCheckpoint = 5 };

struct SimulateOptions {
    std::string config;
    std::string out;    // aggregate CSV; overrides output.aggregate, stdout when both empty
    std::string trace;  // per-stage CSV; overrides output.trace
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
};

struct ReplayOptions {
    std::string config;
    std::string log;
    std::string out;              // decisions CSV, stdout when empty
    std::string checkpoint;       // resume from this file when set
    std::string save_checkpoint;  // final state; defaults to `checkpoint`
    std::optional<std::uint64_t> seed;
};

struct AssignOptions {
    std::string checkpoint;
    std::string covariates;  // comma-separated x1..xd
    bool deterministic = false;
    std::optional<std::uint64_t> seed;
};

// Precedence: flag, then SEQMON_THREADS, then the config value.
int resolve_threads(std::optional<int> flag, int config_threads);

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_replay(const ReplayOptions& opt, std::ostream& out, std::ostream& err);
int cmd_assign(const AssignOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace seqmon
