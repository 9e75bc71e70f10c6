#include "seqmon/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"seqmon: sequential monitoring of treatment effects"};
    app.require_subcommand(1);

    seqmon::SimulateOptions sim;
    std::uint64_t sim_seed = 0;
    int sim_threads = 0;
    auto* simulate = app.add_subcommand("simulate", "run a Monte-Carlo suite and write aggregate rows");
    simulate->add_option("--config", sim.config, "JSON run configuration")->required();
    simulate->add_option("--out", sim.out, "aggregate CSV path (default: output.aggregate or stdout)");
    simulate->add_option("--trace", sim.trace, "per-stage trace CSV path");
    auto* sim_threads_opt = simulate->add_option("--threads", sim_threads, "worker threads")->check(CLI::PositiveNumber);
    auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "base seed (overrides config)");

    seqmon::ReplayOptions rep;
    std::uint64_t rep_seed = 0;
    auto* replay = app.add_subcommand("replay", "run the configured monitor over a CSV observation log");
    replay->add_option("--config", rep.config, "JSON run configuration")->required();
    replay->add_option("--log", rep.log, "log CSV: stage,x1..xd,a,y with a header row")->required();
    replay->add_option("--out", rep.out, "decisions CSV path (default stdout)");
    replay->add_option("--checkpoint", rep.checkpoint, "resume from this checkpoint and update it at the end");
    replay->add_option("--save-checkpoint", rep.save_checkpoint, "write the final checkpoint here instead");
    auto* rep_seed_opt = replay->add_option("--seed", rep_seed, "monitor seed (overrides config)");
    int rep_threads = 0;
    replay->add_option("--threads", rep_threads, "accepted for symmetry; replay is sequential");

    seqmon::AssignOptions asg;
    std::uint64_t asg_seed = 0;
    auto* assign = app.add_subcommand("assign", "query the policy stored in a checkpoint");
    assign->add_option("--checkpoint", asg.checkpoint, "checkpoint written by replay")->required();
    assign->add_option("--x", asg.covariates, "comma-separated covariates x1,...,xd")->required();
    assign->add_flag("--deterministic", asg.deterministic, "print the greedy arm without sampling");
    auto* asg_seed_opt = assign->add_option("--seed", asg_seed, "sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : seqmon::kExitConfig;
    }

    if (*simulate) {
        if (*sim_seed_opt) sim.seed = sim_seed;
        if (*sim_threads_opt) sim.threads = sim_threads;
        return seqmon::cmd_simulate(sim, std::cout, std::cerr);
    }
    if (*replay) {
        if (*rep_seed_opt) rep.seed = rep_seed;
        return seqmon::cmd_replay(rep, std::cout, std::cerr);
    }
    if (*asg_seed_opt) asg.seed = asg_seed;
    return seqmon::cmd_assign(asg, std::cout, std::cerr);
}
