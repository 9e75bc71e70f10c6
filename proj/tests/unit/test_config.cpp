#include "seqmon/config.hpp"

#include <doctest.h>

using namespace seqmon;

TEST_CASE("full configuration parses") {
    const auto rc = parse_run_config(R"({
        "seed": 42, "threads": 3,
        "basis": {"kind": "spline", "d": 3, "knots": 4, "lo": -2, "hi": 2},
        "monitor": {"method": "BAT-ATE", "B": 1000, "alpha": 0.1, "spending": "obf",
                    "grid": {"source": "fixed", "resolution": 11}, "n_total": 1800},
        "policy": {"kind": "egreedy", "eps0": 0.2, "burn_in": 25, "refresh_every": 5},
        "simulation": {"replications": 50, "methods": ["BAT-ATE", "AVT"], "designs": ["random", "egreedy"],
                       "scenarios": ["S1", "S2"], "deltas": [0, 0.3], "schedules": [[100, 5], [10, 50]],
                       "n_first": 1000, "noise_sd": 1.0},
        "output": {"aggregate": "agg.csv", "trace": "trace.csv"}
    })");
    CHECK(rc.seed == 42);
    CHECK(rc.threads == 3);
    CHECK(rc.basis.q == 22);
    CHECK(rc.monitor.method == Method::BatAte);
    CHECK(rc.monitor.seed == 42);
    CHECK(rc.monitor.B == 1000);
    CHECK(rc.monitor.spending.kind == SpendingKind::OBrienFleming);
    CHECK(rc.monitor.grid.source == GridSource::FixedGrid);
    CHECK(rc.monitor.grid.resolution == 11);
    CHECK(rc.n_total_given);
    CHECK(rc.policy.kind == PolicyKind::EpsilonGreedy);
    CHECK(rc.policy.burn_in == 25);
    CHECK(rc.policy_refresh == 5);
    REQUIRE(rc.simulation.has_value());
    CHECK(rc.simulation->methods.size() == 2);
    CHECK(rc.simulation->schedules[1] == std::pair<std::int64_t, int>{10, 50});
    CHECK(rc.simulation->noise_sd == 1.0);
    CHECK(rc.out_trace == "trace.csv");
}

TEST_CASE("defaults") {
    const auto rc = parse_run_config("{}");
    CHECK(rc.basis.kind == BasisKind::Linear);
    CHECK(rc.basis.dim_x == 3);
    CHECK(rc.monitor.method == Method::BatQte);
    CHECK(rc.monitor.B == 2000);
    CHECK_FALSE(rc.n_total_given);
    CHECK_FALSE(rc.simulation.has_value());
}

TEST_CASE("invalid documents") {
    const char* bad[] = {
        "not json",
        R"({"sed": 1})",
        R"({"basis": {"kind": "wavelet"}})",
        R"({"basis": {"kind": "spline", "knots": 0}})",
        R"({"monitor": {"B": 0}})",
        R"({"monitor": {"method": "t-test"}})",
        R"({"monitor": {"B": "many"}})",
        R"({"monitor": {"grid": {"source": "fixed"}}})",
        R"({"policy": {"kind": "ucb"}})",
        R"({"simulation": {"replications": 1}})",
        R"({"simulation": {"schedules": [[100]]}})",
        R"({"simulation": {"deltas": []}})",
        R"({"output": {"plots": "x"}})",
        R"({"threads": 0})",
    };
    for (const char* text : bad) {
        INFO(text);
        CHECK_THROWS_AS(parse_run_config(text), ConfigError);
    }
}

TEST_CASE("missing file names the path") {
    try {
        load_run_config("/nonexistent/seqmon.json");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/seqmon.json") != std::string::npos);
    }
}
