#include "seqmon/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace seqmon {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items())
        if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

BasisSpec parse_basis(const json& j) {
    only_keys(j, "basis", {"kind", "d", "knots", "lo", "hi"});
    const auto kind = get_or<std::string>(j, "kind", "linear", "basis");
    const int d = get_or<int>(j, "d", 3, "basis");
    try {
        if (kind == "linear") return make_linear(d);
        if (kind == "spline") {
            const int m = get_or<int>(j, "knots", 4, "basis");
            const Interval iv{get_or<double>(j, "lo", -2.0, "basis"), get_or<double>(j, "hi", 2.0, "basis")};
            return make_additive_cubic_spline(d, m, iv);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("basis: ") + e.what());
    }
    throw ConfigError("basis.kind: expected 'linear' or 'spline'");
}

GridSpec parse_grid(const json& j) {
    only_keys(j, "monitor.grid", {"source", "size", "resolution"});
    GridSpec g;
    const auto src = get_or<std::string>(j, "source", "reservoir", "monitor.grid");
    if (src == "reservoir")
        g.source = GridSource::ObservedSample;
    else if (src == "fixed")
        g.source = GridSource::FixedGrid;
    else
        throw ConfigError("monitor.grid.source: expected 'reservoir' or 'fixed'");
    g.reservoir = get_or<int>(j, "size", 512, "monitor.grid");
    g.resolution = get_or<int>(j, "resolution", 41, "monitor.grid");
    if (g.reservoir < 1 || g.resolution < 1) throw ConfigError("monitor.grid: sizes must be >= 1");
    return g;
}

MonitorConfig parse_monitor(const json& j) {
    only_keys(j, "monitor", {"method", "B", "alpha", "spending", "spending_param", "grid", "n_total", "tau2"});
    MonitorConfig m;
    try {
        m.method = method_from_string(get_or<std::string>(j, "method", "BAT-QTE", "monitor"));
        m.spending.kind = spending_kind_from_string(get_or<std::string>(j, "spending", "pocock", "monitor"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("monitor: ") + e.what());
    }
    m.B = get_or<int>(j, "B", 2000, "monitor");
    m.spending.alpha = get_or<double>(j, "alpha", 0.05, "monitor");
    m.spending.param = get_or<double>(j, "spending_param", 1.0, "monitor");
    m.spending.horizon = 1.0;
    m.n_total = get_or<std::int64_t>(j, "n_total", 1, "monitor");
    m.tau2 = get_or<double>(j, "tau2", 1.0, "monitor");
    if (j.contains("grid")) m.grid = parse_grid(j.at("grid"));
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("monitor: ") + e.what());
    }
    return m;
}

void parse_policy(const json& j, RunConfig& rc) {
    only_keys(j, "policy", {"kind", "p", "eps0", "burn_in", "refresh_every"});
    const auto kind = get_or<std::string>(j, "kind", "random", "policy");
    if (kind == "random")
        rc.policy.kind = PolicyKind::Random;
    else if (kind == "egreedy")
        rc.policy.kind = PolicyKind::EpsilonGreedy;
    else
        throw ConfigError("policy.kind: expected 'random' or 'egreedy'");
    rc.policy.p = get_or<double>(j, "p", 0.5, "policy");
    rc.policy.eps0 = get_or<double>(j, "eps0", 0.3, "policy");
    rc.policy.burn_in = get_or<std::int64_t>(j, "burn_in", 50, "policy");
    rc.policy_refresh = get_or<int>(j, "refresh_every", 10, "policy");
    if (rc.policy_refresh < 1) throw ConfigError("policy.refresh_every must be >= 1");
    try {
        rc.policy.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("policy: ") + e.what());
    }
}

SimulationSuite parse_simulation(const json& j) {
    only_keys(j, "simulation",
              {"replications", "methods", "designs", "scenarios", "deltas", "schedules", "n_first", "noise_sd"});
    SimulationSuite s;
    const std::string w = "simulation";
    s.replications = get_or<int>(j, "replications", 200, w);
    if (s.replications < 2) throw ConfigError("simulation.replications must be >= 2");
    try {
        if (j.contains("methods")) {
            s.methods.clear();
            for (const auto& m : get_or<std::vector<std::string>>(j, "methods", {}, w))
                s.methods.push_back(method_from_string(m));
        }
        if (j.contains("scenarios")) {
            s.scenarios.clear();
            for (const auto& m : get_or<std::vector<std::string>>(j, "scenarios", {}, w))
                s.scenarios.push_back(scenario_from_string(m));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("simulation: ") + e.what());
    }
    if (j.contains("designs")) {
        s.designs.clear();
        for (const auto& d : get_or<std::vector<std::string>>(j, "designs", {}, w)) {
            if (d == "random")
                s.designs.push_back(PolicyKind::Random);
            else if (d == "egreedy")
                s.designs.push_back(PolicyKind::EpsilonGreedy);
            else
                throw ConfigError("simulation.designs: unknown design '" + d + "'");
        }
    }
    s.deltas = get_or<std::vector<double>>(j, "deltas", s.deltas, w);
    if (j.contains("schedules")) {
        s.schedules.clear();
        for (const auto& nk : get_or<std::vector<std::vector<std::int64_t>>>(j, "schedules", {}, w)) {
            if (nk.size() != 2 || nk[0] < 1 || nk[1] < 1)
                throw ConfigError("simulation.schedules: each entry must be [n, K] with positive values");
            s.schedules.emplace_back(nk[0], static_cast<int>(nk[1]));
        }
    }
    s.n_first = get_or<std::int64_t>(j, "n_first", 2000, w);
    s.noise_sd = get_or<double>(j, "noise_sd", 0.5, w);
    if (s.methods.empty() || s.designs.empty() || s.scenarios.empty() || s.deltas.empty() || s.schedules.empty())
        throw ConfigError("simulation: sweep lists must be nonempty");
    if (s.n_first < 1) throw ConfigError("simulation.n_first must be >= 1");
    for (double d : s.deltas)
        if (!(d >= 0.0)) throw ConfigError("simulation.deltas must be >= 0");
    return s;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    only_keys(j, "config", {"seed", "threads", "basis", "monitor", "policy", "simulation", "output"});
    RunConfig rc;
    rc.seed = get_or<std::uint64_t>(j, "seed", 1, "config");
    rc.threads = get_or<int>(j, "threads", 1, "config");
    if (rc.threads < 1) throw ConfigError("config.threads must be >= 1");
    rc.basis = j.contains("basis") ? parse_basis(j.at("basis")) : make_linear(3);
    rc.monitor = parse_monitor(j.contains("monitor") ? j.at("monitor") : json::object());
    rc.n_total_given = j.contains("monitor") && j.at("monitor").contains("n_total");
    rc.monitor.seed = rc.seed;
    if (j.contains("policy")) parse_policy(j.at("policy"), rc);
    if (j.contains("simulation")) rc.simulation = parse_simulation(j.at("simulation"));
    if (j.contains("output")) {
        only_keys(j.at("output"), "output", {"aggregate", "trace"});
        rc.out_aggregate = get_or<std::string>(j.at("output"), "aggregate", "", "output");
        rc.out_trace = get_or<std::string>(j.at("output"), "trace", "", "output");
    }
    if (rc.monitor.grid.source == GridSource::FixedGrid && rc.basis.support.empty())
        throw ConfigError("monitor.grid: a fixed grid needs a spline basis support");
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

}  // namespace seqmon
