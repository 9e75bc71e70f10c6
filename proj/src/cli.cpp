#include "seqmon/cli.hpp"

#include "seqmon/checkpoint.hpp"
#include "seqmon/config.hpp"
#include "seqmon/decision_csv.hpp"
#include "seqmon/rng.hpp"
#include "seqmon/session.hpp"
#include "seqmon/simlab.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace seqmon {

namespace {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest text that reads back to the same double.
std::string short_real(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    for (auto& c : out) {
        const auto b = c.find_first_not_of(" \t\r");
        const auto e = c.find_last_not_of(" \t\r");
        c = b == std::string::npos ? std::string() : c.substr(b, e - b + 1);
    }
    return out;
}

std::int64_t parse_int(const std::string& s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
    return v;
}

double parse_finite(const std::string& s) {
    const double v = parse_real(s);
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value '" + s + "'");
    return v;
}

// Output sink: a file when a path is given, otherwise the fallback stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::out | std::ios::trunc);
            if (!file_) throw IoError("cannot open '" + path + "' for writing");
            os_ = &file_;
        }
    }
    std::ostream& stream() { return *os_; }
    void finish(const std::string& path) {
        os_->flush();
        if (!*os_) throw IoError("write failed for '" + (path.empty() ? std::string("<stdout>") : path) + "'");
    }

private:
    std::ofstream file_;
    std::ostream* os_;
};

Policy design_policy(PolicyKind kind, const Policy& base) {
    Policy p = base;
    p.kind = kind;
    return p;
}

}  // namespace

int resolve_threads(std::optional<int> flag, int config_threads) {
    if (flag) return std::max(1, *flag);
    if (const char* env = std::getenv("SEQMON_THREADS")) {
        try {
            const auto v = parse_int(env);
            if (v >= 1) return static_cast<int>(v);
        } catch (const std::invalid_argument&) {
        }
    }
    return std::max(1, config_threads);
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    RunConfig rc;
    try {
        rc = load_run_config(opt.config);
        if (!rc.simulation) throw ConfigError("config has no 'simulation' section");
    } catch (const ConfigError& e) {
        err << "seqmon simulate: " << e.what() << "\n";
        return kExitConfig;
    }
    if (opt.seed) rc.seed = *opt.seed;
    const int threads = resolve_threads(opt.threads, rc.threads);
    const auto& suite = *rc.simulation;
    const std::string agg_path = opt.out.empty() ? rc.out_aggregate : opt.out;
    const std::string trace_path = opt.trace.empty() ? rc.out_trace : opt.trace;

    try {
        Sink agg(agg_path, out);
        std::optional<Sink> trace;
        if (!trace_path.empty()) {
            trace.emplace(trace_path, out);
            trace->stream() << "method,design,scenario,n,K,delta,replication,stage,samples,statistic,boundary,"
                               "spend_target,survivors,verdict,warning\n";
        }
        agg.stream() << "method,design,scenario,n,K,delta,rej_prob,se,mean_stop,se_stop\n";

        for (Method method : suite.methods)
            for (PolicyKind design : suite.designs)
                for (Scenario scen : suite.scenarios)
                    for (const auto& [n, K] : suite.schedules)
                        for (double delta : suite.deltas) {
                            TrialConfig tc;
                            tc.dgp.scenario = scen;
                            tc.dgp.delta = delta;
                            tc.dgp.noise_sd = suite.noise_sd;
                            tc.dgp.d = rc.basis.dim_x;
                            tc.basis = rc.basis;
                            tc.monitor = rc.monitor;
                            tc.monitor.method = method;
                            tc.policy = design_policy(design, rc.policy);
                            tc.policy_refresh = rc.policy_refresh;
                            tc.n_first = suite.n_first;
                            tc.batch_n = n;
                            tc.stages = K;
                            tc.seed = rc.seed;
                            tc.record_trace = trace.has_value();
                            try {
                                tc.validate();
                            } catch (const std::invalid_argument& e) {
                                err << "seqmon simulate: " << e.what() << "\n";
                                return kExitConfig;
                            }
                            const auto results = run_replications(tc, suite.replications, threads);
                            const auto a = aggregate(results);
                            const std::string cell = to_string(method) + "," + to_string(design) + "," +
                                                     to_string(scen) + "," + std::to_string(n) + "," +
                                                     std::to_string(K) + "," + short_real(delta);
                            agg.stream() << cell << "," << format_real(a.rej_prob) << "," << format_real(a.se_rej)
                                         << "," << format_real(a.mean_stop) << "," << format_real(a.se_stop)
                                         << "\n";
                            if (trace) {
                                for (std::size_t r = 0; r < results.size(); ++r)
                                    for (const auto& d : results[r].trace) {
                                        auto& ts = trace->stream();
                                        ts << cell << "," << r << "," << d.stage << "," << d.samples_used << ","
                                           << format_real(d.statistic) << "," << format_real(d.boundary) << ",";
                                        if (!std::isnan(d.spend_target)) ts << format_real(d.spend_target);
                                        ts << ",";
                                        if (d.survivors >= 0) ts << d.survivors;
                                        ts << "," << to_string(d.verdict) << "," << (d.warning ? 1 : 0) << "\n";
                                    }
                            }
                        }
        agg.finish(agg_path);
        if (trace) trace->finish(trace_path);
    } catch (const IoError& e) {
        err << "seqmon simulate: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

namespace {

struct LogRow {
    std::int64_t stage;
    Observation obs;
};

std::vector<LogRow> read_log(const std::string& path, const BasisSpec& basis) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read log file '" + path + "'");
    const std::size_t cols = static_cast<std::size_t>(basis.dim_x) + 3;
    std::vector<LogRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    std::int64_t last_stage = std::numeric_limits<std::int64_t>::min();
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv(line);
        const auto where = "line " + std::to_string(line_no) + ": ";
        if (cells.size() != cols)
            throw DataError(where + "expected " + std::to_string(cols) + " columns, found " +
                            std::to_string(cells.size()));
        if (!header) {
            header = true;
            continue;
        }
        LogRow row;
        try {
            row.stage = parse_int(cells[0]);
            row.obs.x.resize(basis.dim_x);
            for (int i = 0; i < basis.dim_x; ++i) row.obs.x[i] = parse_finite(cells[1 + i]);
            const auto arm = parse_int(cells[cols - 2]);
            if (arm != 0 && arm != 1) throw std::invalid_argument("arm must be 0 or 1, got " + cells[cols - 2]);
            row.obs.arm = static_cast<int>(arm);
            row.obs.y = parse_finite(cells[cols - 1]);
            if (!basis.support.empty()) row.obs.x = clamp_to_support(basis, row.obs.x);
        } catch (const std::exception& e) {
            throw DataError(where + e.what());
        }
        if (row.stage < last_stage)
            throw DataError(where + "stage " + std::to_string(row.stage) + " follows stage " +
                            std::to_string(last_stage));
        last_stage = row.stage;
        rows.push_back(std::move(row));
    }
    if (in.bad()) throw IoError("read failed for '" + path + "'");
    if (!header) throw DataError("line 1: missing header row");
    return rows;
}

}  // namespace

int cmd_replay(const ReplayOptions& opt, std::ostream& out, std::ostream& err) {
    RunConfig rc;
    try {
        rc = load_run_config(opt.config);
        if (!rc.n_total_given && opt.checkpoint.empty())
            throw ConfigError("monitor.n_total is required for replay (planned total sample size)");
    } catch (const ConfigError& e) {
        err << "seqmon replay: " << e.what() << "\n";
        return kExitConfig;
    }
    if (opt.seed) rc.seed = *opt.seed;
    rc.monitor.seed = rc.seed;

    Session session;
    if (!opt.checkpoint.empty()) {
        std::ifstream cin(opt.checkpoint);
        if (!cin) {
            err << "seqmon replay: cannot read checkpoint '" << opt.checkpoint << "'\n";
            return kExitIo;
        }
        try {
            session = load_session(cin);
        } catch (const CheckpointError& e) {
            err << "seqmon replay: " << e.what() << "\n";
            return kExitCheckpoint;
        }
        if (session.monitor.method != rc.monitor.method || !same_basis(session.basis, rc.basis)) {
            err << "seqmon replay: checkpoint does not match the configured method and basis\n";
            return kExitCheckpoint;
        }
    } else {
        session = Session::fresh(rc.basis, rc.monitor, rc.policy);
    }

    std::vector<LogRow> rows;
    try {
        rows = read_log(opt.log, session.basis);
    } catch (const IoError& e) {
        err << "seqmon replay: " << e.what() << "\n";
        return kExitIo;
    } catch (const DataError& e) {
        err << "seqmon replay: " << opt.log << ": " << e.what() << "\n";
        return kExitData;
    }

    const int d = session.basis.dim_x;
    try {
        Sink sink(opt.out, out);
        auto& os = sink.stream();
        os << decision_csv_header(session.monitor.method, d) << "\n";
        std::vector<Observation> batch;
        std::size_t i = 0;
        while (i < rows.size()) {
            const auto stage = rows[i].stage;
            batch.clear();
            while (i < rows.size() && rows[i].stage == stage) batch.push_back(rows[i++].obs);
            if (session.test->terminated()) {
                err << "seqmon replay: monitor already rejected; ignoring rows from log stage " << stage
                    << " on\n";
                break;
            }
            MonitorDecision dec;
            try {
                dec = session.test->interim(batch);
            } catch (const std::invalid_argument& e) {
                err << "seqmon replay: log stage " << stage << ": " << e.what() << "\n";
                return kExitData;
            }
            os << decision_csv_row(dec, d) << "\n";
        }
        sink.finish(opt.out);

        const std::string ck = opt.save_checkpoint.empty() ? opt.checkpoint : opt.save_checkpoint;
        if (!ck.empty()) {
            std::ostringstream buf;
            save_session(session, buf);
            std::ofstream f(ck, std::ios::out | std::ios::trunc);
            if (!f) throw IoError("cannot open checkpoint '" + ck + "' for writing");
            f << buf.str();
            f.flush();
            if (!f) throw IoError("write failed for checkpoint '" + ck + "'");
        }
    } catch (const IoError& e) {
        err << "seqmon replay: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

int cmd_assign(const AssignOptions& opt, std::ostream& out, std::ostream& err) {
    std::ifstream cin(opt.checkpoint);
    if (!cin) {
        err << "seqmon assign: cannot read checkpoint '" << opt.checkpoint << "'\n";
        return kExitIo;
    }
    Session session;
    try {
        session = load_session(cin);
    } catch (const CheckpointError& e) {
        err << "seqmon assign: " << e.what() << "\n";
        return kExitCheckpoint;
    }

    std::vector<double> x;
    try {
        for (const auto& c : split_csv(opt.covariates)) x.push_back(parse_finite(c));
    } catch (const std::invalid_argument& e) {
        err << "seqmon assign: covariates: " << e.what() << "\n";
        return kExitConfig;
    }
    if (x.size() != static_cast<std::size_t>(session.basis.dim_x)) {
        err << "seqmon assign: expected " << session.basis.dim_x << " covariates, got " << x.size() << "\n";
        return kExitConfig;
    }
    try {
        if (!session.basis.support.empty()) x = clamp_to_support(session.basis, x);
    } catch (const std::domain_error& e) {
        err << "seqmon assign: covariates: " << e.what() << "\n";
        return kExitConfig;
    }

    const auto& arms = session.test->arms();
    const Eigen::VectorXd phi = eval_basis(session.basis, x);
    const auto snap = PolicySnapshot::from(arms);
    const std::int64_t next = arms.n() + 1;

    int arm = 0;
    double p1 = propensity(session.policy, phi, snap, next);
    if (opt.deterministic) {
        arm = p1 > 0.5 ? 1 : 0;
    } else {
        std::mt19937_64 rng(mix64(opt.seed.value_or(session.monitor.seed), static_cast<std::uint64_t>(next)));
        arm = assign(session.policy, phi, snap, next, rng).arm;
    }
    const double p_arm = arm == 1 ? p1 : 1.0 - p1;
    out << "arm=" << arm << " propensity=" << short_real(p_arm) << "\n";
    return kExitOk;
}

}  // namespace seqmon
