#include "seqmon/session.hpp"

#include "seqmon/checkpoint.hpp"

#include <stdexcept>

namespace seqmon {

Session Session::fresh(const BasisSpec& basis, const MonitorConfig& monitor, const Policy& policy) {
    Session s;
    s.basis = basis;
    s.monitor = monitor;
    s.policy = policy;
    s.test = make_sequential_test(basis, monitor);
    return s;
}

void save_session(const Session& s, std::ostream& os) {
    CheckpointWriter w(os);
    w.put_str("format", kCheckpointMagic);
    w.put_int("version", kCheckpointVersion);

    w.put_str("basis.kind", s.basis.kind == BasisKind::Linear ? "linear" : "spline");
    w.put_int("basis.d", s.basis.dim_x);
    w.put_int("basis.knots", s.basis.internal_knots);
    std::vector<double> bounds;
    for (const auto& iv : s.basis.support) {
        bounds.push_back(iv.lo);
        bounds.push_back(iv.hi);
    }
    w.put_vec("basis.support", bounds);

    w.put_str("policy.kind", to_string(s.policy.kind));
    w.put("policy.p", s.policy.p);
    w.put("policy.eps0", s.policy.eps0);
    w.put_int("policy.burn_in", s.policy.burn_in);

    const auto& m = s.monitor;
    w.put_str("monitor.method", to_string(m.method));
    w.put_int("monitor.B", m.B);
    w.put_str("monitor.spending", to_string(m.spending.kind));
    w.put("monitor.alpha", m.spending.alpha);
    w.put("monitor.spending_param", m.spending.param);
    w.put_str("monitor.grid_source", to_string(m.grid.source));
    w.put_int("monitor.grid_resolution", m.grid.resolution);
    w.put_int("monitor.grid_size", m.grid.reservoir);
    w.put_int("monitor.n_total", m.n_total);
    w.put_u64("monitor.seed", m.seed);
    w.put("monitor.tau2", m.tau2);

    s.test->save(w);
    w.put_str("end", "ok");
}

Session load_session(std::istream& is) {
    CheckpointReader r(is);
    if (r.get_str("format") != kCheckpointMagic) throw CheckpointError("checkpoint parse error: not a seqmon checkpoint");
    if (r.get_int("version") != kCheckpointVersion)
        throw CheckpointError("checkpoint parse error: unsupported checkpoint version");

    Session s;
    try {
        const auto kind = r.get_str("basis.kind");
        const auto d = static_cast<int>(r.get_int("basis.d"));
        const auto knots = static_cast<int>(r.get_int("basis.knots"));
        const auto bounds = r.get_vec("basis.support");
        if (kind == "linear") {
            s.basis = make_linear(d);
        } else if (kind == "spline") {
            if (bounds.size() != 2 * static_cast<std::size_t>(d))
                throw CheckpointError("checkpoint parse error: basis support arity");
            std::vector<Interval> support;
            for (int i = 0; i < d; ++i) support.push_back({bounds[2 * i], bounds[2 * i + 1]});
            s.basis = make_additive_cubic_spline(d, knots, support);
        } else {
            throw CheckpointError("checkpoint parse error: unknown basis kind '" + kind + "'");
        }

        const auto pkind = r.get_str("policy.kind");
        if (pkind == "random")
            s.policy.kind = PolicyKind::Random;
        else if (pkind == "egreedy")
            s.policy.kind = PolicyKind::EpsilonGreedy;
        else
            throw CheckpointError("checkpoint parse error: unknown policy kind '" + pkind + "'");
        s.policy.p = r.get("policy.p");
        s.policy.eps0 = r.get("policy.eps0");
        s.policy.burn_in = r.get_int("policy.burn_in");
        s.policy.validate();

        auto& m = s.monitor;
        m.method = method_from_string(r.get_str("monitor.method"));
        m.B = static_cast<int>(r.get_int("monitor.B"));
        m.spending.kind = spending_kind_from_string(r.get_str("monitor.spending"));
        m.spending.alpha = r.get("monitor.alpha");
        m.spending.param = r.get("monitor.spending_param");
        const auto src = r.get_str("monitor.grid_source");
        if (src == "fixed")
            m.grid.source = GridSource::FixedGrid;
        else if (src == "reservoir")
            m.grid.source = GridSource::ObservedSample;
        else
            throw CheckpointError("checkpoint parse error: unknown grid source '" + src + "'");
        m.grid.resolution = static_cast<int>(r.get_int("monitor.grid_resolution"));
        m.grid.reservoir = static_cast<int>(r.get_int("monitor.grid_size"));
        m.n_total = r.get_int("monitor.n_total");
        m.seed = r.get_u64("monitor.seed");
        m.tau2 = r.get("monitor.tau2");
        m.validate();

        s.test = make_sequential_test(s.basis, m);
        s.test->load(r);
        if (r.get_str("end") != "ok" || !r.at_end())
            throw CheckpointError("checkpoint parse error: trailing content");
    } catch (const CheckpointError&) {
        throw;
    } catch (const std::exception& e) {
        throw CheckpointError(std::string("checkpoint parse error: ") + e.what());
    }
    return s;
}

}  // namespace seqmon
