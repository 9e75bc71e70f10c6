#include "seqmon/decision_csv.hpp"

#include "seqmon/checkpoint.hpp"

#include <cmath>

namespace seqmon {

bool reports_argmax(Method m) { return m == Method::BatQte || m == Method::Lil; }

std::string decision_csv_header(Method m, int dim_x) {
    std::string h = "method,stage,n,statistic,boundary,spend_target,survivors,verdict,warning";
    if (reports_argmax(m))
        for (int j = 1; j <= dim_x; ++j) h += ",argmax_" + std::to_string(j);
    return h;
}

namespace {
std::string cell(double v) { return std::isnan(v) ? std::string() : format_real(v); }
}  // namespace

std::string decision_csv_row(const MonitorDecision& d, int dim_x) {
    std::string r = to_string(d.method);
    r += ',' + std::to_string(d.stage);
    r += ',' + std::to_string(d.samples_used);
    r += ',' + cell(d.statistic);
    r += ',' + cell(d.boundary);
    r += ',' + cell(d.spend_target);
    r += ',' + (d.survivors >= 0 ? std::to_string(d.survivors) : std::string());
    r += ',' + to_string(d.verdict);
    r += d.warning ? ",1" : ",0";
    if (reports_argmax(d.method)) {
        for (int j = 0; j < dim_x; ++j) {
            r += ',';
            if (static_cast<std::size_t>(j) < d.argmax_x.size()) r += format_real(d.argmax_x[j]);
        }
    }
    return r;
}

}  // namespace seqmon
