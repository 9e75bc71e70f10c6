#pragma once

#include "seqmon/decision.hpp"

#include <string>

namespace seqmon {

// Columns: method,stage,n,statistic,boundary,spend_target,survivors,verdict,
// warning and, for methods that report an argmax (BAT-QTE, LIL), argmax_1..d.
bool reports_argmax(Method m);
std::string decision_csv_header(Method m, int dim_x);
std::string decision_csv_row(const MonitorDecision& d, int dim_x);

}  // namespace seqmon
