#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace seqmon {

enum class Verdict { Continue, Reject };

enum class Method { BatQte, BatAte, Lil, Avt };

std::string to_string(Method m);
Method method_from_string(const std::string& s);
std::string to_string(Verdict v);

// Outcome of one interim analysis. Fields that a method does not produce
// (spend target and survivors for LIL/AVT, argmax for ATE/AVT) stay at
// their defaults and are written as empty CSV cells.
struct MonitorDecision {
    Method method = Method::BatQte;
    std::int64_t stage = 0;
    std::int64_t samples_used = 0;
    double statistic = 0.0;
    double boundary = std::numeric_limits<double>::infinity();
    double spend_target = std::numeric_limits<double>::quiet_NaN();
    std::int64_t survivors = -1;
    Verdict verdict = Verdict::Continue;
    bool warning = false;  // degenerate stage: no usable variance, no spending
    std::vector<double> argmax_x;
};

}  // namespace seqmon
