#include "seqmon/checkpoint.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace seqmon {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_real(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty real");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw std::invalid_argument("bad real '" + s + "'");
    if (errno == ERANGE && std::isinf(v)) throw std::invalid_argument("real out of range '" + s + "'");
    return v;
}

void CheckpointWriter::put(std::string_view key, double v) { os_ << key << ' ' << format_real(v) << '\n'; }

void CheckpointWriter::put_int(std::string_view key, std::int64_t v) { os_ << key << ' ' << v << '\n'; }

void CheckpointWriter::put_u64(std::string_view key, std::uint64_t v) { os_ << key << ' ' << v << '\n'; }

void CheckpointWriter::put_str(std::string_view key, std::string_view v) { os_ << key << ' ' << v << '\n'; }

void CheckpointWriter::put_vec(std::string_view key, std::span<const double> v) {
    os_ << key << ' ' << v.size();
    for (double x : v) os_ << ' ' << format_real(x);
    os_ << '\n';
}

void CheckpointWriter::put_mat(std::string_view key, const Eigen::MatrixXd& m) {
    os_ << key << ' ' << m.rows() << ' ' << m.cols();
    // column-major, matching Eigen storage
    for (Eigen::Index i = 0; i < m.size(); ++i) os_ << ' ' << format_real(m.data()[i]);
    os_ << '\n';
}

CheckpointReader::CheckpointReader(std::istream& is) {
    std::string line;
    std::size_t no = 0;
    while (std::getline(is, line)) {
        ++no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::vector<std::string> toks;
        std::string t;
        while (ss >> t) toks.push_back(std::move(t));
        if (toks.empty()) continue;
        lines_.push_back(std::move(toks));
        line_no_.push_back(no);
    }
}

std::string_view CheckpointReader::peek_key() const {
    if (at_end()) return {};
    return lines_[pos_][0];
}

std::vector<std::string> CheckpointReader::next(std::string_view key) {
    if (at_end()) throw CheckpointError("checkpoint parse error: missing record '" + std::string(key) + "'");
    auto& toks = lines_[pos_];
    if (toks[0] != key)
        throw CheckpointError("checkpoint parse error: line " + std::to_string(line_no_[pos_]) + ": expected '" +
                              std::string(key) + "', found '" + toks[0] + "'");
    ++pos_;
    return std::vector<std::string>(toks.begin() + 1, toks.end());
}

namespace {

[[noreturn]] void bad(std::string_view key, const std::string& why) {
    throw CheckpointError("checkpoint parse error: record '" + std::string(key) + "': " + why);
}

double real_or_throw(std::string_view key, const std::string& s) {
    try {
        return parse_real(s);
    } catch (const std::invalid_argument& e) {
        bad(key, e.what());
    }
}

std::int64_t int_or_throw(std::string_view key, const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) bad(key, "bad integer '" + s + "'");
    return v;
}

}  // namespace

double CheckpointReader::get(std::string_view key) {
    auto t = next(key);
    if (t.size() != 1) bad(key, "expected one value");
    return real_or_throw(key, t[0]);
}

std::int64_t CheckpointReader::get_int(std::string_view key) {
    auto t = next(key);
    if (t.size() != 1) bad(key, "expected one value");
    return int_or_throw(key, t[0]);
}

std::uint64_t CheckpointReader::get_u64(std::string_view key) {
    auto t = next(key);
    if (t.size() != 1) bad(key, "expected one value");
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t[0].c_str(), &end, 10);
    if (end != t[0].c_str() + t[0].size() || errno == ERANGE || t[0][0] == '-') bad(key, "bad unsigned integer");
    return v;
}

std::string CheckpointReader::get_str(std::string_view key) {
    auto t = next(key);
    if (t.size() != 1) bad(key, "expected one token");
    return t[0];
}

std::vector<double> CheckpointReader::get_vec(std::string_view key) {
    auto t = next(key);
    if (t.empty()) bad(key, "missing length");
    const auto n = int_or_throw(key, t[0]);
    if (n < 0 || static_cast<std::size_t>(n) + 1 != t.size()) bad(key, "length mismatch");
    std::vector<double> v(n);
    for (std::int64_t i = 0; i < n; ++i) v[i] = real_or_throw(key, t[i + 1]);
    return v;
}

Eigen::VectorXd CheckpointReader::get_evec(std::string_view key) {
    const auto v = get_vec(key);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd CheckpointReader::get_mat(std::string_view key) {
    auto t = next(key);
    if (t.size() < 2) bad(key, "missing shape");
    const auto r = int_or_throw(key, t[0]);
    const auto c = int_or_throw(key, t[1]);
    if (r < 0 || c < 0 || static_cast<std::size_t>(r * c) + 2 != t.size()) bad(key, "shape mismatch");
    Eigen::MatrixXd m(r, c);
    for (std::int64_t i = 0; i < r * c; ++i) m.data()[i] = real_or_throw(key, t[i + 2]);
    return m;
}

}  // namespace seqmon
