#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seqmon {

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointVersion = 1;

// Line-oriented text: one "key value..." record per line, reals written as
// %.17g so binary64 values survive the round trip bit-exactly. Records are
// read back in the order they were written.
class CheckpointWriter {
public:
    explicit CheckpointWriter(std::ostream& os) : os_(os) {}

    void put(std::string_view key, double v);
    void put_int(std::string_view key, std::int64_t v);
    void put_u64(std::string_view key, std::uint64_t v);
    void put_str(std::string_view key, std::string_view v);
    void put_vec(std::string_view key, std::span<const double> v);
    void put_mat(std::string_view key, const Eigen::MatrixXd& m);

private:
    std::ostream& os_;
};

class CheckpointReader {
public:
    explicit CheckpointReader(std::istream& is);

    double get(std::string_view key);
    std::int64_t get_int(std::string_view key);
    std::uint64_t get_u64(std::string_view key);
    std::string get_str(std::string_view key);
    std::vector<double> get_vec(std::string_view key);
    Eigen::MatrixXd get_mat(std::string_view key);
    Eigen::VectorXd get_evec(std::string_view key);

    std::string_view peek_key() const;
    bool at_end() const { return pos_ >= lines_.size(); }

private:
    std::vector<std::string> next(std::string_view key);

    std::vector<std::vector<std::string>> lines_;
    std::vector<std::size_t> line_no_;
    std::size_t pos_ = 0;
};

std::string format_real(double v);
double parse_real(const std::string& s);

}  // namespace seqmon
