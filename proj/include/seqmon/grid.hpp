#pragma once

#include "seqmon/basis.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace seqmon {

class CheckpointWriter;
class CheckpointReader;

enum class GridSource { FixedGrid, ObservedSample };

struct GridSpec {
    GridSource source = GridSource::ObservedSample;
    int resolution = 41;   // points per dimension, FixedGrid
    int reservoir = 512;   // capacity, ObservedSample
};

// Finite set of covariate points over which suprema are taken. The
// observed-sample kind keeps a uniform reservoir of every covariate seen;
// replacement decisions are keyed on (seed, arrival index) so the reservoir
// is a pure function of the stream.
class SupGrid {
public:
    SupGrid() = default;
    SupGrid(const GridSpec& spec, const BasisSpec& basis, std::uint64_t seed);

    GridSource source() const { return source_; }
    const std::vector<std::vector<double>>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

    void observe(std::span<const double> x);

    // |grid| x q matrix of basis rows, rebuilt only after the grid changed.
    const Eigen::MatrixXd& features(const BasisSpec& basis) const;

    void save(CheckpointWriter& w) const;
    static SupGrid load(CheckpointReader& r);

private:
    GridSource source_ = GridSource::ObservedSample;
    int capacity_ = 0;
    std::uint64_t seed_ = 0;
    std::int64_t seen_ = 0;
    std::vector<std::vector<double>> points_;
    mutable Eigen::MatrixXd features_;
    mutable bool dirty_ = true;
};

std::string to_string(GridSource s);

}  // namespace seqmon
