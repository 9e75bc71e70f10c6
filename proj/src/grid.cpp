#include "seqmon/grid.hpp"

#include "seqmon/checkpoint.hpp"
#include "seqmon/rng.hpp"

#include <stdexcept>

namespace seqmon {

namespace {
constexpr std::uint64_t kReservoirDomain = 0x5245534552564F49ULL;
}

SupGrid::SupGrid(const GridSpec& spec, const BasisSpec& basis, std::uint64_t seed)
    : source_(spec.source), seed_(mix64(seed, kReservoirDomain)) {
    if (spec.source == GridSource::ObservedSample) {
        if (spec.reservoir < 1) throw std::invalid_argument("grid: reservoir size must be >= 1");
        capacity_ = spec.reservoir;
        points_.reserve(static_cast<std::size_t>(capacity_));
        return;
    }
    if (spec.resolution < 1) throw std::invalid_argument("grid: resolution must be >= 1");
    if (basis.support.empty()) throw std::invalid_argument("grid: a fixed grid needs a bounded basis support");
    const int d = basis.dim_x;
    std::size_t total = 1;
    for (int j = 0; j < d; ++j) {
        total *= static_cast<std::size_t>(spec.resolution);
        if (total > 5'000'000) throw std::invalid_argument("grid: fixed grid too large");
    }
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t c = 0; c < total; ++c) {
        std::vector<double> x(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) {
            const Interval& iv = basis.support[j];
            x[j] = spec.resolution == 1 ? 0.5 * (iv.lo + iv.hi)
                                        : iv.lo + (iv.hi - iv.lo) * idx[j] / (spec.resolution - 1);
        }
        points_.push_back(std::move(x));
        for (int j = d - 1; j >= 0; --j) {
            if (++idx[j] < spec.resolution) break;
            idx[j] = 0;
        }
    }
    capacity_ = static_cast<int>(points_.size());
}

void SupGrid::observe(std::span<const double> x) {
    if (source_ != GridSource::ObservedSample) return;
    ++seen_;
    if (static_cast<std::int64_t>(points_.size()) < capacity_) {
        points_.emplace_back(x.begin(), x.end());
        dirty_ = true;
        return;
    }
    const std::uint64_t j = mix64(seed_, static_cast<std::uint64_t>(seen_)) % static_cast<std::uint64_t>(seen_);
    if (j < static_cast<std::uint64_t>(capacity_)) {
        points_[j].assign(x.begin(), x.end());
        dirty_ = true;
    }
}

const Eigen::MatrixXd& SupGrid::features(const BasisSpec& basis) const {
    if (dirty_ || features_.rows() != static_cast<Eigen::Index>(points_.size()) || features_.cols() != basis.q) {
        // build column-major q x G then transpose, rows are grid points
        Eigen::MatrixXd cols(basis.q, static_cast<Eigen::Index>(points_.size()));
        for (std::size_t g = 0; g < points_.size(); ++g)
            eval_basis_into(basis, points_[g], cols.col(static_cast<Eigen::Index>(g)));
        features_ = cols.transpose();
        dirty_ = false;
    }
    return features_;
}

void SupGrid::save(CheckpointWriter& w) const {
    w.put_str("grid.source", to_string(source_));
    w.put_int("grid.capacity", capacity_);
    w.put_u64("grid.seed", seed_);
    w.put_int("grid.seen", seen_);
    w.put_int("grid.points", static_cast<std::int64_t>(points_.size()));
    for (const auto& p : points_) w.put_vec("grid.p", p);
}

SupGrid SupGrid::load(CheckpointReader& r) {
    SupGrid g;
    const auto src = r.get_str("grid.source");
    if (src == "fixed")
        g.source_ = GridSource::FixedGrid;
    else if (src == "reservoir")
        g.source_ = GridSource::ObservedSample;
    else
        throw CheckpointError("checkpoint parse error: unknown grid source");
    g.capacity_ = static_cast<int>(r.get_int("grid.capacity"));
    g.seed_ = r.get_u64("grid.seed");
    g.seen_ = r.get_int("grid.seen");
    const auto n = r.get_int("grid.points");
    if (n < 0 || n > g.capacity_) throw CheckpointError("checkpoint parse error: grid size");
    for (std::int64_t i = 0; i < n; ++i) g.points_.push_back(r.get_vec("grid.p"));
    g.dirty_ = true;
    return g;
}

std::string to_string(GridSource s) { return s == GridSource::FixedGrid ? "fixed" : "reservoir"; }

}  // namespace seqmon
