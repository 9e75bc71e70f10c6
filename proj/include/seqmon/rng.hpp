#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace seqmon {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b * 0xD1B54A32D192ED03ULL);
    return splitmix64(s);
}

// Uniform in (0, 1), never exactly 0.
inline double u64_to_open_unit(std::uint64_t v) {
    return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normals addressed by (seed, stage, draw, stream). Each key
// yields its own short sequence, so any subset of draws can be regenerated
// without replaying the others.
class CounterNormal {
public:
    explicit CounterNormal(std::uint64_t seed) : seed_(seed) {}

    class Stream {
    public:
        explicit Stream(std::uint64_t key) : state_(key) {}

        double next() {
            if (has_spare_) {
                has_spare_ = false;
                return spare_;
            }
            const double u1 = u64_to_open_unit(splitmix64(state_));
            const double u2 = u64_to_open_unit(splitmix64(state_));
            const double rad = std::sqrt(-2.0 * std::log(u1));
            const double ang = 2.0 * std::numbers::pi * u2;
            spare_ = rad * std::sin(ang);
            has_spare_ = true;
            return rad * std::cos(ang);
        }

    private:
        std::uint64_t state_;
        double spare_ = 0.0;
        bool has_spare_ = false;
    };

    Stream stream(std::uint64_t stage, std::uint64_t draw, std::uint64_t which) const {
        return Stream(mix64(mix64(mix64(seed_, stage), draw), which));
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

}  // namespace seqmon
