#pragma once
#include <cmath>
#include <cstdint>

namespace freent {

// Counter-based generator (Philox-style 2x64, 10 rounds).  A draw is a pure
// function of (seed, stream, block), so any sample can be produced on any
// worker in any order and the result never depends on scheduling.
namespace rng_detail {

struct U128 { std::uint64_t hi, lo; };

inline U128 mulwide(std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    return {static_cast<std::uint64_t>(p >> 64), static_cast<std::uint64_t>(p)};
}

inline void philox_round(std::uint64_t& c0, std::uint64_t& c1, std::uint64_t key) {
    const U128 p = mulwide(0xD2B74407B1CE6E93ULL, c0);
    c0 = p.hi ^ key ^ c1;
    c1 = p.lo;
}

inline U128 philox(std::uint64_t c0, std::uint64_t c1, std::uint64_t key) {
    for (int r = 0; r < 10; ++r) {
        philox_round(c0, c1, key);
        key += 0x9E3779B97F4A7C15ULL;
    }
    return {c0, c1};
}

} // namespace rng_detail

// Stream id layout: tag in the top byte, component in the next byte, sample
// index in the low 48 bits.  Keeps every (sampler, sample, component) on an
// independent counter sequence under one seed.
inline std::uint64_t stream_id(std::uint8_t tag, std::uint64_t index,
                               std::uint8_t component = 0) {
    return (std::uint64_t(tag) << 56) | (std::uint64_t(component) << 48) |
           (index & 0xFFFFFFFFFFFFULL);
}

namespace stream_tag {
inline constexpr std::uint8_t gue = 1;
inline constexpr std::uint8_t ball_eigen = 2;
inline constexpr std::uint8_t ball_unitary = 3;
inline constexpr std::uint8_t net_probe = 4;
inline constexpr std::uint8_t test = 0xF0;
} // namespace stream_tag

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : key_(seed), stream_(stream) {}

    std::uint64_t next_u64() {
        if (pos_ == 0) {
            const auto w = rng_detail::philox(stream_, block_++, key_);
            buf_[0] = w.hi;
            buf_[1] = w.lo;
        }
        const std::uint64_t v = buf_[pos_];
        pos_ = (pos_ + 1) & 1;
        return v;
    }

    // [0, 1) with 53 random bits.
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }
    // (0, 1]; safe under log().
    double next_unit_open() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }
    double next_symmetric(double r) { return r * (2.0 * next_unit() - 1.0); }

    double next_gaussian() {
        if (have_g_) {
            have_g_ = false;
            return g_;
        }
        const double u1 = next_unit_open();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        g_ = r * std::sin(a);
        have_g_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t key_, stream_;
    std::uint64_t block_ = 0;
    std::uint64_t buf_[2] = {0, 0};
    int pos_ = 0;
    double g_ = 0.0;
    bool have_g_ = false;
};

} // namespace freent
