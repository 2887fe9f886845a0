#pragma once

// Counter-based random streams (Philox4x32-10) and the variate
// conversions every sampler in the library uses. Conversions are written
// out by hand so a given stream yields identical variates on any
// standard library.
//
// Stream contract: the Philox key is a 64-bit value derived from
// (master_seed, purpose) with splitmix64; the 128-bit counter holds the
// replication index in its upper 64 bits and the block index in its lower
// 64 bits. Two replications therefore never share a counter value.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace mecke {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Key for one family of replications (one check, one arm of a comparison).
inline constexpr std::uint64_t derive_key(std::uint64_t master_seed, std::uint64_t purpose) {
    return splitmix64(master_seed ^ splitmix64(purpose));
}

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{m0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{m1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

class PhiloxStream {
public:
    using result_type = std::uint64_t;

    PhiloxStream(std::uint64_t key, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)}, stream_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (lane_ == 2) refill();
        const std::uint64_t lo = out_[2 * lane_];
        const std::uint64_t hi = out_[2 * lane_ + 1];
        ++lane_;
        return lo | (hi << 32);
    }

    std::uint64_t stream() const { return stream_; }

private:
    void refill() {
        const PhiloxBlock ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                              static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        out_ = philox4x32_10(ctr, key_);
        ++block_;
        lane_ = 0;
    }

    PhiloxKey key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    PhiloxBlock out_{};
    int lane_ = 2;
};

// U in [0, 1).
template <class Rng>
double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// U in (0, 1].
template <class Rng>
double uniform01_open_low(Rng& rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

template <class Rng>
double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// -ln(U) / rate with U in (0, 1].
template <class Rng>
double exponential(Rng& rng, double rate) {
    return -std::log(uniform01_open_low(rng)) / rate;
}

// Uniform on {0, ..., n-1}; Lemire's multiply-shift with rejection.
template <class Rng>
std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(rng()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace mecke
