#pragma once

#include <array>
#include <cstdint>

#include "adopt/normal.hpp"

namespace adopt {

// Philox4x32-10 counter-based generator. Each (path, step, block) coordinate
// maps to an independent 128-bit counter, so draws are reproducible and
// order-independent under any parallel schedule.
struct Philox {
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;

    static std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t path,
                                              std::uint32_t step, std::uint32_t sub) {
        std::uint32_t c0 = static_cast<std::uint32_t>(path);
        std::uint32_t c1 = static_cast<std::uint32_t>(path >> 32);
        std::uint32_t c2 = step;
        std::uint32_t c3 = sub;
        std::uint32_t k0 = static_cast<std::uint32_t>(seed);
        std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c0;
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            const std::uint32_t n3 = lo0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += kW0;
            k1 += kW1;
        }
        return {c0, c1, c2, c3};
    }
};

inline double uniform_from_bits(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

// Standard normal draw for coordinate (path, step, dim), deterministic in seed.
inline double counter_normal(std::uint64_t seed, std::uint64_t path, std::uint32_t step,
                             std::uint32_t dim) {
    const auto b = Philox::block(seed, path, step, dim >> 1);
    const double u = (dim & 1u) ? uniform_from_bits(b[2], b[3]) : uniform_from_bits(b[0], b[1]);
    return std_normal_inv(u);
}

}  // namespace adopt
