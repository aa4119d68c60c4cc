#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sns {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Any (key, counter) cell can be evaluated independently, which makes
/// sub-streams reproducible without replaying the whole stream.
struct Philox4x32 {
    static constexpr std::uint32_t M0 = 0xD2511F53u;
    static constexpr std::uint32_t M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u;
    static constexpr std::uint32_t W1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                              std::array<std::uint32_t, 4> ctr) {
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
                   static_cast<std::uint32_t>(p0)};
            k0 += W0;
            k1 += W1;
        }
        return ctr;
    }
};

/// Uniform double in (0, 1] from a 64-bit word (never 0, safe for log).
inline double uniform_open(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Two independent standard normals from one Philox block (Box-Muller).
inline std::pair<double, double> gaussian_pair(std::uint64_t key,
                                               std::array<std::uint32_t, 4> ctr) {
    const auto r = Philox4x32::block(key, ctr);
    const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
    const double u = uniform_open(a);
    const double v = uniform_open(b);
    const double rad = std::sqrt(-2.0 * std::log(u));
    const double ang = 2.0 * std::numbers::pi * v;
    return {rad * std::cos(ang), rad * std::sin(ang)};
}

}  // namespace sns
