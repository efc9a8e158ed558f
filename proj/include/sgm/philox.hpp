#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace sgm {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A pure function of
/// (counter, key), so any draw can be addressed directly without sequential state.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) noexcept
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeylA;
                key[1] += kWeylB;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMulA = 0xD2511F53u;
    static constexpr std::uint32_t kMulB = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

    static Counter single_round(const Counter& c, const Key& k) noexcept
    {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// Standard-normal draws addressed by (seed, stream, path, slot). Every slot yields an
/// arbitrary-length block of normals; block b of slot s for path p never depends on any
/// other draw, which makes batch output independent of execution order.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint32_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream)
    {
    }

    /// Fills out with independent N(0,1) draws for (path, slot).
    void fill(std::uint32_t path, std::uint32_t slot, std::span<double> out) const noexcept
    {
        std::uint32_t block = 0;
        for (std::size_t i = 0; i < out.size(); i += 2, ++block) {
            const auto r = Philox4x32::generate({path, stream_, slot, block}, key_);
            // 53-bit uniforms in (0, 1]; the open lower end keeps log() finite.
            const double u1 = (static_cast<double>(to53(r[0], r[1])) + 1.0) * 0x1p-53;
            const double u2 = static_cast<double>(to53(r[2], r[3])) * 0x1p-53;
            const double radius = std::sqrt(-2.0 * std::log(u1));
            const double angle = 2.0 * std::numbers::pi * u2;
            out[i] = radius * std::cos(angle);
            if (i + 1 < out.size()) {
                out[i + 1] = radius * std::sin(angle);
            }
        }
    }

    /// Uniform draw in [0, 1) for (path, slot, index).
    double uniform(std::uint32_t path, std::uint32_t slot, std::uint32_t index) const noexcept
    {
        const auto r = Philox4x32::generate({path, stream_, slot, index}, key_);
        return static_cast<double>(to53(r[0], r[1])) * 0x1p-53;
    }

private:
    static std::uint64_t to53(std::uint32_t lo, std::uint32_t hi) noexcept
    {
        return ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    }

    Philox4x32::Key key_;
    std::uint32_t stream_;
};

} // namespace sgm
