#pragma once

// Counter-based random streams (Philox4x32-10, Salmon et al. 2011).
//
// A draw is a pure function of (seed, realization, purpose, entity, index),
// so results do not depend on the order in which cells, slots or
// realizations are processed.

#include <array>
#include <cstdint>
#include <limits>

namespace sirmeta::sim {

using Block = std::array<std::uint32_t, 4>;

inline Block philox4x32(Block ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(m0) * ctr[0];
        const std::uint64_t p1 = std::uint64_t(m1) * ctr[2];
        ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
               std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

/// Uniform on [0, 1) with 53 random bits.
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (std::uint64_t(hi) << 21) ^ (std::uint64_t(lo) >> 11);
    return double(bits & ((std::uint64_t(1) << 53) - 1)) * 0x1.0p-53;
}

enum class Purpose : std::uint32_t {
    bs_points = 1,
    ue_points,
    fallback,
    traffic,
    fading,
};

/// One independent stream family, addressed by (entity, index).
class Stream {
public:
    Stream(std::uint64_t seed, std::uint32_t realization, Purpose purpose)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
          tag_((std::uint32_t(purpose) << 24) | (realization & 0xFFFFFFu)) {}

    Block block(std::uint32_t entity, std::uint64_t index) const {
        return philox4x32({std::uint32_t(index), std::uint32_t(index >> 32), entity, tag_}, key_);
    }

    /// Two uniforms on [0, 1) from one block.
    std::array<double, 2> uniforms(std::uint32_t entity, std::uint64_t index) const {
        const Block b = block(entity, index);
        return {to_unit(b[0], b[1]), to_unit(b[2], b[3])};
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t tag_;
};

/// Sequential 32-bit engine over one entity of a stream, for use with the
/// standard distributions.
class StreamEngine {
public:
    using result_type = std::uint32_t;

    StreamEngine(const Stream& stream, std::uint32_t entity) : stream_(stream), entity_(entity) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (pos_ == 4) {
            buf_ = stream_.block(entity_, next_++);
            pos_ = 0;
        }
        return buf_[pos_++];
    }

private:
    Stream stream_;
    std::uint32_t entity_;
    std::uint64_t next_ = 0;
    Block buf_{};
    int pos_ = 4;
};

} // namespace sirmeta::sim
