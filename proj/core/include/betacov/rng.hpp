#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace betacov {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Immutable descriptor of one reproducible uniform stream.
///
/// The master seed is the Philox key; the stream id occupies the upper half
/// of the 128-bit counter and the draw index the lower half. Two descriptors
/// with different (seed, id) therefore never share a counter block, and a
/// given descriptor produces the same sequence regardless of which thread or
/// in which order it is consumed.
struct RngStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// Stream id for replication `replication` of experiment `experiment`.
/// Injective in `replication` for a fixed experiment name.
std::uint64_t stream_id(std::string_view experiment, std::uint64_t replication) noexcept;

inline RngStream make_stream(std::uint64_t master_seed, std::string_view experiment,
                             std::uint64_t replication) noexcept {
    return {master_seed, stream_id(experiment, replication)};
}

/// Sequential reader over a counter-based stream. Cheap to construct; holds
/// only the descriptor, a block index, and one buffered block.
class UniformStream {
public:
    explicit UniformStream(RngStream stream) noexcept : stream_(stream) {}

    /// Next uniform in the open interval (0,1), 53-bit resolution.
    double next() noexcept;

    /// Next standard normal by inversion of next().
    double next_normal();

    /// Raw 64-bit draw.
    std::uint64_t next_u64() noexcept;

    const RngStream& descriptor() const noexcept { return stream_; }

private:
    void refill() noexcept;

    RngStream stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int used_ = 2;
};

/// Convenience: a reader positioned at the start of `stream`.
inline UniformStream uniform_stream(RngStream stream) noexcept { return UniformStream(stream); }

} // namespace betacov
