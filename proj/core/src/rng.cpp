#include "betacov/rng.hpp"

#include "betacov/numerics.hpp"

namespace betacov {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

std::uint64_t stream_id(std::string_view experiment, std::uint64_t replication) noexcept {
    // splitmix64 is a bijection, so ids are distinct across replications.
    return splitmix64(fnv1a(experiment) + replication);
}

void UniformStream::refill() noexcept {
    const std::array<std::uint32_t, 4> counter{
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_.stream_id),
        static_cast<std::uint32_t>(stream_.stream_id >> 32),
    };
    const std::array<std::uint32_t, 2> key{
        static_cast<std::uint32_t>(stream_.master_seed),
        static_cast<std::uint32_t>(stream_.master_seed >> 32),
    };
    const auto out = philox4x32(counter, key);
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    ++block_;
    used_ = 0;
}

std::uint64_t UniformStream::next_u64() noexcept {
    if (used_ == 2) refill();
    return buffer_[used_++];
}

double UniformStream::next() noexcept {
    // (m + 0.5) / 2^53 is strictly inside (0,1).
    const std::uint64_t m = next_u64() >> 11;
    return (static_cast<double>(m) + 0.5) * 0x1.0p-53;
}

double UniformStream::next_normal() { return std_normal_quantile(next()); }

} // namespace betacov
