#include "levygal/rng.hpp"

#include <cmath>
#include <numbers>

namespace levygal {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

double unit53(std::uint32_t a, std::uint32_t b) {
    const std::uint64_t bits = (std::uint64_t(a >> 5) << 26) | (b >> 6);
    return double(bits) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
        const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
        const auto hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
        const auto hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

CounterStream::CounterStream(std::uint64_t seed, StreamId stream, std::uint32_t substream)
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
      stream_(static_cast<std::uint32_t>(stream)),
      substream_(substream) {}

std::array<std::uint32_t, 4> CounterStream::block(std::uint64_t index) const {
    return philox4x32({std::uint32_t(index), std::uint32_t(index >> 32), substream_, stream_}, key_);
}

double CounterStream::uniform_at(std::uint64_t index) const {
    const auto b = block(index);
    return unit53(b[0], b[1]);
}

double CounterStream::open_uniform_at(std::uint64_t index) const { return 1.0 - uniform_at(index); }

double CounterStream::normal_at(std::uint64_t index) const {
    const auto b = block(index);
    const double u1 = 1.0 - unit53(b[0], b[1]);
    const double u2 = unit53(b[2], b[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    const auto b = CounterStream(seed, StreamId::path_seed).block(index);
    return (std::uint64_t(b[1]) << 32) | b[0];
}

}  // namespace levygal
