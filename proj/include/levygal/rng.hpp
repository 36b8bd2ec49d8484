#pragma once

#include <array>
#include <cstdint>

namespace levygal {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Named, independent random streams. Every draw is a pure function of
/// (seed, stream, substream, index), so streams never perturb each other.
enum class StreamId : std::uint32_t {
    wiener = 1,
    jumps = 2,
    large_jumps = 3,
    initial = 4,
    bridge = 5,
    path_seed = 6,
    sampler = 7,
    stopping = 8,
};

class CounterStream {
public:
    CounterStream(std::uint64_t seed, StreamId stream, std::uint32_t substream = 0);

    std::array<std::uint32_t, 4> block(std::uint64_t index) const;
    /// Uniform in [0, 1) with 53 random bits.
    double uniform_at(std::uint64_t index) const;
    /// Uniform in (0, 1].
    double open_uniform_at(std::uint64_t index) const;
    /// Standard normal via Box-Muller on one block.
    double normal_at(std::uint64_t index) const;

    double next_uniform() { return uniform_at(counter_++); }
    double next_open_uniform() { return open_uniform_at(counter_++); }
    double next_normal() { return normal_at(counter_++); }
    std::uint64_t position() const { return counter_; }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_;
    std::uint32_t substream_;
    std::uint64_t counter_ = 0;
};

/// Seed of ensemble member `index`, decorrelated from the base seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace levygal
