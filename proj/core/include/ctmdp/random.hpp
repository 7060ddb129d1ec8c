#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace ctmdp {

/**
 * Seeded random source used by the simulator and the randomized agents.
 *
 * std::mt19937_64 is fully specified by the standard, and the conversions to
 * uniform and exponential variates below are written out by hand, so a given
 * seed reproduces the same stream on every conforming platform.
 */
class Rng {
public:
    static constexpr std::string_view kName = "mt19937_64+splitmix64-streams/v1";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Inverse-CDF exponential sample -log(U)/rate, always positive.
    double exponential(double rate);

    /// Index j with probability weights[j] (weights summing to 1).
    std::size_t categorical(std::span<const double> weights);

    /// Uniform index in [0, n).
    std::size_t index(std::size_t n);

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the independent stream `stream` derived from `base_seed`.
std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t stream);

}  // namespace ctmdp
