#include "ctmdp/random.hpp"

#include <cmath>

namespace ctmdp {

double Rng::exponential(double rate) { return -std::log(uniform_open()) / rate; }

std::size_t Rng::categorical(std::span<const double> weights) {
    const double u = uniform_open();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (weights[j] <= 0.0) continue;
        cumulative += weights[j];
        last_positive = j;
        if (u < cumulative) return j;
    }
    // Rounding left u above the final cumulative sum.
    return last_positive;
}

std::size_t Rng::index(std::size_t n) {
    return static_cast<std::size_t>(uniform_open() * static_cast<double>(n)) % n;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t stream) {
    return splitmix64(splitmix64(base_seed) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

}  // namespace ctmdp
