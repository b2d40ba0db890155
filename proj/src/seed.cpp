#include "laac/seed.hpp"

#include <cmath>
#include <numbers>

namespace laac {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_tag(std::string_view tag) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (auto p : parts) {
        h = splitmix64(h ^ splitmix64(p));
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::uint64_t function_id,
                          std::uint64_t trial, std::uint64_t repetition) noexcept {
    return derive_seed({master, hash_tag(stage), function_id, trial, repetition});
}

double uniform01(Rng &rng) noexcept {
    // 53 random mantissa bits, in [0, 1)
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(Rng &rng, double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(rng); }

double standard_normal(Rng &rng) noexcept {
    // Box-Muller; one draw per call keeps the stream position simple to reason about.
    double u1 = uniform01(rng);
    while (u1 <= 0.0) {
        u1 = uniform01(rng);
    }
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t uniform_index(Rng &rng, std::size_t n) noexcept {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

} // namespace laac
