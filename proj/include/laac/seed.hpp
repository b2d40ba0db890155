#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <utility>

namespace laac {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// FNV-1a hash of a tag string, used to fold stage names into seeds.
std::uint64_t hash_tag(std::string_view tag) noexcept;

/// Combines a list of integers into one well-mixed seed. Order matters.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept;

/// seed = hash(master, stage, function, trial, repetition)
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::uint64_t function_id,
                          std::uint64_t trial = 0, std::uint64_t repetition = 0) noexcept;

// Distributions from <random> are implementation-defined; the helpers below
// are portable so that seeded artifacts do not depend on the standard library.
double uniform01(Rng &rng) noexcept;
double uniform(Rng &rng, double lo, double hi) noexcept;
double standard_normal(Rng &rng) noexcept;
std::size_t uniform_index(Rng &rng, std::size_t n) noexcept;

/// Fisher-Yates shuffle driven by uniform_index.
template <class Container>
void shuffle(Container &c, Rng &rng) {
    for (std::size_t i = c.size(); i > 1; --i) {
        const std::size_t j = uniform_index(rng, i);
        std::swap(c[i - 1], c[j]);
    }
}

} // namespace laac
