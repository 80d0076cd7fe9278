#pragma once

#include <cstdint>
#include <initializer_list>

namespace strokeforge {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Derives an independent generator seed from a tuple of keys.
constexpr std::uint64_t keyed_seed(std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = 0x6A09E667F3BCC909ull;
    for (auto k : keys) h = splitmix64(h ^ splitmix64(k));
    return h;
}

}  // namespace strokeforge
