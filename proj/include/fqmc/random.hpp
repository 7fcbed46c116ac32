// SPDX-License-Identifier: MIT
//
// Counter-based generator: every draw is a pure hash of (seed, stream, counter),
// so streams split without shared state and replay bit-identically.
#pragma once

#include <cstdint>

namespace fqmc {

inline constexpr std::uint64_t kDefaultSeed = 20240611ULL;

[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

[[nodiscard]] constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a,
                                                   std::uint64_t b = 0,
                                                   std::uint64_t c = 0) noexcept {
    std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = mix64(h ^ a);
    h = mix64(h ^ (b + 0x3c6ef372fe94f82bULL));
    return mix64(h ^ (c + 0xa54ff53a5f1d36f1ULL));
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64() noexcept { return counter_hash(seed_, stream_, counter_++, 0x5851f42d4c957f2dULL); }
    // Uniform on the open interval (0,1).
    double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
    [[nodiscard]] std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace fqmc
