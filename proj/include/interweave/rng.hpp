#pragma once

// Counter-based random streams. Every (seed, index) pair names an
// independent SplitMix64 stream, so draws for slot i never depend on how
// slots are distributed over workers.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace interweave {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed for sub-task `index` of a run seeded with `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(seed ^ mix64(index + 0x632be59bd9b4e019ULL));
}

class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint64_t counter) noexcept
        : state_(derive_seed(seed, counter)) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Unit-mean exponential, i.e. |h|^2 for h ~ CN(0, 1).
    double exponential() noexcept { return -std::log(uniform()); }

    double normal() noexcept {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        return r * std::cos(2.0 * std::numbers::pi * uniform());
    }

    // Circularly symmetric complex Gaussian with E|z|^2 = 1.
    std::complex<double> complex_normal() noexcept {
        const double r = std::sqrt(-std::log(uniform()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(theta), r * std::sin(theta)};
    }

private:
    std::uint64_t state_;
};

} // namespace interweave
