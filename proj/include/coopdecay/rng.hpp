// rng.hpp: reproducible random streams.
//
// A realization never shares engine state with another: each (seed, index,
// purpose) triple is hashed into its own mt19937_64 seed. Uniform doubles are
// built from the top 53 bits so the draws are identical on every platform
// (std::uniform_real_distribution is implementation-defined).

#pragma once

#include <cstdint>
#include <random>

namespace coopdecay {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent streams drawn by one realization.
enum class Stream : std::uint64_t {
    Positions = 1,
    Detunings = 2,
    InitialState = 3,
};

inline constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index,
                                           Stream purpose) noexcept {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ index);
    return splitmix64(h ^ static_cast<std::uint64_t>(purpose));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t index, Stream purpose)
        : engine_(stream_seed(seed, index, purpose)) {}

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on [-width/2, width/2).
    double centered(double width) { return (uniform() - 0.5) * width; }

private:
    std::mt19937_64 engine_;
};

} // namespace coopdecay
