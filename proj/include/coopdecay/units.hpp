// units.hpp: unit conventions and phase helpers shared by every module.
//
// Rates are in units of the single-atom decay rate gamma0, lengths in units of
// the transition wavelength lambda0, times in 1/gamma0. Energies live in the
// frame rotating at the bare transition frequency.

#pragma once

#include <cmath>
#include <numbers>

namespace coopdecay {

inline constexpr double pi = std::numbers::pi;
inline constexpr double gamma0 = 1.0;
inline constexpr double lambda0 = 1.0;
inline constexpr double k0 = 2.0 * pi / lambda0;

// Smallest allowed interatomic distance (lambda0 units).
inline constexpr double min_separation = 1e-9;

namespace detail {

// Reduce a phase given in turns to s in [-1/8, 1/8] plus a quadrant q, with
// turns = m + q/4 + s. Both subtractions are exact in binary floating point,
// so half-integer distances give exactly zero residual phase.
inline void reduce_turns(double turns, double& s, int& q) {
    const double r = turns - std::nearbyint(turns);
    const double qd = std::nearbyint(4.0 * r);
    s = r - 0.25 * qd;
    q = static_cast<int>(qd);
}

} // namespace detail

// sin(2*pi*turns) with exact reduction of whole and quarter turns.
inline double sin_turns(double turns) {
    double s;
    int q;
    detail::reduce_turns(turns, s, q);
    const double angle = 2.0 * pi * s;
    switch ((q % 4 + 4) % 4) {
    case 0: return std::sin(angle);
    case 1: return std::cos(angle);
    case 2: return -std::sin(angle);
    default: return -std::cos(angle);
    }
}

// cos(2*pi*turns), same reduction as sin_turns.
inline double cos_turns(double turns) {
    double s;
    int q;
    detail::reduce_turns(turns, s, q);
    const double angle = 2.0 * pi * s;
    switch ((q % 4 + 4) % 4) {
    case 0: return std::cos(angle);
    case 1: return -std::sin(angle);
    case 2: return -std::cos(angle);
    default: return std::sin(angle);
    }
}

} // namespace coopdecay
