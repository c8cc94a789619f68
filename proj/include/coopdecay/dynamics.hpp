// dynamics.hpp: single-excitation propagation, excited population and the
// dynamic fluorescence spectrum.
//
// Within the single-excitation manifold the jump term of the master equation
// only feeds the global ground state, so the amplitudes c_j on |e_j, g_rest>
// evolve under exp(-i H t) alone and p_exc = sum_j |c_j|^2.

#pragma once

#include "coopdecay/error.hpp"
#include "coopdecay/rng.hpp"
#include "coopdecay/spectral.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace coopdecay {

struct SingleExcitationState {
    Eigen::VectorXcd amplitudes;
    double time = 0.0;

    double population() const { return amplitudes.squaredNorm(); }
    std::size_t size() const { return static_cast<std::size_t>(amplitudes.size()); }
};

// Equal-weight superposition of all singly excited states with i.i.d. phases.
inline SingleExcitationState random_phase_state(std::size_t n, Rng& rng) {
    if (n == 0) throw ValidationError("random_phase_state needs N >= 1");
    SingleExcitationState s;
    s.amplitudes.resize(static_cast<Eigen::Index>(n));
    const double weight = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index j = 0; j < s.amplitudes.size(); ++j) {
        const double phase = 2.0 * pi * rng.uniform();
        s.amplitudes(j) = std::polar(weight, phase);
    }
    return s;
}

// Atom j (1-based) excited, all others in the ground state.
inline SingleExcitationState site_excitation_state(std::size_t n, std::size_t j) {
    if (j < 1 || j > n)
        throw ValidationError("site index " + std::to_string(j) + " outside 1.." + std::to_string(n));
    SingleExcitationState s;
    s.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    s.amplitudes(static_cast<Eigen::Index>(j - 1)) = 1.0;
    return s;
}

// exp(-i H t) by scaling and squaring.
inline Eigen::MatrixXcd direct_propagator(const Eigen::MatrixXcd& H, double t) {
    Eigen::MatrixXcd U = (cplx(0.0, -t) * H).exp();
    if (!U.allFinite())
        throw PropagationError("matrix exponential produced non-finite entries at t = " +
                               std::to_string(t));
    return U;
}

// Amplitudes after evolving for a duration t from `state`.
inline SingleExcitationState propagate(const SingleExcitationState& state,
                                       const ModeDecomposition& dec, double t) {
    if (!(t >= 0.0)) throw ValidationError("propagation time must be >= 0");
    if (state.size() != dec.size()) throw ValidationError("state and decomposition sizes differ");
    SingleExcitationState out;
    out.time = state.time + t;
    if (t == 0.0) {
        out.amplitudes = state.amplitudes;
        return out;
    }
    if (dec.ill_conditioned) {
        out.amplitudes = direct_propagator(dec.hamiltonian, t) * state.amplitudes;
        return out;
    }
    const Eigen::VectorXcd b = dec.inverse_vectors * state.amplitudes;
    const Eigen::VectorXcd phases = (cplx(0.0, -t) * dec.eigenvalues).array().exp();
    out.amplitudes = dec.vectors * (phases.array() * b.array()).matrix();
    return out;
}

struct PopulationSample {
    double t;
    double p_exc;
};

// p_exc at each of `times` (durations measured from state0, ascending).
inline std::vector<PopulationSample> population_curve(const SingleExcitationState& state0,
                                                      const ModeDecomposition& dec,
                                                      const std::vector<double>& times) {
    if (!std::is_sorted(times.begin(), times.end()))
        throw ValidationError("population_curve needs ascending times");
    std::vector<PopulationSample> curve;
    curve.reserve(times.size());
    if (dec.ill_conditioned) {
        for (double t : times) curve.push_back({t, propagate(state0, dec, t).population()});
        return curve;
    }
    const Eigen::VectorXcd b = dec.inverse_vectors * state0.amplitudes;
    for (double t : times) {
        if (!(t >= 0.0)) throw ValidationError("propagation time must be >= 0");
        const Eigen::VectorXcd phases = (cplx(0.0, -t) * dec.eigenvalues).array().exp();
        const Eigen::VectorXcd c = dec.vectors * (phases.array() * b.array()).matrix();
        curve.push_back({t, c.squaredNorm()});
    }
    return curve;
}

// ------------------------------------------------------------------ spectrum

// Regularizer added to (numerically) dark poles so the spectrum stays finite.
inline constexpr double dark_pole_regularizer = 1e-12;

struct SpectrumResult {
    std::vector<double> omega;   // shift from the bare transition, gamma0 units
    std::vector<double> S;
    std::vector<bool> flagged;   // grid point sits on a regularized dark pole
    double t_prime = 0.0;
};

inline std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
    if (points < 2 || !(hi > lo)) throw ValidationError("grid needs >= 2 points and hi > lo");
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    return grid;
}

inline std::vector<double> default_omega_grid() { return linear_grid(-3.0, 3.0, 400); }

// Coordinate entering the emission phase exp(i k0 z_n): z for the half
// waveguide, the chain (x) coordinate in free space.
inline double emission_coordinate(const ArrayGeometry& geom, std::size_t n) {
    return geom.environment == Environment::HalfWaveguide ? geom.positions[n].z()
                                                          : geom.positions[n].x();
}

// S(w, t') = 2 Re sum_n int_0^inf dtau exp(i(k0 z_n - w tau)) <s+_n(t'+tau) s-_n(t')>
// with the single-excitation regression identity <s+_n(t'+tau) s-_n(t')> =
// conj(c_n(t'+tau)) c_n(t'). In the eigenbasis, b = V^-1 c(t'),
//   S = 2 Re sum_k w_k i / (conj(E_k) - w),  w_k = conj(b_k) sum_n conj(V_nk) e^{i k0 z_n} c_n(t').
// An ill-conditioned basis uses the resolvent form instead,
//   S = 2 Re sum_n e^{i k0 z_n} c_n(t') i conj(x_n),  (H - w) x = c(t').
inline SpectrumResult fluorescence_spectrum(const SingleExcitationState& state,
                                            const ModeDecomposition& dec,
                                            const ArrayGeometry& geom,
                                            const std::vector<double>& omega_grid) {
    const auto n = static_cast<Eigen::Index>(dec.size());
    if (state.size() != dec.size() || geom.size() != dec.size())
        throw ValidationError("state, decomposition and geometry sizes differ");
    for (std::size_t i = 1; i < omega_grid.size(); ++i)
        if (!(omega_grid[i] > omega_grid[i - 1]))
            throw ValidationError("omega grid must be strictly increasing");

    SpectrumResult out;
    out.omega = omega_grid;
    out.t_prime = state.time;
    out.S.resize(omega_grid.size());
    out.flagged.assign(omega_grid.size(), false);

    Eigen::VectorXcd weighted(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double turns = emission_coordinate(geom, static_cast<std::size_t>(j)) / lambda0;
        weighted(j) = cplx(cos_turns(turns), sin_turns(turns)) * state.amplitudes(j);
    }

    // Poles with decay below the regularizer get pushed to -i eta/2.
    Eigen::VectorXcd poles = dec.eigenvalues;
    std::vector<bool> regularized(static_cast<std::size_t>(n), false);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (dec.decay_rates(k) < dark_pole_regularizer) {
            poles(k) = cplx(poles(k).real(), -0.5 * dark_pole_regularizer);
            regularized[static_cast<std::size_t>(k)] = true;
        }
    }
    auto flag_point = [&](std::size_t i) {
        for (Eigen::Index k = 0; k < n; ++k)
            if (regularized[static_cast<std::size_t>(k)] &&
                std::abs(poles(k).real() - omega_grid[i]) <= 1e-9)
                return true;
        return false;
    };

    if (!dec.ill_conditioned) {
        const Eigen::VectorXcd b = dec.inverse_vectors * state.amplitudes;
        const Eigen::VectorXcd proj = dec.vectors.adjoint() * weighted;
        Eigen::VectorXcd w(n);
        for (Eigen::Index k = 0; k < n; ++k) w(k) = std::conj(b(k)) * proj(k);
        for (std::size_t i = 0; i < omega_grid.size(); ++i) {
            cplx sum = 0.0;
            for (Eigen::Index k = 0; k < n; ++k)
                sum += w(k) * cplx(0.0, 1.0) / (std::conj(poles(k)) - omega_grid[i]);
            out.S[i] = 2.0 * sum.real();
            out.flagged[i] = flag_point(i);
        }
        return out;
    }

    const bool any_dark = std::find(regularized.begin(), regularized.end(), true) != regularized.end();
    Eigen::MatrixXcd shifted = dec.hamiltonian;
    if (any_dark) shifted.diagonal().array() -= cplx(0.0, 0.5 * dark_pole_regularizer);
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        Eigen::MatrixXcd A = shifted;
        A.diagonal().array() -= omega_grid[i];
        const Eigen::VectorXcd x = A.partialPivLu().solve(state.amplitudes);
        cplx sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) sum += weighted(j) * cplx(0.0, 1.0) * std::conj(x(j));
        out.S[i] = 2.0 * sum.real();
        out.flagged[i] = flag_point(i);
    }
    return out;
}

} // namespace coopdecay
