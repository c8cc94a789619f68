// entanglement.hpp: von Neumann entropies and half-chain mutual information
// during single-excitation decay.
//
// The full state is rho = |psi><psi| + (1 - |c|^2) |G><G| with |psi> the
// unnormalized single-excitation amplitude vector. Any reduced state has
// spectrum {p, 1 - p, 0, ...} with p the excitation weight inside the subset,
// so every entropy is a binary entropy h(p). Entropies are in nats.

#pragma once

#include "coopdecay/dynamics.hpp"
#include "coopdecay/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace coopdecay {

inline constexpr double norm_tolerance = 1e-9;

// -p ln p - (1 - p) ln(1 - p), with h(0) = h(1) = 0.
inline double binary_entropy(double p) {
    p = std::clamp(p, 0.0, 1.0);
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
    return h;
}

struct BipartiteCut {
    std::vector<std::size_t> a; // 0-based site indices
    std::vector<std::size_t> b;

    // A = first ceil(N/2) atoms in construction order, B = the rest.
    static BipartiteCut half_chain(std::size_t n) {
        BipartiteCut cut;
        const std::size_t split = (n + 1) / 2;
        for (std::size_t j = 0; j < n; ++j) (j < split ? cut.a : cut.b).push_back(j);
        return cut;
    }

    std::string describe() const {
        auto range = [](const std::vector<std::size_t>& v) {
            if (v.empty()) return std::string("{}");
            return std::to_string(v.front() + 1) + ".." + std::to_string(v.back() + 1);
        };
        return "A=" + range(a) + " B=" + range(b);
    }
};

namespace detail {

inline double checked_weight(const Eigen::VectorXcd& c) {
    const double total = c.squaredNorm();
    if (total > 1.0 + norm_tolerance)
        throw ValidationError("amplitude norm squared " + std::to_string(total) + " exceeds 1");
    return total;
}

inline double subset_weight(const Eigen::VectorXcd& c, std::span<const std::size_t> subset) {
    double p = 0.0;
    for (std::size_t j : subset) {
        if (j >= static_cast<std::size_t>(c.size()))
            throw ValidationError("subset index " + std::to_string(j) + " out of range");
        p += std::norm(c(static_cast<Eigen::Index>(j)));
    }
    return p;
}

} // namespace detail

inline double subsystem_entropy(const Eigen::VectorXcd& c, std::span<const std::size_t> subset) {
    detail::checked_weight(c);
    return binary_entropy(detail::subset_weight(c, subset));
}

// I(A,B) = S(A) + S(B) - S(A,B), with S(A,B) = h(|c|^2).
inline double mutual_information(const Eigen::VectorXcd& c, const BipartiteCut& cut) {
    detail::checked_weight(c);
    const double pa = detail::subset_weight(c, cut.a);
    const double pb = detail::subset_weight(c, cut.b);
    const double info = binary_entropy(pa) + binary_entropy(pb) - binary_entropy(pa + pb);
    return std::max(info, 0.0);
}

struct InfoSample {
    double t;
    double info;
};

inline std::vector<InfoSample> mutual_information_curve(const SingleExcitationState& state0,
                                                        const ModeDecomposition& dec,
                                                        const BipartiteCut& cut,
                                                        const std::vector<double>& times) {
    if (!std::is_sorted(times.begin(), times.end()))
        throw ValidationError("mutual_information_curve needs ascending times");
    std::vector<InfoSample> curve;
    curve.reserve(times.size());
    for (double t : times)
        curve.push_back({t, mutual_information(propagate(state0, dec, t).amplitudes, cut)});
    return curve;
}

} // namespace coopdecay
