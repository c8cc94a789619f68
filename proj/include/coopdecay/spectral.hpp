// spectral.hpp: eigenmodes of the non-Hermitian effective Hamiltonian.
//
// Modes are stored sorted by decreasing decay rate -2 Im E, so the last mode
// is the slowest. Ties are broken by Re E ascending, then by solver index.

#pragma once

#include "coopdecay/error.hpp"
#include "coopdecay/interactions.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace coopdecay {

// Eigenvector matrices at or above this condition number are not trusted for
// propagation; dynamics falls back to a direct matrix exponential.
inline constexpr double ill_conditioned_threshold = 1e8;

// Rates below this are numerically indistinguishable from zero.
inline constexpr double machine_epsilon_rate = 1e-14;

// Acceptance bound on per-mode residuals, relative to ||H||.
inline constexpr double residual_tolerance = 1e-8;

struct ModeDecomposition {
    Eigen::VectorXcd eigenvalues;       // sorted
    Eigen::MatrixXcd vectors;           // columns are unit-norm right eigenvectors
    Eigen::MatrixXcd inverse_vectors;   // V^-1
    Eigen::VectorXd decay_rates;        // -2 Im E, non-increasing
    Eigen::VectorXd iprs;
    Eigen::VectorXd residuals;          // ||H psi - E psi||
    std::vector<std::size_t> order;     // sorted position -> solver index
    std::vector<bool> at_machine_epsilon;
    double eigvec_condition = 1.0;
    bool ill_conditioned = false;
    bool certified = true;              // every residual <= 1e-8 ||H||
    Eigen::MatrixXcd hamiltonian;
    double hamiltonian_norm = 0.0;      // Frobenius norm

    std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

// Sum_j |psi_j|^4 for a unit-norm vector.
inline double ipr(const Eigen::VectorXcd& psi) {
    const double norm = psi.norm();
    if (!(std::abs(norm - 1.0) <= 1e-9))
        throw ValidationError("ipr needs a unit-norm vector (norm " + std::to_string(norm) + ")");
    double sum = 0.0;
    for (Eigen::Index j = 0; j < psi.size(); ++j) {
        const double p = std::norm(psi(j));
        sum += p * p;
    }
    return sum;
}

namespace detail {

inline std::string triage_tag(const ArrayGeometry& geom) {
    if (!geom.provenance) return "ordered geometry";
    return "seed " + std::to_string(geom.provenance->seed) + ", realization " +
           std::to_string(geom.provenance->realization);
}

} // namespace detail

inline ModeDecomposition decompose(const Eigen::MatrixXcd& H, const std::string& triage = "") {
    if (H.rows() != H.cols() || H.rows() == 0)
        throw ValidationError("decompose needs a non-empty square matrix");
    if (!H.allFinite()) throw ValidationError("Hamiltonian has non-finite entries");

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(H, true);
    if (solver.info() != Eigen::Success)
        throw DecompositionError("eigensolver did not converge" +
                                 (triage.empty() ? std::string() : " (" + triage + ")"));

    const auto n = H.rows();
    const Eigen::VectorXcd& values = solver.eigenvalues();

    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ra = -2.0 * values(a).imag();
        const double rb = -2.0 * values(b).imag();
        if (ra != rb) return ra > rb;
        if (values(a).real() != values(b).real()) return values(a).real() < values(b).real();
        return a < b;
    });

    ModeDecomposition dec;
    dec.order = order;
    dec.hamiltonian = H;
    dec.hamiltonian_norm = H.norm();
    dec.eigenvalues.resize(n);
    dec.vectors.resize(n, n);
    dec.decay_rates.resize(n);
    dec.iprs.resize(n);
    dec.residuals.resize(n);
    dec.at_machine_epsilon.assign(static_cast<std::size_t>(n), false);

    for (Eigen::Index k = 0; k < n; ++k) {
        const auto src = static_cast<Eigen::Index>(order[static_cast<std::size_t>(k)]);
        const cplx E = values(src);
        Eigen::VectorXcd psi = solver.eigenvectors().col(src);
        psi /= psi.norm();
        dec.eigenvalues(k) = E;
        dec.vectors.col(k) = psi;
        dec.decay_rates(k) = -2.0 * E.imag();
        dec.iprs(k) = ipr(psi);
        dec.residuals(k) = (H * psi - E * psi).norm();
        dec.at_machine_epsilon[static_cast<std::size_t>(k)] =
            std::abs(dec.decay_rates(k)) < machine_epsilon_rate;
    }

    const double tol = residual_tolerance * std::max(dec.hamiltonian_norm, 1e-300);
    dec.certified = (dec.residuals.array() <= tol).all();

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(dec.vectors);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    dec.eigvec_condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    dec.ill_conditioned = !(dec.eigvec_condition < ill_conditioned_threshold);
    dec.inverse_vectors = dec.vectors.partialPivLu().inverse();
    return dec;
}

inline ModeDecomposition decompose(const EffectiveHamiltonian& eff) {
    return decompose(eff.H, detail::triage_tag(eff.geometry));
}

// |2 Im E_N| of the slowest mode; the absolute value absorbs tiny negative
// rates from rounding.
inline double slowest_rate(const ModeDecomposition& dec) {
    return std::abs(dec.decay_rates(dec.decay_rates.size() - 1));
}

// |psi_n(j)| with rows j (sites) and columns n (modes in decay-rate order).
inline Eigen::MatrixXd mode_profile_table(const ModeDecomposition& dec) {
    return dec.vectors.cwiseAbs();
}

// Mean IPR over the `count` slowest modes.
inline double slow_mode_ipr(const ModeDecomposition& dec, std::size_t count) {
    const auto n = dec.iprs.size();
    const auto m = static_cast<Eigen::Index>(std::min<std::size_t>(count, static_cast<std::size_t>(n)));
    return dec.iprs.tail(m).mean();
}

} // namespace coopdecay
