// interactions.hpp: pair couplings and the single-excitation effective
// Hamiltonian H = J - (i/2) Gamma + diag(detunings), in the frame rotating at
// the bare transition frequency.
//
// Both environments produce a complex pair kernel M; the coherent exchange is
// J = Re M and the dissipative coupling is Gamma = -2 Im M.

#pragma once

#include "coopdecay/error.hpp"
#include "coopdecay/geometry.hpp"
#include "coopdecay/units.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <string>

namespace coopdecay {

using cplx = std::complex<double>;

struct Coupling {
    double J = 0.0;
    double Gamma = 0.0;
};

// Mirror-terminated waveguide kernel
//   M = -(i gamma0/2) [exp(-i k0 |zi - zj|) - exp(-i k0 (zi + zj))].
// Phases are reduced in wavelengths so that half-wavelength spacings give
// exact zeros.
inline Coupling hwg_couplings(double zi, double zj) {
    if (!(zi > 0.0) || !(zj > 0.0))
        throw DomainError("half waveguide coupling needs z > 0 (mirror at z = 0)");
    const double direct = std::abs(zi - zj) / lambda0;
    const double image = (zi + zj) / lambda0;
    Coupling c;
    c.J = -0.5 * gamma0 * (sin_turns(direct) - sin_turns(image));
    c.Gamma = gamma0 * (cos_turns(direct) - cos_turns(image));
    return c;
}

// Below this value of k0 r the dissipative part switches to its Taylor series.
inline constexpr double green_series_threshold = 1e-3;

// Free-space dipole-dipole coupling M = -(3 pi gamma0 / k0) d^T G(r, k0) d,
// without the contact term (self-energies are absorbed in the rotating frame).
//
// With x = k0 r and c = d.r_hat,
//   Gamma = (3/2) [(1 - c^2) sin x/x + (1 - 3c^2)(cos x/x^2 - sin x/x^3)]
//   J     = -(3/4) [(1 - c^2) cos x/x - (1 - 3c^2)(sin x/x^2 + cos x/x^3)]
// J has no cancellation and is evaluated directly for every x.
inline Coupling green_coupling(const Vec3& r, const Vec3& dipole) {
    const double dist = r.norm();
    if (!(dist >= min_separation))
        throw SingularSeparationError("separation " + std::to_string(dist) +
                                      " below 1e-9 lambda0");
    const double x = k0 * dist;
    const double cos_theta = dipole.dot(r) / dist;
    const double transverse = 1.0 - cos_theta * cos_theta;
    const double near = 1.0 - 3.0 * cos_theta * cos_theta;

    const double turns = dist / lambda0;
    const double s = sin_turns(turns);
    const double co = cos_turns(turns);

    Coupling c;
    c.J = -0.75 * gamma0 *
          (transverse * co / x - near * (s / (x * x) + co / (x * x * x)));
    if (x < green_series_threshold) {
        const double x2 = x * x;
        const double x4 = x2 * x2;
        c.Gamma = 1.5 * gamma0 *
                  (transverse * (1.0 - x2 / 6.0 + x4 / 120.0) +
                   near * (-1.0 / 3.0 + x2 / 30.0 - x4 / 840.0));
    } else {
        c.Gamma = 1.5 * gamma0 *
                  (transverse * s / x + near * (co / (x * x) - s / (x * x * x)));
    }
    return c;
}

struct InteractionMatrices {
    Eigen::MatrixXd J;
    Eigen::MatrixXd Gamma;
};

struct EffectiveHamiltonian {
    Eigen::MatrixXcd H;
    InteractionMatrices couplings;
    ArrayGeometry geometry;

    std::size_t size() const { return static_cast<std::size_t>(H.rows()); }
};

inline InteractionMatrices build_interactions(const ArrayGeometry& geom) {
    const auto n = static_cast<Eigen::Index>(geom.size());
    InteractionMatrices m{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};

    if (geom.environment == Environment::HalfWaveguide) {
        // The mirror makes the diagonal position dependent: J_ii is the
        // image-induced shift, Gamma_ii = gamma0 [1 - cos(2 k0 z_i)].
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j <= i; ++j) {
                const Coupling c = hwg_couplings(geom.positions[i].z(), geom.positions[j].z());
                m.J(i, j) = m.J(j, i) = c.J;
                m.Gamma(i, j) = m.Gamma(j, i) = c.Gamma;
            }
        }
        return m;
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        m.Gamma(i, i) = gamma0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const Coupling c = green_coupling(geom.positions[i] - geom.positions[j], geom.dipole);
            m.J(i, j) = m.J(j, i) = c.J;
            m.Gamma(i, j) = m.Gamma(j, i) = c.Gamma;
        }
    }
    return m;
}

inline EffectiveHamiltonian build_hamiltonian(const ArrayGeometry& geom) {
    geom.validate();
    EffectiveHamiltonian eff;
    eff.geometry = geom;
    eff.couplings = build_interactions(geom);
    const auto& J = eff.couplings.J;
    const auto& G = eff.couplings.Gamma;
    eff.H = J.cast<cplx>() - cplx(0.0, 0.5) * G.cast<cplx>();
    for (Eigen::Index i = 0; i < eff.H.rows(); ++i)
        eff.H(i, i) += geom.detunings[static_cast<std::size_t>(i)];
    return eff;
}

// ------------------------------------------------------------------ export

// Row-major CSV, each entry written as "re,im".
inline void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m) {
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) os << ',';
            std::snprintf(buf, sizeof buf, "%.16e,%.16e", m(i, j).real(), m(i, j).imag());
            os << buf;
        }
        os << '\n';
    }
}

inline nlohmann::json to_json(const EffectiveHamiltonian& eff) {
    const auto n = eff.H.rows();
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    nlohmann::json J = nlohmann::json::array(), G = nlohmann::json::array();
    for (Eigen::Index i = 0; i < n; ++i) {
        nlohmann::json rr, ri, rj, rg;
        for (Eigen::Index j = 0; j < n; ++j) {
            rr.push_back(eff.H(i, j).real());
            ri.push_back(eff.H(i, j).imag());
            rj.push_back(eff.couplings.J(i, j));
            rg.push_back(eff.couplings.Gamma(i, j));
        }
        re.push_back(rr);
        im.push_back(ri);
        J.push_back(rj);
        G.push_back(rg);
    }
    return {{"n", n}, {"H_real", re}, {"H_imag", im}, {"J", J}, {"Gamma", G},
            {"geometry", to_json(eff.geometry)}};
}

} // namespace coopdecay
