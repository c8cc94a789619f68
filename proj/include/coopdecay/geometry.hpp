// geometry.hpp: ordered lattices and their disordered realizations.
//
// Conventions:
//   * half waveguide: chain along z, atom i (1-based) at z = i*a, mirror at z = 0
//   * free space 1D: chain along x, atom i at x = i*a
//   * free space 2D/3D: square/cubic lattice in xy / xyz, sites at (i, j, k)*a
//     with 1-based indices and x running fastest
//   * free-space dipoles point along z (perpendicular to the chain and to the
//     plane; a cube axis in 3D)

#pragma once

#include "coopdecay/error.hpp"
#include "coopdecay/rng.hpp"
#include "coopdecay/units.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coopdecay {

using Vec3 = Eigen::Vector3d;

enum class Environment { HalfWaveguide, FreeSpace1D, FreeSpace2D, FreeSpace3D };

inline std::string_view to_string(Environment env) {
    switch (env) {
    case Environment::HalfWaveguide: return "half_waveguide";
    case Environment::FreeSpace1D: return "free_space_1d";
    case Environment::FreeSpace2D: return "free_space_2d";
    case Environment::FreeSpace3D: return "free_space_3d";
    }
    return "unknown";
}

inline Environment environment_from_string(std::string_view name) {
    if (name == "half_waveguide") return Environment::HalfWaveguide;
    if (name == "free_space_1d") return Environment::FreeSpace1D;
    if (name == "free_space_2d") return Environment::FreeSpace2D;
    if (name == "free_space_3d") return Environment::FreeSpace3D;
    throw ValidationError("unknown environment '" + std::string(name) +
                          "' (expected half_waveguide, free_space_1d, free_space_2d, free_space_3d)");
}

// Number of lattice axes for an environment.
inline std::size_t lattice_rank(Environment env) {
    switch (env) {
    case Environment::FreeSpace2D: return 2;
    case Environment::FreeSpace3D: return 3;
    default: return 1;
    }
}

inline bool is_free_space(Environment env) { return env != Environment::HalfWaveguide; }

struct LatticeSpec {
    Environment environment = Environment::FreeSpace1D;
    std::vector<int> extents{1};
    double spacing = 0.5; // a, lambda0 units

    std::size_t size() const {
        std::size_t n = 1;
        for (int e : extents) n *= static_cast<std::size_t>(e);
        return n;
    }

    void validate() const {
        if (extents.size() != lattice_rank(environment))
            throw ValidationError(std::string(to_string(environment)) + " needs " +
                                  std::to_string(lattice_rank(environment)) + " extent(s), got " +
                                  std::to_string(extents.size()));
        for (int e : extents)
            if (e <= 0) throw ValidationError("extents must be positive");
        if (!(spacing > 0.0) || !std::isfinite(spacing))
            throw ValidationError("a_over_lambda0 must be > 0");
    }
};

struct DisorderSpec {
    double rd_over_a = 0.0;   // positional width as a fraction of a
    double omega_d = 0.0;     // detuning width, gamma0 units
    std::uint64_t seed = 0;
    std::uint64_t realization = 0;

    void validate() const {
        if (!(rd_over_a >= 0.0) || !std::isfinite(rd_over_a))
            throw ValidationError("rd_over_a must be ≥ 0");
        if (!(omega_d >= 0.0) || !std::isfinite(omega_d))
            throw ValidationError("omega_d_over_gamma0 must be ≥ 0");
        if (omega_d > 1.0)
            throw ValidationError("omega_d_over_gamma0 must be ≤ 1 (resonant Green's tensor validity)");
    }

    bool ordered() const { return rd_over_a == 0.0 && omega_d == 0.0; }
};

// Where a disordered geometry came from; carried along for error triage.
struct Provenance {
    std::uint64_t seed = 0;
    std::uint64_t realization = 0;
};

struct ArrayGeometry {
    Environment environment = Environment::FreeSpace1D;
    double spacing = 0.5;
    std::vector<int> extents{1};
    std::vector<Vec3> positions;
    std::vector<double> detunings;
    Vec3 dipole = Vec3::UnitZ();
    std::optional<Provenance> provenance;

    std::size_t size() const { return positions.size(); }

    void validate() const {
        if (positions.empty()) throw ValidationError("geometry has no atoms");
        if (detunings.size() != positions.size())
            throw ValidationError("geometry needs one detuning per atom");
        if (std::abs(dipole.norm() - 1.0) > 1e-12)
            throw ValidationError("dipole must be a unit vector");
        for (const auto& p : positions)
            if (!p.allFinite()) throw ValidationError("non-finite atom position");
        if (environment == Environment::HalfWaveguide)
            for (const auto& p : positions)
                if (!(p.z() > 0.0))
                    throw ValidationError("half waveguide atoms must sit at z > 0");
        for (std::size_t i = 0; i < positions.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if ((positions[i] - positions[j]).norm() < min_separation)
                    throw SingularSeparationError("atoms " + std::to_string(j) + " and " +
                                                  std::to_string(i) + " closer than 1e-9 lambda0");
    }
};

inline ArrayGeometry build_ordered(const LatticeSpec& spec) {
    spec.validate();
    ArrayGeometry geom;
    geom.environment = spec.environment;
    geom.spacing = spec.spacing;
    geom.extents = spec.extents;
    geom.dipole = Vec3::UnitZ();

    const std::size_t n = spec.size();
    geom.positions.reserve(n);
    geom.detunings.assign(n, 0.0);

    const double a = spec.spacing;
    switch (spec.environment) {
    case Environment::HalfWaveguide:
        for (std::size_t i = 1; i <= n; ++i)
            geom.positions.emplace_back(0.0, 0.0, static_cast<double>(i) * a);
        break;
    case Environment::FreeSpace1D:
        for (std::size_t i = 1; i <= n; ++i)
            geom.positions.emplace_back(static_cast<double>(i) * a, 0.0, 0.0);
        break;
    case Environment::FreeSpace2D:
        for (int iy = 1; iy <= spec.extents[1]; ++iy)
            for (int ix = 1; ix <= spec.extents[0]; ++ix)
                geom.positions.emplace_back(ix * a, iy * a, 0.0);
        break;
    case Environment::FreeSpace3D:
        for (int iz = 1; iz <= spec.extents[2]; ++iz)
            for (int iy = 1; iy <= spec.extents[1]; ++iy)
                for (int ix = 1; ix <= spec.extents[0]; ++ix)
                    geom.positions.emplace_back(ix * a, iy * a, iz * a);
        break;
    }
    return geom;
}

// Cartesian axes that carry positional disorder: the chain axis in 1D, the
// lattice plane in 2D, all three in 3D.
inline std::vector<int> disorder_axes(Environment env) {
    switch (env) {
    case Environment::HalfWaveguide: return {2};
    case Environment::FreeSpace1D: return {0};
    case Environment::FreeSpace2D: return {0, 1};
    case Environment::FreeSpace3D: return {0, 1, 2};
    }
    return {};
}

inline constexpr int max_resample_attempts = 1000;

// Offsets every atom by independent uniform draws of width rd*a per lattice
// axis. An atom whose draw lands at z <= 0 (half waveguide) or within
// min_separation of an already displaced atom is redrawn.
inline ArrayGeometry apply_positional_disorder(const ArrayGeometry& geom, const DisorderSpec& dis) {
    dis.validate();
    ArrayGeometry out = geom;
    out.provenance = Provenance{dis.seed, dis.realization};
    if (dis.rd_over_a == 0.0) return out;

    const double width = dis.rd_over_a * geom.spacing;
    const auto axes = disorder_axes(geom.environment);
    Rng rng(dis.seed, dis.realization, Stream::Positions);

    for (std::size_t i = 0; i < geom.size(); ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < max_resample_attempts && !placed; ++attempt) {
            Vec3 candidate = geom.positions[i];
            for (int axis : axes) candidate[axis] += rng.centered(width);

            placed = geom.environment != Environment::HalfWaveguide || candidate.z() > 0.0;
            for (std::size_t j = 0; placed && j < i; ++j)
                placed = (candidate - out.positions[j]).norm() >= min_separation;
            if (placed) out.positions[i] = candidate;
        }
        if (!placed)
            throw DegenerateConfigurationError(
                "could not place atom " + std::to_string(i) + " after " +
                std::to_string(max_resample_attempts) + " draws (seed " + std::to_string(dis.seed) +
                ", realization " + std::to_string(dis.realization) + ")");
    }
    return out;
}

// Overload kept for call sites that carry the lattice description around.
inline ArrayGeometry apply_positional_disorder(const ArrayGeometry& geom, const LatticeSpec& spec,
                                               const DisorderSpec& dis) {
    spec.validate();
    if (spec.environment != geom.environment || spec.size() != geom.size())
        throw ValidationError("lattice spec does not describe this geometry");
    return apply_positional_disorder(geom, dis);
}

inline ArrayGeometry apply_detuning_disorder(const ArrayGeometry& geom, const DisorderSpec& dis) {
    dis.validate();
    ArrayGeometry out = geom;
    out.provenance = Provenance{dis.seed, dis.realization};
    if (dis.omega_d == 0.0) {
        std::fill(out.detunings.begin(), out.detunings.end(), 0.0);
        return out;
    }
    Rng rng(dis.seed, dis.realization, Stream::Detunings);
    for (auto& delta : out.detunings) delta = rng.centered(dis.omega_d);
    return out;
}

// Ordered lattice followed by positional and detuning disorder.
inline ArrayGeometry build_realization(const LatticeSpec& spec, const DisorderSpec& dis) {
    ArrayGeometry geom = apply_positional_disorder(build_ordered(spec), dis);
    return apply_detuning_disorder(geom, dis);
}

// ---------------------------------------------------------------- JSON dump

inline nlohmann::json to_json(const ArrayGeometry& geom) {
    nlohmann::json j;
    j["environment"] = std::string(to_string(geom.environment));
    j["a"] = geom.spacing;
    j["extents"] = geom.extents;
    j["dipole"] = {geom.dipole.x(), geom.dipole.y(), geom.dipole.z()};
    auto& positions = j["positions"] = nlohmann::json::array();
    for (const auto& p : geom.positions) positions.push_back({p.x(), p.y(), p.z()});
    j["detunings"] = geom.detunings;
    return j;
}

inline ArrayGeometry geometry_from_json(const nlohmann::json& j) {
    ArrayGeometry geom;
    try {
        geom.environment = environment_from_string(j.at("environment").get<std::string>());
        geom.spacing = j.at("a").get<double>();
        geom.extents = j.at("extents").get<std::vector<int>>();
        const auto d = j.at("dipole").get<std::array<double, 3>>();
        geom.dipole = Vec3(d[0], d[1], d[2]);
        for (const auto& p : j.at("positions")) {
            const auto xyz = p.get<std::array<double, 3>>();
            geom.positions.emplace_back(xyz[0], xyz[1], xyz[2]);
        }
        geom.detunings = j.at("detunings").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed geometry JSON: ") + e.what());
    }
    geom.validate();
    return geom;
}

} // namespace coopdecay
