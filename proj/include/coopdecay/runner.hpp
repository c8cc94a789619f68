// runner.hpp: executes one configured experiment and writes its artifacts.
//
// Every CSV is a pure function of (config, seed, version). manifest.json adds
// wall time and so is the only file that changes between identical reruns.

#pragma once

#include "coopdecay/config.hpp"
#include "coopdecay/csv.hpp"
#include "coopdecay/dynamics.hpp"
#include "coopdecay/ensemble.hpp"
#include "coopdecay/entanglement.hpp"
#include "coopdecay/error.hpp"
#include "coopdecay/interactions.hpp"
#include "coopdecay/spectral.hpp"
#include "coopdecay/version.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace coopdecay {

struct RunResult {
    std::vector<std::string> outputs; // file names written, manifest last
    nlohmann::json notes = nlohmann::json::object();
};

namespace detail {

namespace fs = std::filesystem;

inline std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_json_file(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

inline std::vector<DisorderSpec> trajectories(const RunConfig& cfg, std::size_t count) {
    const auto& level = cfg.disorder.front();
    return disorder_realizations(level.rd_over_a, level.omega_d, cfg.seed, count);
}

// Ordered runs with a deterministic initial state need only one realization.
inline std::size_t trajectory_count(const RunConfig& cfg, bool state_is_random) {
    if (cfg.disorder.front().ordered() && !state_is_random) return 1;
    return cfg.realizations;
}

inline void write_modes(const fs::path& dir, const ModeDecomposition& dec, RunResult& result) {
    {
        CsvWriter csv(dir / "modes.csv");
        csv.header({"n_sorted", "re_E", "im_E", "decay_rate", "ipr", "residual"});
        for (Eigen::Index k = 0; k < dec.eigenvalues.size(); ++k)
            csv.row(static_cast<long long>(k + 1), dec.eigenvalues(k).real(), dec.eigenvalues(k).imag(),
                    dec.decay_rates(k), dec.iprs(k), dec.residuals(k));
    }
    {
        const Eigen::MatrixXd table = mode_profile_table(dec);
        CsvWriter csv(dir / "profiles.csv");
        csv.header({"n_sorted", "j", "abs_psi"});
        for (Eigen::Index k = 0; k < table.cols(); ++k)
            for (Eigen::Index j = 0; j < table.rows(); ++j)
                csv.row(static_cast<long long>(k + 1), static_cast<long long>(j + 1), table(j, k));
    }
    result.outputs.push_back("modes.csv");
    result.outputs.push_back("profiles.csv");
}

inline void run_modes(const RunConfig& cfg, const fs::path& dir, RunResult& result) {
    ArrayGeometry geom;
    if (cfg.geometry_file) {
        geom = geometry_from_json(nlohmann::json::parse(read_text_file(*cfg.geometry_file)));
    } else {
        const auto& level = cfg.disorder.front();
        geom = build_realization(cfg.lattice, DisorderSpec{level.rd_over_a, level.omega_d, cfg.seed, 0});
    }
    const EffectiveHamiltonian eff = build_hamiltonian(geom);
    const ModeDecomposition dec = decompose(eff);
    write_modes(dir, dec, result);

    write_json_file(dir / "geometry.json", to_json(geom));
    result.outputs.push_back("geometry.json");
    if (cfg.export_hamiltonian) {
        std::ofstream out(dir / "hamiltonian.csv", std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write hamiltonian.csv");
        write_matrix_csv(out, eff.H);
        write_json_file(dir / "hamiltonian.json", to_json(eff));
        result.outputs.push_back("hamiltonian.csv");
        result.outputs.push_back("hamiltonian.json");
    }
    result.notes["eigvec_condition"] = dec.eigvec_condition;
    result.notes["ill_conditioned"] = dec.ill_conditioned;
    result.notes["certified"] = dec.certified;
    result.notes["modes_at_machine_epsilon"] =
        std::count(dec.at_machine_epsilon.begin(), dec.at_machine_epsilon.end(), true);

    // Realization-averaged decay spectrum and IPRs.
    if (cfg.geometry_file) return;
    const std::size_t count = trajectory_count(cfg, false);
    ObservableRequest req;
    req.observables = {Observable::DecaySpectrum, Observable::Ipr};
    const auto records = run_realizations(cfg.lattice, trajectories(cfg, count), req, cfg.threads);
    std::vector<std::vector<double>> rates, iprs;
    for (const auto& r : records) {
        rates.push_back(r.decay_rates);
        iprs.push_back(r.iprs);
    }
    const auto rate_stats = summarize_columns(rates);
    const auto ipr_stats = summarize_columns(iprs);
    CsvWriter csv(dir / "decay_spectrum.csv");
    csv.header({"n_sorted", "mean_rate", "rate_stderr", "min_rate", "max_rate", "mean_ipr",
                "ipr_stderr", "n_realizations"});
    for (std::size_t k = 0; k < rate_stats.size(); ++k)
        csv.row(static_cast<long long>(k + 1), rate_stats[k].mean_arith, rate_stats[k].standard_error,
                rate_stats[k].minimum, rate_stats[k].maximum, ipr_stats[k].mean_arith,
                ipr_stats[k].standard_error, static_cast<long long>(rate_stats[k].count));
    result.outputs.push_back("decay_spectrum.csv");
}

inline void write_summary_rows(CsvWriter& csv, const SummaryPoint& p, bool with_size) {
    const auto& s = p.stats;
    if (with_size)
        csv.row(static_cast<long long>(p.n_atoms), p.axis_value, p.rd_over_a, p.omega_d, s.mean_arith,
                s.mean_geom, s.minimum, s.maximum, s.standard_error, static_cast<long long>(s.count));
    else
        csv.row(p.axis_value, p.rd_over_a, p.omega_d, s.mean_arith, s.mean_geom, s.minimum, s.maximum,
                s.standard_error, static_cast<long long>(s.count));
}

inline void run_sweep_experiment(const RunConfig& cfg, const fs::path& dir, RunResult& result) {
    SweepSpec sweep;
    sweep.base = cfg.lattice;
    sweep.axis = cfg.sweep_axis;
    sweep.values = cfg.sweep_values;
    sweep.levels = cfg.disorder;
    sweep.realizations = cfg.realizations;
    sweep.seed = cfg.seed;
    sweep.observable = cfg.sweep_observable;
    sweep.slow_modes = cfg.slow_modes;
    sweep.threads = cfg.threads;
    sweep.keep_raw = cfg.keep_raw;
    const EnsembleSummary summary = run_sweep(sweep);

    CsvWriter csv(dir / "sweep.csv");
    csv.header({"axis_value", "r_d_over_a", "omega_d", "mean_arith", "mean_geom", "minimum", "maximum",
                "stderr", "n_realizations"});
    for (const auto& p : summary.points) write_summary_rows(csv, p, false);
    result.outputs.push_back("sweep.csv");

    if (cfg.keep_raw) {
        CsvWriter raw(dir / "sweep_raw.csv");
        raw.header({"axis_value", "r_d_over_a", "omega_d", "realization", "value"});
        for (const auto& p : summary.points)
            for (std::size_t k = 0; k < p.raw.size(); ++k)
                raw.row(p.axis_value, p.rd_over_a, p.omega_d, static_cast<long long>(k), p.raw[k]);
        result.outputs.push_back("sweep_raw.csv");
    }
    result.notes["sweep_axis"] = std::string(to_string(cfg.sweep_axis));
    result.notes["observable"] =
        cfg.sweep_observable == SweepObservable::SlowestRate ? "slowest_rate" : "slow_mode_ipr";
}

inline void run_scaling(const RunConfig& cfg, const fs::path& dir, RunResult& result) {
    const EnsembleSummary summary =
        size_scaling_sweep(cfg.scaling_dims, cfg.scaling_sizes, cfg.sweep_values, cfg.threads);
    CsvWriter csv(dir / "scaling.csv");
    csv.header({"n_atoms", "axis_value", "r_d_over_a", "omega_d", "mean_arith", "mean_geom", "minimum",
                "maximum", "stderr", "n_realizations"});
    for (const auto& p : summary.points) write_summary_rows(csv, p, true);
    result.outputs.push_back("scaling.csv");

    nlohmann::json midpoints = nlohmann::json::object();
    for (int side : cfg.scaling_sizes) {
        std::vector<double> grid, rates;
        std::size_t n_atoms = 1;
        for (int d = 0; d < cfg.scaling_dims; ++d) n_atoms *= static_cast<std::size_t>(side);
        for (const auto& p : summary.points)
            if (p.n_atoms == n_atoms) {
                grid.push_back(p.axis_value);
                rates.push_back(p.stats.mean_arith);
            }
        if (grid.size() >= 2) midpoints[std::to_string(n_atoms)] = steepest_drop(grid, rates);
    }
    result.notes["steepest_drop_a_over_lambda0"] = midpoints;
}

inline void run_evolve(const RunConfig& cfg, const fs::path& dir, RunResult& result) {
    const bool random = cfg.init.kind == InitialState::Kind::RandomPhase;
    const std::size_t count = trajectory_count(cfg, random);
    const auto ensemble = population_ensemble(cfg.lattice, trajectories(cfg, count), cfg.times, cfg.init,
                                              cfg.threads);
    {
        CsvWriter csv(dir / "population.csv");
        csv.header({"t", "p_exc", "trajectory_id"});
        for (std::size_t k = 0; k < ensemble.trajectories.size(); ++k)
            for (std::size_t i = 0; i < ensemble.times.size(); ++i)
                csv.row(ensemble.times[i], ensemble.trajectories[k][i], static_cast<long long>(k));
    }
    std::size_t floored = 0;
    {
        CsvWriter csv(dir / "population_mean.csv");
        csv.header({"t", "mean_geom", "mean_arith", "minimum", "maximum", "n_trajectories"});
        for (std::size_t i = 0; i < ensemble.times.size(); ++i) {
            const auto& s = ensemble.per_time[i];
            floored += s.floored;
            csv.row(ensemble.times[i], s.mean_geom, s.mean_arith, s.minimum, s.maximum,
                    static_cast<long long>(s.count));
        }
    }
    result.outputs.push_back("population.csv");
    result.outputs.push_back("population_mean.csv");
    result.notes["geometric_mean_floored_values"] = floored;
}

inline void run_spectrum(const RunConfig& cfg, const fs::path& dir, RunResult& result) {
    const bool random = cfg.init.kind == InitialState::Kind::RandomPhase;
    const std::size_t count = trajectory_count(cfg, random);
    ObservableRequest req;
    req.observables = {Observable::Spectrum};
    req.init = cfg.init;
    req.omega = cfg.omega;
    req.t_prime = cfg.t_prime;
    const auto records = run_realizations(cfg.lattice, trajectories(cfg, count), req, cfg.threads);
    std::vector<std::vector<double>> rows;
    std::size_t flagged = 0;
    for (const auto& r : records) {
        rows.push_back(r.spectrum);
        flagged += r.flagged_spectrum_points;
    }
    const auto stats = summarize_columns(rows);
    CsvWriter csv(dir / "spectrum.csv");
    csv.header({"omega", "S", "t_prime"});
    for (std::size_t i = 0; i < cfg.omega.size(); ++i) csv.row(cfg.omega[i], stats[i].mean_arith, cfg.t_prime);
    result.outputs.push_back("spectrum.csv");
    result.notes["flagged_spectrum_points"] = flagged;
    result.notes["spectrum_realizations"] = records.size();
}

inline void run_mutualinfo(const RunConfig& cfg, const fs::path& dir, RunResult& result) {
    const bool random = cfg.init.kind == InitialState::Kind::RandomPhase;
    const std::size_t count = trajectory_count(cfg, random);
    ObservableRequest req;
    req.observables = {Observable::MutualInfo};
    req.init = cfg.init;
    req.times = cfg.times;
    const auto records = run_realizations(cfg.lattice, trajectories(cfg, count), req, cfg.threads);
    const auto cut = BipartiteCut::half_chain(cfg.lattice.size());
    const std::string header = "log_base=e (nats); cut " + cut.describe() + " (1-based sites)";
    {
        CsvWriter csv(dir / "mutualinfo.csv");
        csv.comment(header);
        csv.header({"t", "I", "trajectory_id"});
        for (std::size_t k = 0; k < records.size(); ++k)
            for (std::size_t i = 0; i < cfg.times.size(); ++i)
                csv.row(cfg.times[i], records[k].mutual_info[i], static_cast<long long>(k));
    }
    std::vector<std::vector<double>> rows;
    for (const auto& r : records) rows.push_back(r.mutual_info);
    const auto stats = summarize_columns(rows);
    {
        CsvWriter csv(dir / "mutualinfo_mean.csv");
        csv.comment(header);
        csv.header({"t", "mean_I", "stderr", "n_trajectories"});
        for (std::size_t i = 0; i < cfg.times.size(); ++i)
            csv.row(cfg.times[i], stats[i].mean_arith, stats[i].standard_error,
                    static_cast<long long>(stats[i].count));
    }
    result.outputs.push_back("mutualinfo.csv");
    result.outputs.push_back("mutualinfo_mean.csv");
}

} // namespace detail

inline nlohmann::json manifest_json(const RunConfig& cfg, const RunResult& result, double wall_seconds) {
    nlohmann::json m;
    m["tool"] = "coopdecay";
    m["version"] = COOPDECAY_VERSION;
    m["experiment"] = std::string(to_string(cfg.experiment));
    m["seed"] = cfg.seed;
    m["threads"] = cfg.threads;
    m["wall_time_seconds"] = wall_seconds;
    m["config"] = cfg.entries;
    m["config_text"] = cfg.canonical_text();
    m["outputs"] = result.outputs;
    m["notes"] = result.notes;
    m["units"] = {{"rate", "gamma0"}, {"length", "lambda0"}, {"time", "1/gamma0"},
                  {"frequency", "shift from omega0 in gamma0"}};
    return m;
}

// Rebuilds the configuration echoed in a manifest.
inline RunConfig config_from_manifest(const nlohmann::json& manifest) {
    return parse_config(manifest.at("config_text").get<std::string>());
}

// Throws on failure; the caller turns the exception into an error record.
inline RunResult run(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

    RunResult result;
    switch (cfg.experiment) {
    case Experiment::Modes: detail::run_modes(cfg, dir, result); break;
    case Experiment::Sweep: detail::run_sweep_experiment(cfg, dir, result); break;
    case Experiment::Evolve: detail::run_evolve(cfg, dir, result); break;
    case Experiment::Spectrum: detail::run_spectrum(cfg, dir, result); break;
    case Experiment::MutualInfo: detail::run_mutualinfo(cfg, dir, result); break;
    case Experiment::Scaling: detail::run_scaling(cfg, dir, result); break;
    }
    result.outputs.push_back("manifest.json");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail::write_json_file(dir / "manifest.json", manifest_json(cfg, result, wall));
    return result;
}

// Machine-readable failure description.
inline nlohmann::json error_record(const std::exception& e) {
    nlohmann::json j;
    j["status"] = "error";
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        j["kind"] = err->kind();
        if (const auto* pe = dynamic_cast<const ParseError*>(&e)) j["line"] = pe->line();
    } else {
        j["kind"] = "internal";
    }
    j["message"] = e.what();
    j["version"] = COOPDECAY_VERSION;
    return j;
}

// Runs and reports: exit status 0 on success; otherwise writes error.json
// into the output directory (when possible) and the record to `err`.
inline int run_and_report(const RunConfig& cfg, std::ostream& err) {
    try {
        run(cfg);
        return 0;
    } catch (const std::exception& e) {
        const auto record = error_record(e);
        err << record.dump() << '\n';
        std::error_code ec;
        if (std::filesystem::is_directory(cfg.out_dir, ec)) {
            std::ofstream out(std::filesystem::path(cfg.out_dir) / "error.json", std::ios::trunc);
            out << record.dump(2) << '\n';
        }
        return 1;
    }
}

} // namespace coopdecay
