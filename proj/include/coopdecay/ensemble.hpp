// ensemble.hpp: disorder realizations, parameter sweeps and their statistics.
//
// Populations are averaged geometrically by default; every other observable
// uses the arithmetic mean. Each aggregate also keeps the minimum and maximum
// over realizations and the standard error of the arithmetic mean.
//
// Realizations run on a small worker pool. Results land in a slot per
// realization index and are folded single-threaded in index order, so
// aggregates do not depend on thread count or completion order.

#pragma once

#include "coopdecay/dynamics.hpp"
#include "coopdecay/entanglement.hpp"
#include "coopdecay/error.hpp"
#include "coopdecay/geometry.hpp"
#include "coopdecay/interactions.hpp"
#include "coopdecay/rng.hpp"
#include "coopdecay/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <initializer_list>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace coopdecay {

// ---------------------------------------------------------------- statistics

// Populations at or below this are floored before taking logarithms.
inline constexpr double geometric_floor = 1e-300;

struct Statistics {
    double mean_arith = 0.0;
    double mean_geom = 0.0;
    double minimum = 0.0;
    double maximum = 0.0;
    double standard_error = 0.0;
    std::size_t count = 0;
    std::size_t floored = 0; // values raised to geometric_floor for the geometric mean
};

inline Statistics summarize(std::span<const double> values) {
    if (values.empty()) throw ValidationError("cannot summarize an empty sample");
    Statistics s;
    s.count = values.size();
    s.minimum = *std::min_element(values.begin(), values.end());
    s.maximum = *std::max_element(values.begin(), values.end());

    double sum = 0.0, log_sum = 0.0;
    for (double v : values) {
        sum += v;
        if (v <= geometric_floor) {
            ++s.floored;
            log_sum += std::log(geometric_floor);
        } else {
            log_sum += std::log(v);
        }
    }
    const double n = static_cast<double>(values.size());
    s.mean_arith = sum / n;
    if (s.minimum == s.maximum) {
        s.mean_arith = s.mean_geom = s.minimum;
    } else {
        s.mean_arith = std::clamp(s.mean_arith, s.minimum, s.maximum);
        // exp/log rounding can push the geometric mean an ulp past its bounds,
        // and the floor can lift it above an all-but-zero arithmetic mean
        s.mean_geom = std::clamp(std::exp(log_sum / n), s.minimum, s.mean_arith);
    }

    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean_arith) * (v - s.mean_arith);
        s.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return s;
}

// Per-column statistics of a rows x columns table stored row-wise.
inline std::vector<Statistics> summarize_columns(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    const std::size_t cols = rows.front().size();
    std::vector<Statistics> out;
    out.reserve(cols);
    std::vector<double> column(rows.size());
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows.size(); ++r) column[r] = rows[r].at(c);
        out.push_back(summarize(column));
    }
    return out;
}

// ---------------------------------------------------------------- worker pool

inline unsigned default_thread_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

// Runs job(i) for i in [0, count) on up to `threads` workers. The exception of
// the lowest failing index is rethrown after all workers finish.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& job) {
    if (count == 0) return;
    threads = std::max(1u, std::min<unsigned>(threads == 0 ? default_thread_count() : threads,
                                               static_cast<unsigned>(count)));
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::size_t failed_index = std::numeric_limits<std::size_t>::max();
    std::exception_ptr failure;

    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------- realizations

struct InitialState {
    enum class Kind { RandomPhase, Site } kind = Kind::RandomPhase;
    std::size_t site = 1; // 1-based, used by Kind::Site

    static InitialState random_phase() { return {}; }
    static InitialState excite(std::size_t j) { return {Kind::Site, j}; }
};

inline SingleExcitationState make_initial_state(const InitialState& init, std::size_t n,
                                                const DisorderSpec& dis) {
    if (init.kind == InitialState::Kind::Site) return site_excitation_state(n, init.site);
    Rng rng(dis.seed, dis.realization, Stream::InitialState);
    return random_phase_state(n, rng);
}

enum class Observable : unsigned {
    SlowestRate = 1u << 0,
    DecaySpectrum = 1u << 1,
    Ipr = 1u << 2,
    Population = 1u << 3,
    Spectrum = 1u << 4,
    MutualInfo = 1u << 5,
};

struct ObservableSet {
    unsigned bits = 0;

    ObservableSet() = default;
    ObservableSet(std::initializer_list<Observable> list) {
        for (auto o : list) bits |= static_cast<unsigned>(o);
    }
    bool has(Observable o) const { return (bits & static_cast<unsigned>(o)) != 0; }
    // Observables that depend on the random initial state.
    bool needs_state() const {
        return has(Observable::Population) || has(Observable::Spectrum) ||
               has(Observable::MutualInfo);
    }
};

struct ObservableRequest {
    ObservableSet observables{Observable::SlowestRate};
    InitialState init;
    std::vector<double> times;       // population / mutual information grid
    std::vector<double> omega;       // spectrum grid
    double t_prime = 100.0;          // spectrum evaluation time
};

struct RealizationRecord {
    std::uint64_t index = 0;
    double slowest_rate = 0.0;
    std::vector<double> decay_rates;  // sorted, fastest first
    std::vector<double> iprs;         // same order
    std::vector<double> population;
    std::vector<double> spectrum;
    std::vector<double> mutual_info;
    std::size_t flagged_spectrum_points = 0;
    bool ill_conditioned = false;
};

inline RealizationRecord run_realization(const LatticeSpec& spec, const DisorderSpec& dis,
                                         const ObservableRequest& req) {
    const ArrayGeometry geom = build_realization(spec, dis);
    const EffectiveHamiltonian eff = build_hamiltonian(geom);
    const ModeDecomposition dec = decompose(eff);

    RealizationRecord rec;
    rec.index = dis.realization;
    rec.ill_conditioned = dec.ill_conditioned;
    rec.slowest_rate = slowest_rate(dec);
    if (req.observables.has(Observable::DecaySpectrum))
        rec.decay_rates.assign(dec.decay_rates.begin(), dec.decay_rates.end());
    if (req.observables.has(Observable::Ipr)) rec.iprs.assign(dec.iprs.begin(), dec.iprs.end());

    if (!req.observables.needs_state()) return rec;
    const SingleExcitationState state0 = make_initial_state(req.init, geom.size(), dis);

    if (req.observables.has(Observable::Population)) {
        for (const auto& s : population_curve(state0, dec, req.times)) rec.population.push_back(s.p_exc);
    }
    if (req.observables.has(Observable::MutualInfo)) {
        const auto cut = BipartiteCut::half_chain(geom.size());
        for (const auto& s : mutual_information_curve(state0, dec, cut, req.times))
            rec.mutual_info.push_back(s.info);
    }
    if (req.observables.has(Observable::Spectrum)) {
        const auto late = propagate(state0, dec, req.t_prime);
        const auto spectrum = fluorescence_spectrum(late, dec, geom, req.omega);
        rec.spectrum = spectrum.S;
        rec.flagged_spectrum_points =
            static_cast<std::size_t>(std::count(spectrum.flagged.begin(), spectrum.flagged.end(), true));
    }
    return rec;
}

// One record per entry of `disorder`, in the same order.
inline std::vector<RealizationRecord> run_realizations(const LatticeSpec& spec,
                                                       const std::vector<DisorderSpec>& disorder,
                                                       const ObservableRequest& req,
                                                       unsigned threads = 0) {
    spec.validate();
    for (const auto& d : disorder) d.validate();
    std::vector<RealizationRecord> records(disorder.size());
    parallel_for(disorder.size(), threads,
                 [&](std::size_t i) { records[i] = run_realization(spec, disorder[i], req); });
    return records;
}

// Disorder specs for realizations 0..count-1 sharing one seed.
inline std::vector<DisorderSpec> disorder_realizations(double rd_over_a, double omega_d,
                                                       std::uint64_t seed, std::size_t count) {
    std::vector<DisorderSpec> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = {rd_over_a, omega_d, seed, k};
    return out;
}

// ---------------------------------------------------------------- sweeps

enum class SweepAxis { LatticeSpacing, DisorderStrength, DetuningWidth, SystemSize };

inline std::string_view to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::LatticeSpacing: return "lattice_spacing";
    case SweepAxis::DisorderStrength: return "disorder_strength";
    case SweepAxis::DetuningWidth: return "detuning_width";
    case SweepAxis::SystemSize: return "system_size";
    }
    return "unknown";
}

inline SweepAxis sweep_axis_from_string(std::string_view name) {
    if (name == "lattice_spacing") return SweepAxis::LatticeSpacing;
    if (name == "disorder_strength") return SweepAxis::DisorderStrength;
    if (name == "detuning_width") return SweepAxis::DetuningWidth;
    if (name == "system_size") return SweepAxis::SystemSize;
    throw ValidationError("unknown sweep_axis '" + std::string(name) + "'");
}

// Scalar extracted from each realization of a sweep.
enum class SweepObservable { SlowestRate, SlowModeIpr };

struct DisorderLevel {
    double rd_over_a = 0.0;
    double omega_d = 0.0;
    bool ordered() const { return rd_over_a == 0.0 && omega_d == 0.0; }
};

struct SweepSpec {
    LatticeSpec base;
    SweepAxis axis = SweepAxis::LatticeSpacing;
    std::vector<double> values;
    std::vector<DisorderLevel> levels{DisorderLevel{}};
    std::size_t realizations = 100;
    std::uint64_t seed = 0;
    SweepObservable observable = SweepObservable::SlowestRate;
    std::size_t slow_modes = 10; // for SlowModeIpr
    unsigned threads = 0;
    bool keep_raw = false;

    void validate() const {
        if (values.empty()) throw ValidationError("sweep values must be non-empty");
        const bool up = values.size() < 2 || values[1] > values[0];
        for (std::size_t i = 1; i < values.size(); ++i)
            if (up ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1]))
                throw ValidationError("sweep values must be strictly monotone");
        if (realizations < 1) throw ValidationError("realizations must be >= 1");
        if (levels.empty()) throw ValidationError("sweep needs at least one disorder level");
        for (const auto& l : levels) DisorderSpec{l.rd_over_a, l.omega_d}.validate();
        if (axis == SweepAxis::SystemSize)
            for (double v : values)
                if (v < 1 || v != std::floor(v))
                    throw ValidationError("system_size sweep values must be positive integers");
    }
};

struct SummaryPoint {
    double axis_value = 0.0;
    double rd_over_a = 0.0;
    double omega_d = 0.0;
    std::size_t n_atoms = 0;
    Statistics stats;
    std::vector<double> raw; // per realization, only when requested
};

struct EnsembleSummary {
    SweepAxis axis = SweepAxis::LatticeSpacing;
    std::vector<SummaryPoint> points;
};

// Points are laid out value-major: all levels of values[0], then values[1]...
inline std::uint64_t sweep_point_seed(std::uint64_t master, std::size_t value_index,
                                      std::size_t level_index) {
    return splitmix64(splitmix64(master ^ splitmix64(value_index + 1)) ^ (level_index + 1));
}

namespace detail {

struct SweepJob {
    std::size_t point;
    LatticeSpec lattice;
    DisorderSpec disorder;
};

inline LatticeSpec lattice_at(const SweepSpec& sweep, double value) {
    LatticeSpec spec = sweep.base;
    if (sweep.axis == SweepAxis::LatticeSpacing) spec.spacing = value;
    if (sweep.axis == SweepAxis::SystemSize)
        std::fill(spec.extents.begin(), spec.extents.end(), static_cast<int>(value));
    return spec;
}

inline DisorderLevel level_at(const SweepSpec& sweep, const DisorderLevel& level, double value) {
    DisorderLevel out = level;
    if (sweep.axis == SweepAxis::DisorderStrength) out.rd_over_a = value;
    if (sweep.axis == SweepAxis::DetuningWidth) out.omega_d = value;
    return out;
}

} // namespace detail

inline EnsembleSummary run_sweep(const SweepSpec& sweep) {
    sweep.validate();
    EnsembleSummary summary;
    summary.axis = sweep.axis;

    std::vector<detail::SweepJob> jobs;
    for (std::size_t v = 0; v < sweep.values.size(); ++v) {
        for (std::size_t l = 0; l < sweep.levels.size(); ++l) {
            const double value = sweep.values[v];
            const LatticeSpec lattice = detail::lattice_at(sweep, value);
            lattice.validate();
            const DisorderLevel level = detail::level_at(sweep, sweep.levels[l], value);

            SummaryPoint point;
            point.axis_value = value;
            point.rd_over_a = level.rd_over_a;
            point.omega_d = level.omega_d;
            point.n_atoms = lattice.size();
            const std::size_t index = summary.points.size();
            summary.points.push_back(point);

            // Ordered geometries carry no randomness, one realization is exact.
            const std::size_t count = level.ordered() ? 1 : sweep.realizations;
            const std::uint64_t seed = sweep_point_seed(sweep.seed, v, l);
            for (std::size_t k = 0; k < count; ++k)
                jobs.push_back({index, lattice, DisorderSpec{level.rd_over_a, level.omega_d, seed, k}});
        }
    }

    ObservableRequest req;
    req.observables = sweep.observable == SweepObservable::SlowestRate
                          ? ObservableSet{Observable::SlowestRate}
                          : ObservableSet{Observable::Ipr};
    std::vector<double> results(jobs.size());
    parallel_for(jobs.size(), sweep.threads, [&](std::size_t i) {
        const auto rec = run_realization(jobs[i].lattice, jobs[i].disorder, req);
        if (sweep.observable == SweepObservable::SlowestRate) {
            results[i] = rec.slowest_rate;
        } else {
            const std::size_t m = std::min(sweep.slow_modes, rec.iprs.size());
            double sum = 0.0;
            for (std::size_t j = rec.iprs.size() - m; j < rec.iprs.size(); ++j) sum += rec.iprs[j];
            results[i] = sum / static_cast<double>(m);
        }
    });

    std::vector<std::vector<double>> per_point(summary.points.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) per_point[jobs[i].point].push_back(results[i]);
    for (std::size_t p = 0; p < summary.points.size(); ++p) {
        summary.points[p].stats = summarize(per_point[p]);
        if (sweep.keep_raw) summary.points[p].raw = std::move(per_point[p]);
    }
    return summary;
}

inline EnsembleSummary sweep_slowest_rate(SweepSpec sweep) {
    sweep.observable = SweepObservable::SlowestRate;
    return run_sweep(sweep);
}

// Ordered slowest rate vs lattice spacing for several array sizes. `sizes`
// are side lengths: N = size^dims.
inline EnsembleSummary size_scaling_sweep(int dims, const std::vector<int>& sizes,
                                          const std::vector<double>& spacings, unsigned threads = 0) {
    if (dims < 1 || dims > 3) throw ValidationError("dims must be 1, 2 or 3");
    if (sizes.empty()) throw ValidationError("size list must be non-empty");
    EnsembleSummary summary;
    summary.axis = SweepAxis::LatticeSpacing;
    for (int side : sizes) {
        SweepSpec sweep;
        sweep.base.environment = dims == 1   ? Environment::FreeSpace1D
                                 : dims == 2 ? Environment::FreeSpace2D
                                             : Environment::FreeSpace3D;
        sweep.base.extents.assign(static_cast<std::size_t>(dims), side);
        sweep.axis = SweepAxis::LatticeSpacing;
        sweep.values = spacings;
        sweep.realizations = 1;
        sweep.threads = threads;
        auto part = run_sweep(sweep);
        for (auto& p : part.points) summary.points.push_back(std::move(p));
    }
    return summary;
}

// Midpoint of the interval with the steepest drop in log10(rate) between
// adjacent grid points, scanning in ascending grid order.
inline double steepest_drop(const std::vector<double>& grid, const std::vector<double>& rates) {
    if (grid.size() != rates.size() || grid.size() < 2)
        throw ValidationError("steepest_drop needs matching grids of >= 2 points");
    double best = -std::numeric_limits<double>::infinity();
    double where = grid.front();
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double lo = std::log10(std::max(rates[i - 1], geometric_floor));
        const double hi = std::log10(std::max(rates[i], geometric_floor));
        // rate grows with spacing across the transition
        const double jump = grid[i] > grid[i - 1] ? hi - lo : lo - hi;
        if (jump > best) {
            best = jump;
            where = 0.5 * (grid[i] + grid[i - 1]);
        }
    }
    return where;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    if (points < 2 || !(lo > 0.0) || !(hi > lo))
        throw ValidationError("log grid needs >= 2 points and 0 < lo < hi");
    std::vector<double> grid(points);
    const double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = lo * std::exp(step * static_cast<double>(i));
    grid.back() = hi;
    return grid;
}

// ---------------------------------------------------------------- population

struct PopulationEnsemble {
    std::vector<double> times;
    std::vector<std::vector<double>> trajectories; // [trajectory][time]
    std::vector<Statistics> per_time;              // mean_geom is the headline
};

// Each trajectory draws its own disorder and initial state from its spec.
inline PopulationEnsemble population_ensemble(const LatticeSpec& spec,
                                              const std::vector<DisorderSpec>& disorder,
                                              const std::vector<double>& times,
                                              const InitialState& init, unsigned threads = 0) {
    if (disorder.empty()) throw ValidationError("population ensemble needs >= 1 trajectory");
    ObservableRequest req;
    req.observables = {Observable::Population};
    req.init = init;
    req.times = times;
    const auto records = run_realizations(spec, disorder, req, threads);
    PopulationEnsemble out;
    out.times = times;
    for (const auto& r : records) out.trajectories.push_back(r.population);
    out.per_time = summarize_columns(out.trajectories);
    return out;
}

} // namespace coopdecay
