// config.hpp: plain-text run configuration.
//
// Format: `key = value` entries, one or more per line separated by commas;
// lists are written in brackets, `rd_over_a = [0, 0.1, 0.5, 1.0]`; `#` starts
// a comment. Unknown or repeated keys are errors. Physical quantities carry
// their unit in the key name (a_over_lambda0, rd_over_a, t_max_gamma0, ...).

#pragma once

#include "coopdecay/ensemble.hpp"
#include "coopdecay/error.hpp"
#include "coopdecay/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace coopdecay {

enum class Experiment { Modes, Sweep, Evolve, Spectrum, MutualInfo, Scaling };

inline std::string_view to_string(Experiment e) {
    switch (e) {
    case Experiment::Modes: return "modes";
    case Experiment::Sweep: return "sweep";
    case Experiment::Evolve: return "evolve";
    case Experiment::Spectrum: return "spectrum";
    case Experiment::MutualInfo: return "mutualinfo";
    case Experiment::Scaling: return "scaling";
    }
    return "unknown";
}

struct RunConfig {
    Experiment experiment = Experiment::Modes;
    LatticeSpec lattice;
    std::vector<DisorderLevel> disorder{DisorderLevel{}};
    std::size_t realizations = 100;
    std::uint64_t seed = 0;
    unsigned threads = 0; // 0: machine parallelism
    InitialState init;
    std::vector<double> times;
    double t_prime = 100.0;
    std::vector<double> omega;
    SweepAxis sweep_axis = SweepAxis::LatticeSpacing;
    std::vector<double> sweep_values;
    SweepObservable sweep_observable = SweepObservable::SlowestRate;
    std::size_t slow_modes = 10;
    bool keep_raw = false;
    int scaling_dims = 1;
    std::vector<int> scaling_sizes;
    std::optional<std::string> geometry_file;
    bool export_hamiltonian = false;
    std::string out_dir = ".";

    // Every accepted key with its value as written, sorted by key.
    std::map<std::string, std::string> entries;

    // Canonical `key = value` text; parsing it yields an equivalent config.
    std::string canonical_text() const {
        std::string text;
        for (const auto& [k, v] : entries) text += k + " = " + v + "\n";
        return text;
    }
};

namespace detail {

struct RawValue {
    std::vector<std::string> items;
    bool is_list = false;
    std::size_t line = 0;
    std::string text; // as written, trimmed
};

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Splits on commas outside brackets.
inline std::vector<std::string> split_top_level(std::string_view line, std::size_t line_no) {
    std::vector<std::string> parts;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '[') ++depth;
        if (line[i] == ']' && --depth < 0) throw ParseError(line_no, "unbalanced ']'");
        if (line[i] == ',' && depth == 0) {
            parts.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    if (depth != 0) throw ParseError(line_no, "unterminated '['");
    parts.push_back(trim(line.substr(start)));
    return parts;
}

inline const std::set<std::string, std::less<>>& known_keys() {
    static const std::set<std::string, std::less<>> keys{
        "experiment", "environment", "n", "extents", "a_over_lambda0", "rd_over_a",
        "omega_d_over_gamma0", "realizations", "seed", "threads", "initial_state",
        "initial_site", "t_min_gamma0", "t_max_gamma0", "t_points", "t_grid", "times_gamma0",
        "t_prime_gamma0", "omega_min_over_gamma0", "omega_max_over_gamma0", "omega_points",
        "sweep_axis", "sweep_values", "sweep_min", "sweep_max", "sweep_points", "sweep_grid",
        "sweep_observable", "slow_modes", "keep_raw", "dims", "sizes", "geometry_file",
        "export_hamiltonian", "out_dir"};
    return keys;
}

class RawConfig {
public:
    explicit RawConfig(std::map<std::string, RawValue> values) : values_(std::move(values)) {}

    bool has(std::string_view key) const { return values_.count(std::string(key)) != 0; }

    const RawValue& at(std::string_view key) const { return values_.at(std::string(key)); }

    std::string scalar(std::string_view key) const {
        const auto& v = at(key);
        if (v.is_list) throw ValidationError(std::string(key) + " expects a single value, not a list");
        return v.items.front();
    }

    double number(std::string_view key) const { return to_double(key, scalar(key)); }

    double number_or(std::string_view key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    long long integer(std::string_view key) const { return to_integer(key, scalar(key)); }

    long long integer_or(std::string_view key, long long fallback) const {
        return has(key) ? integer(key) : fallback;
    }

    std::uint64_t unsigned64(std::string_view key) const {
        const std::string s = scalar(key);
        std::uint64_t out = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc() || p != s.data() + s.size())
            throw ValidationError(std::string(key) + " must be an unsigned 64-bit integer, got '" + s + "'");
        return out;
    }

    bool boolean(std::string_view key) const {
        const std::string s = scalar(key);
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw ValidationError(std::string(key) + " must be true or false, got '" + s + "'");
    }

    // A scalar is accepted as a one-element list.
    std::vector<double> numbers(std::string_view key) const {
        std::vector<double> out;
        for (const auto& item : at(key).items) out.push_back(to_double(key, item));
        return out;
    }

    std::vector<long long> integers(std::string_view key) const {
        std::vector<long long> out;
        for (const auto& item : at(key).items) out.push_back(to_integer(key, item));
        return out;
    }

    std::map<std::string, std::string> echo() const {
        std::map<std::string, std::string> out;
        for (const auto& [k, v] : values_) out[k] = v.text;
        return out;
    }

private:
    static double to_double(std::string_view key, const std::string& s) {
        std::istringstream in(s);
        in.imbue(std::locale::classic());
        double v = 0.0;
        in >> v;
        if (in.fail() || !in.eof())
            throw ValidationError(std::string(key) + " must be a number, got '" + s + "'");
        return v;
    }

    static long long to_integer(std::string_view key, const std::string& s) {
        long long v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw ValidationError(std::string(key) + " must be an integer, got '" + s + "'");
        return v;
    }

    std::map<std::string, RawValue> values_;
};

inline RawConfig tokenize(std::string_view text) {
    std::map<std::string, RawValue> values;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (trim(line).empty()) continue;

        for (const auto& part : split_top_level(line, line_no)) {
            if (part.empty()) continue;
            const auto eq = part.find('=');
            if (eq == std::string::npos) throw ParseError(line_no, "expected key = value, got '" + part + "'");
            const std::string key = trim(std::string_view(part).substr(0, eq));
            const std::string value = trim(std::string_view(part).substr(eq + 1));
            if (key.empty()) throw ParseError(line_no, "missing key before '='");
            if (!known_keys().count(key)) throw ParseError(line_no, "unknown key '" + key + "'");
            if (values.count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
            if (value.empty()) throw ParseError(line_no, "missing value for '" + key + "'");

            RawValue raw;
            raw.line = line_no;
            if (value.front() == '[') {
                if (value.back() != ']') throw ParseError(line_no, "list for '" + key + "' must end with ']'");
                raw.is_list = true;
                const std::string inner = value.substr(1, value.size() - 2);
                for (auto& item : split_top_level(inner, line_no)) {
                    if (item.empty()) throw ParseError(line_no, "empty list item in '" + key + "'");
                    raw.items.push_back(item);
                }
                std::string canon = "[";
                for (std::size_t i = 0; i < raw.items.size(); ++i)
                    canon += (i ? ", " : "") + raw.items[i];
                raw.text = canon + "]";
            } else {
                raw.items.push_back(value);
                raw.text = value;
            }
            values.emplace(key, std::move(raw));
        }
    }
    return RawConfig(std::move(values));
}

inline std::vector<double> time_grid(const RawConfig& raw) {
    if (raw.has("times_gamma0")) {
        auto times = raw.numbers("times_gamma0");
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!(times[i] >= 0.0)) throw ValidationError("times_gamma0 must be >= 0");
            if (i && !(times[i] >= times[i - 1])) throw ValidationError("times_gamma0 must be ascending");
        }
        return times;
    }
    const double lo = raw.number_or("t_min_gamma0", 0.0);
    const double hi = raw.number_or("t_max_gamma0", 200.0);
    const long long points = raw.integer_or("t_points", 201);
    const std::string kind = raw.has("t_grid") ? raw.scalar("t_grid") : "linear";
    if (!(lo >= 0.0)) throw ValidationError("t_min_gamma0 must be >= 0");
    if (!(hi > lo)) throw ValidationError("t_max_gamma0 must exceed t_min_gamma0");
    if (points < 2) throw ValidationError("t_points must be >= 2");
    if (kind == "linear") return linear_grid(lo, hi, static_cast<std::size_t>(points));
    if (kind == "log") {
        if (!(lo > 0.0)) throw ValidationError("t_grid = log needs t_min_gamma0 > 0");
        return log_grid(lo, hi, static_cast<std::size_t>(points));
    }
    throw ValidationError("t_grid must be linear or log");
}

} // namespace detail

inline RunConfig parse_config(std::string_view text) {
    const detail::RawConfig raw = detail::tokenize(text);

    RunConfig cfg;
    cfg.entries = raw.echo();

    if (!raw.has("experiment")) {
        std::string missing = "experiment";
        for (const char* k : {"environment", "a_over_lambda0"})
            if (!raw.has(k)) missing += std::string(", ") + k;
        if (!raw.has("n") && !raw.has("extents")) missing += ", n (or extents)";
        throw ValidationError("missing required keys: " + missing);
    }
    const std::string kind = raw.scalar("experiment");
    if (kind == "modes") cfg.experiment = Experiment::Modes;
    else if (kind == "sweep") cfg.experiment = Experiment::Sweep;
    else if (kind == "evolve") cfg.experiment = Experiment::Evolve;
    else if (kind == "spectrum") cfg.experiment = Experiment::Spectrum;
    else if (kind == "mutualinfo") cfg.experiment = Experiment::MutualInfo;
    else if (kind == "scaling") cfg.experiment = Experiment::Scaling;
    else throw ValidationError("experiment must be one of modes, sweep, evolve, spectrum, mutualinfo, scaling");

    const bool scaling = cfg.experiment == Experiment::Scaling;
    const bool spacing_swept = (cfg.experiment == Experiment::Sweep &&
                                (!raw.has("sweep_axis") || raw.scalar("sweep_axis") == "lattice_spacing")) ||
                               scaling;
    const bool size_swept = cfg.experiment == Experiment::Sweep && raw.has("sweep_axis") &&
                            raw.scalar("sweep_axis") == "system_size";

    // required keys
    {
        std::vector<std::string> missing;
        if (!scaling && !raw.has("geometry_file")) {
            if (!raw.has("environment")) missing.push_back("environment");
            if (!spacing_swept && !raw.has("a_over_lambda0")) missing.push_back("a_over_lambda0");
            if (!size_swept && !raw.has("n") && !raw.has("extents")) missing.push_back("n (or extents)");
        }
        if (scaling && !raw.has("sizes")) missing.push_back("sizes");
        if (!missing.empty()) {
            std::string list;
            for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
            throw ValidationError("missing required keys: " + list);
        }
    }

    if (raw.has("environment")) cfg.lattice.environment = environment_from_string(raw.scalar("environment"));
    if (raw.has("n") && raw.has("extents")) throw ValidationError("give either n or extents, not both");
    if (raw.has("n")) {
        const long long n = raw.integer("n");
        if (n < 1) throw ValidationError("n must be >= 1");
        cfg.lattice.extents.assign(lattice_rank(cfg.lattice.environment), 0);
        if (lattice_rank(cfg.lattice.environment) != 1)
            throw ValidationError("n applies to 1D arrays; use extents for " +
                                  std::string(to_string(cfg.lattice.environment)));
        cfg.lattice.extents = {static_cast<int>(n)};
    } else if (raw.has("extents")) {
        cfg.lattice.extents.clear();
        for (long long e : raw.integers("extents")) cfg.lattice.extents.push_back(static_cast<int>(e));
    } else {
        cfg.lattice.extents.assign(lattice_rank(cfg.lattice.environment), 1);
    }
    cfg.lattice.spacing = raw.number_or("a_over_lambda0", 1.0);
    if (!scaling && !raw.has("geometry_file")) cfg.lattice.validate();

    // disorder levels: lists pair up element-wise, scalars broadcast
    {
        std::vector<double> rd = raw.has("rd_over_a") ? raw.numbers("rd_over_a") : std::vector<double>{0.0};
        std::vector<double> wd = raw.has("omega_d_over_gamma0") ? raw.numbers("omega_d_over_gamma0")
                                                                 : std::vector<double>{0.0};
        if (rd.size() != wd.size() && rd.size() != 1 && wd.size() != 1)
            throw ValidationError("rd_over_a and omega_d_over_gamma0 lists must have equal length");
        const std::size_t count = std::max(rd.size(), wd.size());
        cfg.disorder.clear();
        for (std::size_t i = 0; i < count; ++i) {
            DisorderLevel level{rd[rd.size() == 1 ? 0 : i], wd[wd.size() == 1 ? 0 : i]};
            DisorderSpec{level.rd_over_a, level.omega_d}.validate();
            cfg.disorder.push_back(level);
        }
    }

    const long long realizations = raw.integer_or("realizations", 100);
    if (realizations < 1) throw ValidationError("realizations must be >= 1");
    cfg.realizations = static_cast<std::size_t>(realizations);
    if (raw.has("seed")) cfg.seed = raw.unsigned64("seed");
    const long long threads = raw.integer_or("threads", 0);
    if (threads < 0) throw ValidationError("threads must be >= 0");
    cfg.threads = static_cast<unsigned>(threads);

    const std::size_t n_atoms = cfg.lattice.size();
    const std::string init = raw.has("initial_state")
                                 ? raw.scalar("initial_state")
                                 : (cfg.experiment == Experiment::MutualInfo ? "site" : "random_phase");
    if (init == "random_phase") {
        cfg.init = InitialState::random_phase();
    } else if (init == "site") {
        const long long j = raw.integer_or("initial_site", static_cast<long long>(n_atoms / 2 + 1));
        if (j < 1 || (!raw.has("geometry_file") && static_cast<std::size_t>(j) > n_atoms))
            throw ValidationError("initial_site must lie in 1.." + std::to_string(n_atoms));
        cfg.init = InitialState::excite(static_cast<std::size_t>(j));
    } else {
        throw ValidationError("initial_state must be random_phase or site");
    }

    cfg.times = detail::time_grid(raw);
    cfg.t_prime = raw.number_or("t_prime_gamma0", 100.0);
    if (!(cfg.t_prime >= 0.0)) throw ValidationError("t_prime_gamma0 must be >= 0");
    {
        const double lo = raw.number_or("omega_min_over_gamma0", -3.0);
        const double hi = raw.number_or("omega_max_over_gamma0", 3.0);
        const long long points = raw.integer_or("omega_points", 400);
        if (points < 2) throw ValidationError("omega_points must be >= 2");
        if (!(hi > lo)) throw ValidationError("omega_max_over_gamma0 must exceed omega_min_over_gamma0");
        cfg.omega = linear_grid(lo, hi, static_cast<std::size_t>(points));
    }

    if (raw.has("sweep_axis")) cfg.sweep_axis = sweep_axis_from_string(raw.scalar("sweep_axis"));
    if (raw.has("sweep_values")) {
        cfg.sweep_values = raw.numbers("sweep_values");
    } else if (cfg.experiment == Experiment::Sweep || scaling) {
        const double lo = raw.number_or("sweep_min", 0.1);
        const double hi = raw.number_or("sweep_max", 10.0);
        const long long points = raw.integer_or("sweep_points", 60);
        const std::string grid = raw.has("sweep_grid") ? raw.scalar("sweep_grid") : "log";
        if (points < 2) throw ValidationError("sweep_points must be >= 2");
        if (grid == "log") cfg.sweep_values = log_grid(lo, hi, static_cast<std::size_t>(points));
        else if (grid == "linear") cfg.sweep_values = linear_grid(lo, hi, static_cast<std::size_t>(points));
        else throw ValidationError("sweep_grid must be log or linear");
    }
    if (raw.has("sweep_observable")) {
        const std::string o = raw.scalar("sweep_observable");
        if (o == "slowest_rate") cfg.sweep_observable = SweepObservable::SlowestRate;
        else if (o == "slow_mode_ipr") cfg.sweep_observable = SweepObservable::SlowModeIpr;
        else throw ValidationError("sweep_observable must be slowest_rate or slow_mode_ipr");
    }
    const long long slow = raw.integer_or("slow_modes", 10);
    if (slow < 1) throw ValidationError("slow_modes must be >= 1");
    cfg.slow_modes = static_cast<std::size_t>(slow);
    if (raw.has("keep_raw")) cfg.keep_raw = raw.boolean("keep_raw");

    if (scaling) {
        cfg.scaling_dims = static_cast<int>(raw.integer_or("dims", 1));
        if (cfg.scaling_dims < 1 || cfg.scaling_dims > 3) throw ValidationError("dims must be 1, 2 or 3");
        for (long long s : raw.integers("sizes")) {
            if (s < 1) throw ValidationError("sizes must be positive");
            cfg.scaling_sizes.push_back(static_cast<int>(s));
        }
    }

    if (raw.has("geometry_file")) cfg.geometry_file = raw.scalar("geometry_file");
    if (raw.has("export_hamiltonian")) cfg.export_hamiltonian = raw.boolean("export_hamiltonian");
    if (raw.has("out_dir")) cfg.out_dir = raw.scalar("out_dir");

    if (cfg.experiment == Experiment::Sweep) {
        SweepSpec probe;
        probe.base = cfg.lattice;
        probe.axis = cfg.sweep_axis;
        probe.values = cfg.sweep_values;
        probe.levels = cfg.disorder;
        probe.realizations = cfg.realizations;
        probe.validate();
    }
    const bool single_level = cfg.experiment != Experiment::Sweep && !scaling;
    if (single_level && cfg.disorder.size() != 1)
        throw ValidationError(std::string(to_string(cfg.experiment)) +
                              " runs one disorder level; give scalar rd_over_a / omega_d_over_gamma0");
    return cfg;
}

// Applies a command-line override and records it in the echo.
inline void override_seed(RunConfig& cfg, std::uint64_t seed) {
    cfg.seed = seed;
    cfg.entries["seed"] = std::to_string(seed);
}

inline void override_threads(RunConfig& cfg, unsigned threads) {
    cfg.threads = threads;
    cfg.entries["threads"] = std::to_string(threads);
}

inline void override_out_dir(RunConfig& cfg, const std::string& dir) {
    cfg.out_dir = dir;
    cfg.entries["out_dir"] = dir;
}

} // namespace coopdecay
