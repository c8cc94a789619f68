// coopdecay: run one experiment described by a configuration file.
//
//   coopdecay <config-file> [--out DIR] [--seed U64] [--threads K]
//
// COOPDECAY_THREADS sets the worker count when neither --threads nor the
// config's `threads` key does.

#include "coopdecay.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Cooperative decay of disordered atom arrays"};
    app.set_version_flag("--version", std::string(COOPDECAY_VERSION));

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    app.add_option("config", config_path, "configuration file")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "master seed (overrides the config)");
    app.add_option("--threads", threads, "worker threads (0: all cores)");
    CLI11_PARSE(app, argc, argv);

    coopdecay::RunConfig cfg;
    try {
        cfg = coopdecay::parse_config(coopdecay::detail::read_text_file(config_path));
        if (out_dir) coopdecay::override_out_dir(cfg, *out_dir);
        if (seed) coopdecay::override_seed(cfg, *seed);
        if (threads) {
            coopdecay::override_threads(cfg, *threads);
        } else if (!cfg.entries.count("threads")) {
            if (const char* env = std::getenv("COOPDECAY_THREADS")) {
                try {
                    const int k = std::stoi(env);
                    if (k < 0) throw std::invalid_argument("negative");
                    coopdecay::override_threads(cfg, static_cast<unsigned>(k));
                } catch (const std::exception&) {
                    throw coopdecay::ValidationError("COOPDECAY_THREADS must be a non-negative integer");
                }
            }
        }
    } catch (const std::exception& e) {
        std::cerr << coopdecay::error_record(e).dump() << '\n';
        return 2;
    }
    return coopdecay::run_and_report(cfg, std::cerr);
}
