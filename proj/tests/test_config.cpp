#include "coopdecay/config.hpp"
#include "coopdecay/runner.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace coopdecay;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("coopdecay_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int parse_error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ParseError& e) {
        return static_cast<int>(e.line());
    }
    return -1;
}

} // namespace

TEST(Parse, TypicalWaveguideRun) {
    const auto cfg = parse_config(
        "experiment = evolve\n"
        "environment = half_waveguide, n = 50   # chain\n"
        "a_over_lambda0 = 0.15\n"
        "rd_over_a = 1.0, realizations = 100, seed = 7\n");
    EXPECT_EQ(cfg.experiment, Experiment::Evolve);
    EXPECT_EQ(cfg.lattice.environment, Environment::HalfWaveguide);
    EXPECT_EQ(cfg.lattice.size(), 50u);
    EXPECT_DOUBLE_EQ(cfg.lattice.spacing, 0.15);
    ASSERT_EQ(cfg.disorder.size(), 1u);
    EXPECT_DOUBLE_EQ(cfg.disorder[0].rd_over_a, 1.0);
    EXPECT_EQ(cfg.realizations, 100u);
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.init.kind, InitialState::Kind::RandomPhase);
    EXPECT_EQ(cfg.times.size(), 201u);
    EXPECT_EQ(cfg.omega.size(), 400u);
}

TEST(Parse, SweepListsPairUp) {
    const auto cfg = parse_config(
        "experiment = sweep, environment = free_space_2d, extents = [10, 10]\n"
        "rd_over_a = [0, 0.1, 0.5], sweep_min = 0.1, sweep_max = 1.0, sweep_points = 12\n");
    EXPECT_EQ(cfg.disorder.size(), 3u);
    EXPECT_EQ(cfg.sweep_values.size(), 12u);
    EXPECT_EQ(cfg.lattice.size(), 100u);
}

TEST(Parse, MutualInfoDefaultsToCentralSite) {
    const auto cfg = parse_config("experiment = mutualinfo, environment = half_waveguide, n = 9, a_over_lambda0 = 0.2");
    EXPECT_EQ(cfg.init.kind, InitialState::Kind::Site);
    EXPECT_EQ(cfg.init.site, 5u);
}

TEST(Parse, EmptyConfigListsMissingKeys) {
    try {
        parse_config("");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_STREQ(e.what(), "missing required keys: experiment, environment, a_over_lambda0, n (or extents)");
    }
}

TEST(Parse, UnknownDuplicateAndMalformedKeysReportLines) {
    EXPECT_EQ(parse_error_line("experiment = modes\nlattice = 3\n"), 2);
    EXPECT_EQ(parse_error_line("experiment = modes\n\nexperiment = sweep\n"), 3);
    EXPECT_EQ(parse_error_line("experiment modes\n"), 1);
    EXPECT_EQ(parse_error_line("experiment = modes\nextents = [1, 2\n"), 2);
    EXPECT_EQ(parse_error_line("n =\n"), 1);
}

TEST(Parse, RejectsInvalidValues) {
    const std::string base = "experiment = modes, environment = free_space_1d, n = 4, ";
    EXPECT_THROW(parse_config(base + "a_over_lambda0 = 0"), ValidationError);
    EXPECT_THROW(parse_config(base + "a_over_lambda0 = 0.3, rd_over_a = -1"), ValidationError);
    EXPECT_THROW(parse_config(base + "a_over_lambda0 = 0.3, omega_d_over_gamma0 = 2"), ValidationError);
    EXPECT_THROW(parse_config(base + "a_over_lambda0 = abc"), ValidationError);
    EXPECT_THROW(parse_config(base + "a_over_lambda0 = 0.3, rd_over_a = [0, 1]"), ValidationError);
    EXPECT_THROW(parse_config(base + "a_over_lambda0 = 0.3, initial_state = site, initial_site = 9"),
                 ValidationError);
    EXPECT_THROW(parse_config("experiment = bogus, environment = free_space_1d, n = 4, a_over_lambda0 = 0.3"),
                 ValidationError);
    EXPECT_THROW(parse_config("experiment = modes, environment = free_space_2d, n = 4, a_over_lambda0 = 0.3"),
                 ValidationError);
}

TEST(Parse, CanonicalTextRoundTrips) {
    const auto cfg = parse_config(
        "experiment = sweep, environment = half_waveguide, n = 20\n"
        "rd_over_a = [0,0.5 ,1], seed = 3, sweep_values = [0.1, 0.2]\n");
    const auto again = parse_config(cfg.canonical_text());
    EXPECT_EQ(again.entries, cfg.entries);
    EXPECT_EQ(again.sweep_values, cfg.sweep_values);
    EXPECT_EQ(again.disorder.size(), 3u);
}

TEST(Runner, ManifestRoundTripsConfig) {
    const auto dir = scratch("manifest");
    auto cfg = parse_config("experiment = modes, environment = free_space_1d, n = 6, a_over_lambda0 = 0.3");
    override_out_dir(cfg, dir.string());
    override_seed(cfg, 99);
    run(cfg);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(manifest.at("seed").get<std::uint64_t>(), 99u);
    const auto back = config_from_manifest(manifest);
    EXPECT_EQ(back.entries, cfg.entries);
    EXPECT_EQ(back.seed, 99u);
    for (const auto& f : manifest.at("outputs")) EXPECT_TRUE(fs::exists(dir / f.get<std::string>())) << f;
}

TEST(Runner, RerunsAreByteIdentical) {
    const std::string text =
        "experiment = evolve, environment = half_waveguide, n = 12, a_over_lambda0 = 0.15\n"
        "rd_over_a = 0.5, realizations = 6, seed = 5, t_points = 21, t_max_gamma0 = 20\n";
    const auto a = scratch("rerun_a"), b = scratch("rerun_b");
    auto ca = parse_config(text), cb = parse_config(text);
    override_out_dir(ca, a.string());
    override_out_dir(cb, b.string());
    override_threads(cb, 3);
    run(ca);
    run(cb);
    for (const char* f : {"population.csv", "population_mean.csv"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Runner, FailureWritesErrorRecord) {
    const auto dir = scratch("failure");
    fs::create_directories(dir);
    auto cfg = parse_config("experiment = modes, environment = free_space_1d, n = 3, a_over_lambda0 = 0.3");
    override_out_dir(cfg, dir.string());
    cfg.geometry_file = (dir / "missing.json").string();
    std::ostringstream err;
    EXPECT_EQ(run_and_report(cfg, err), 1);
    const auto record = nlohmann::json::parse(slurp(dir / "error.json"));
    EXPECT_EQ(record.at("status"), "error");
    EXPECT_EQ(record.at("kind"), "io");
}
