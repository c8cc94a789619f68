#include "coopdecay/entanglement.hpp"
#include "coopdecay/rng.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace coopdecay;

namespace {

Eigen::VectorXcd random_amplitudes(std::size_t n, Rng& rng) {
    Eigen::VectorXcd c(static_cast<Eigen::Index>(n));
    for (auto& v : c) v = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    return c * (rng.uniform() / c.norm());
}

std::vector<int> as_int(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

} // namespace

TEST(Entropy, BinaryEntropyEdges) {
    EXPECT_EQ(binary_entropy(0.0), 0.0);
    EXPECT_EQ(binary_entropy(1.0), 0.0);
    EXPECT_NEAR(binary_entropy(0.5), std::log(2.0), 1e-15);
    EXPECT_EQ(binary_entropy(1.0 + 1e-12), 0.0);
}

TEST(MutualInformation, BellPairIsTwoLnTwo) {
    Eigen::VectorXcd c(2);
    c << 1.0 / std::sqrt(2.0), cplx(0.0, 1.0) / std::sqrt(2.0);
    EXPECT_NEAR(mutual_information(c, BipartiteCut::half_chain(2)), 2.0 * std::log(2.0), 1e-12);
}

TEST(MutualInformation, ProductAndGroundStatesCarryNone) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(6);
    EXPECT_EQ(mutual_information(c, BipartiteCut::half_chain(6)), 0.0);
    c(1) = 1.0; // excitation confined to A
    EXPECT_NEAR(mutual_information(c, BipartiteCut::half_chain(6)), 0.0, 1e-15);
}

TEST(MutualInformation, MatchesDenseDensityMatrix) {
    Rng rng(31);
    for (std::size_t n = 2; n <= 8; ++n) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto c = random_amplitudes(n, rng);
            const auto cut = BipartiteCut::half_chain(n);
            const double ref = oracle::mutual_information(c, as_int(cut.a), as_int(cut.b));
            EXPECT_NEAR(mutual_information(c, cut), ref, 1e-10) << "n=" << n;
            const double sa = oracle::von_neumann(oracle::partial_trace(
                oracle::dense_state(c), static_cast<int>(n), as_int(cut.a)));
            EXPECT_NEAR(subsystem_entropy(c, cut.a), sa, 1e-10);
        }
    }
}

TEST(MutualInformation, ArbitraryCutsMatchDenseOracle) {
    Rng rng(8);
    BipartiteCut cut;
    cut.a = {0, 3, 4};
    cut.b = {1, 2};
    const auto c = random_amplitudes(5, rng);
    EXPECT_NEAR(mutual_information(c, cut), oracle::mutual_information(c, {0, 3, 4}, {1, 2}), 1e-10);
}

TEST(MutualInformation, RejectsOverNormalizedState) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Ones(2);
    EXPECT_THROW(mutual_information(c, BipartiteCut::half_chain(2)), ValidationError);
}

TEST(Cut, HalfChainPutsExtraAtomInA) {
    const auto cut = BipartiteCut::half_chain(5);
    EXPECT_EQ(cut.a.size(), 3u);
    EXPECT_EQ(cut.b.size(), 2u);
    EXPECT_EQ(cut.describe(), "A=1..3 B=4..5");
}

TEST(Curve, DecaysToZeroForRadiantSystem) {
    const auto geom = build_ordered({Environment::FreeSpace1D, {4}, 0.3});
    const auto dec = decompose(build_hamiltonian(geom));
    const auto curve = mutual_information_curve(site_excitation_state(4, 3), dec,
                                                BipartiteCut::half_chain(4), {0.0, 1.0, 200.0});
    EXPECT_EQ(curve[0].info, 0.0);
    EXPECT_GT(curve[1].info, 0.0);
    EXPECT_LT(curve[2].info, 1e-6);
}
