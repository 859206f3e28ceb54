#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ccme/cc_mapping.hpp"

using namespace ccme;

namespace {

ModelParams at_alpha(double alpha_over_eps)
{
    ModelParams p;
    p.alpha_cm = alpha_over_eps * p.epsilon_cm;
    return p;
}

} // namespace

TEST(CCMapping, CouplingAndReorganization)
{
    const CCParams cc = map_cc(at_alpha(0.1));
    EXPECT_NEAR(cc.eta, std::sqrt(std::numbers::pi * 806.5 * 400.0 / 2.0), 1e-10);
    EXPECT_NEAR(cc.eta, 711.8, 0.1);
    EXPECT_DOUBLE_EQ(cc.Omega, 400.0);
    EXPECT_NEAR(cc.reorg, 1266.8, 0.1);
    // reorganization equals eta^2 / Omega
    EXPECT_NEAR(cc.reorg, cc.eta * cc.eta / cc.Omega, 1e-10);
}

TEST(CCMapping, ZeroCouplingLimit)
{
    const CCParams cc = map_cc(at_alpha(0.0));
    EXPECT_EQ(cc.eta, 0.0);
    EXPECT_EQ(cc.reorg, 0.0);
    EXPECT_EQ(cc.displacement(), 0.0);
    EXPECT_THROW(map_cc(at_alpha(-0.1)), ConfigError);
}

TEST(CCMapping, HuangRhysFactor)
{
    const CCParams cc = map_cc(at_alpha(0.1));
    const double s = cc.displacement() * cc.displacement();
    EXPECT_NEAR(s, std::numbers::pi * 806.5 / 800.0, 1e-12);
    EXPECT_NEAR(s, 3.1666, 1e-3);
    EXPECT_NEAR(std::exp(-s), 0.0421, 1e-4);
}

TEST(CCMapping, CouplingScalesAsSqrtAlpha)
{
    for (double a : {0.025, 0.05, 0.2}) {
        const double ratio = map_cc(at_alpha(a)).eta / map_cc(at_alpha(0.1)).eta;
        EXPECT_NEAR(ratio, std::sqrt(a / 0.1), 1e-12);
    }
}

TEST(AugmentedHamiltonian, IsHermitian)
{
    for (double a : {0.0, 0.1, 0.3}) {
        const auto p = at_alpha(a);
        const Operator h = augmented_hamiltonian(p, map_cc(p), HilbertSpace(12));
        EXPECT_LT(hermiticity_defect(h), 1e-12);
    }
}

TEST(AugmentedHamiltonian, ZeroPhononLineAtEpsilon)
{
    for (double a : {0.025, 0.1, 0.25}) {
        const auto p = at_alpha(a);
        const HilbertSpace hs(30);
        const auto es = augmented_eigensystem(p, map_cc(p), hs);
        EXPECT_NEAR(zero_phonon_gap(es, hs), p.epsilon_cm, 1e-6 * p.epsilon_cm) << a;
    }
}

TEST(AugmentedHamiltonian, ExcitedManifoldIsDisplacedOscillator)
{
    const auto p = at_alpha(0.1);
    const CCParams cc = map_cc(p);
    const HilbertSpace hs(30);
    const auto es = augmented_eigensystem(p, cc, hs);
    const auto w = excited_character(es, hs);
    int first_excited = -1;
    for (int j = 0; j < es.dim() && first_excited < 0; ++j)
        if (w[static_cast<std::size_t>(j)] > 0.5) first_excited = j;
    ASSERT_GE(first_excited, 0);
    const double overlap = std::norm(es.vectors(hs.index(Electronic::Excited, 0), first_excited));
    const double d = cc.displacement();
    EXPECT_NEAR(overlap, std::exp(-d * d), 1e-8);

    // ground manifold is unshifted
    EXPECT_NEAR(es.values(0), 0.0, 1e-9);
    EXPECT_NEAR(std::norm(es.vectors(hs.index(Electronic::Ground, 0), 0)), 1.0, 1e-12);
}

TEST(AugmentedHamiltonian, ManifoldsDoNotMix)
{
    const auto p = at_alpha(0.3);
    const HilbertSpace hs(20);
    const auto es = augmented_eigensystem(p, map_cc(p), hs);
    for (double c : excited_character(es, hs)) EXPECT_TRUE(c < 1e-12 || c > 1.0 - 1e-12);
}

TEST(AugmentedHamiltonian, CounterTermShiftsOnlyTheMode)
{
    auto p = at_alpha(0.0);
    p.include_residual_counterterm = true;
    const HilbertSpace hs(6);
    const Operator with = augmented_hamiltonian(p, map_cc(p), hs);
    p.include_residual_counterterm = false;
    const Operator without = augmented_hamiltonian(p, map_cc(p), hs);
    const Operator b = annihilator(6);
    const Operator x = b + b.adjoint();
    const double k = 80.0 * 4000.0 / (2.0 * std::numbers::pi * 400.0);
    EXPECT_LT(max_abs(with - without - fock_op(hs, k * x * x)), 1e-9);
}

TEST(CouplingOperators, Structure)
{
    const HilbertSpace hs(5);
    const auto ops = coupling_operators(hs);
    EXPECT_LT(hermiticity_defect(ops.S), 1e-15);
    EXPECT_EQ(max_abs(ops.sigma * ops.sigma), 0.0);
    // S commutes with every electronic operator
    const Operator pe = electronic_op(hs, qubit_excited_projector());
    EXPECT_EQ(max_abs(ops.S * pe - pe * ops.S), 0.0);
    EXPECT_NEAR(ops.S(hs.index(Electronic::Ground, 1), hs.index(Electronic::Ground, 0)).real(), 1.0, 1e-15);
    EXPECT_NEAR(ops.S(hs.index(Electronic::Ground, 3), hs.index(Electronic::Ground, 2)).real(), std::sqrt(3.0), 1e-15);
}
