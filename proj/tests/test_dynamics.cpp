#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ccme/dynamics.hpp"

using namespace ccme;

namespace {

ModelParams params(double alpha_over_eps, double T_EM = 300.0, int fock_dim = 8)
{
    ModelParams p;
    p.alpha_cm = alpha_over_eps * p.epsilon_cm;
    p.T_EM_K = T_EM;
    p.fock_dim = fock_dim;
    return p;
}

Operator initial(const LiouvillianSpec& L, InitialKind kind)
{
    return make_initial_state({kind, {}}, L.params, L.cc, L.hs).rho;
}

double trace_distance(const Operator& a, const Operator& b)
{
    const Operator d = a - b;
    Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (d + d.adjoint()));
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

} // namespace

TEST(Observables, ReducedQuantities)
{
    const HilbertSpace hs(3);
    Operator e = Operator::Zero(2, 2);
    e(1, 1) = 0.25;
    e(0, 0) = 0.75;
    e(1, 0) = Complex(0.1, 0.2);
    e(0, 1) = Complex(0.1, -0.2);
    const Operator rho = tensor(e, thermal_fock_state(400.0, 300.0, 3));
    EXPECT_NEAR(excited_population(hs, rho), 0.25, 1e-15);
    EXPECT_NEAR(sigma_x(hs, rho), 0.2, 1e-15);
    EXPECT_NEAR(sigma_y(hs, rho), -0.4, 1e-15);
    EXPECT_NEAR(ground_manifold_trace(hs, rho), 0.75, 1e-15);
}

TEST(InitialState, KindsAreDensityOperators)
{
    const auto p = params(0.2, 300.0, 20);
    const auto cc = map_cc(p);
    const HilbertSpace hs(20);
    for (auto k : {InitialKind::ExcitedThermal, InitialKind::ExcitedDisplacedThermal, InitialKind::PlusCoherence}) {
        const auto st = make_initial_state({k, {}}, p, cc, hs);
        EXPECT_NO_THROW(check_density_operator(st.rho));
    }
    const auto plus = make_initial_state({InitialKind::PlusCoherence, {}}, p, cc, hs);
    EXPECT_NEAR(excited_population(hs, plus.rho), 0.5, 1e-14);
    EXPECT_NEAR(sigma_x(hs, plus.rho), 1.0, 1e-14);
}

TEST(InitialState, DisplacedStateWarnsWhenTruncated)
{
    const auto p = params(0.25, 300.0, 6);
    const auto st = make_initial_state({InitialKind::ExcitedDisplacedThermal, {}}, p, map_cc(p), HilbertSpace(6));
    EXPECT_FALSE(st.warnings.empty());
}

TEST(InitialState, RejectsInvalidCustom)
{
    const auto p = params(0.1, 300.0, 3);
    const HilbertSpace hs(3);
    EXPECT_THROW(make_initial_state({InitialKind::Custom, Operator::Identity(6, 6)}, p, map_cc(p), hs), ConfigError);
    EXPECT_THROW(make_initial_state({InitialKind::Custom, Operator::Identity(4, 4)}, p, map_cc(p), hs),
                 DimensionMismatch);
}

TEST(Propagate, UnitaryEigenstateIsStationary)
{
    auto p = params(0.1, 300.0, 6);
    p.gamma_cm = 0.0;
    p.gamma0_per_ps = 0.0;
    const auto L = assemble_liouvillian(EmTreatment::NonAdditive, p);
    const StateVector psi = L.eig.vectors.col(3);
    const Operator rho0 = psi * psi.adjoint();
    const auto t = uniform_grid(0.0, 5.0, 51);
    const auto ts = propagate(L, rho0, t);
    EXPECT_LT(max_abs(ts.final_state - rho0), 1e-10);
    for (double e : ts.excited_population) EXPECT_NEAR(e, ts.excited_population.front(), 1e-10);
}

TEST(Propagate, AdditiveTwoLevelDecay)
{
    for (double T : {300.0, 6000.0}) {
        const auto p = params(0.1, T, 8);
        const auto L = assemble_liouvillian(EmTreatment::Additive, p);
        const auto t = uniform_grid(0.0, 400.0, 401);
        const auto ts = propagate(L, initial(L, InitialKind::ExcitedThermal), t);
        const double n = bose_occupation(p.epsilon_cm, T);
        const double k = p.gamma0_per_ps * (2.0 * n + 1.0);
        const double pss = n / (2.0 * n + 1.0);
        for (std::size_t i = 0; i < t.size(); i += 20) {
            EXPECT_NEAR(ts.excited_population[i], pss + (1.0 - pss) * std::exp(-k * t[i]), 1e-9) << T << " " << t[i];
        }
        for (double tr : ts.trace) EXPECT_NEAR(tr, 1.0, 1e-8);
        EXPECT_LT(ts.max_hermiticity_defect, 1e-10);
    }
}

TEST(Propagate, UniformAndRk4Agree)
{
    const auto p = params(0.1, 6000.0, 6);
    const auto L = assemble_liouvillian(EmTreatment::NonAdditive, p);
    const auto rho0 = initial(L, InitialKind::PlusCoherence);
    std::vector<double> t = uniform_grid(0.0, 0.2, 41);
    const auto uni = propagate(L, rho0, t);
    t[1] *= 0.5;  // makes the grid non-uniform
    PropagationOptions coarse, fine;
    coarse.rk4_step_factor = 0.5;
    fine.rk4_step_factor = 0.25;
    const double e_coarse = max_abs(uni.final_state - propagate(L, rho0, t, coarse).final_state);
    const double e_fine = max_abs(uni.final_state - propagate(L, rho0, t, fine).final_state);
    EXPECT_LT(e_fine, 1e-3);
    // fourth order: halving the step cuts the error by about 16
    EXPECT_GT(e_coarse / e_fine, 10.0);
    EXPECT_LT(e_coarse / e_fine, 20.0);
}

TEST(Propagate, RejectsBadGrids)
{
    const auto L = assemble_liouvillian(EmTreatment::Additive, params(0.1, 300.0, 4));
    const auto rho0 = initial(L, InitialKind::ExcitedThermal);
    std::vector<double> t{0.0, 1.0, 1.0};
    EXPECT_THROW(propagate(L, rho0, t), ConfigError);
    std::vector<double> empty;
    EXPECT_THROW(propagate(L, rho0, empty), ConfigError);
    EXPECT_THROW(uniform_grid(0.0, 1.0, 1), ConfigError);
}

TEST(Propagate, NonAdditiveDecaysSlowerThanAdditive)
{
    const auto p = params(0.25, 300.0, 16);
    const auto t = uniform_grid(0.0, 200.0, 41);
    const auto na = assemble_liouvillian(EmTreatment::NonAdditive, p);
    const auto ad = assemble_liouvillian(EmTreatment::Additive, p);
    const auto a = propagate(na, initial(na, InitialKind::ExcitedThermal), t);
    const auto b = propagate(ad, initial(ad, InitialKind::ExcitedThermal), t);
    EXPECT_GT(a.excited_population.back(), b.excited_population.back() + 0.1);
}

TEST(Propagate, EndpointMatchesSteadyState)
{
    const auto p = params(0.05, 6000.0, 8);
    const auto L = assemble_liouvillian(EmTreatment::NonAdditive, p);
    const double t_end = 20.0 / p.gamma0_per_ps;
    const auto ts = propagate(L, initial(L, InitialKind::ExcitedThermal), uniform_grid(0.0, t_end, 201));
    const auto ss = steady_state(L);
    EXPECT_LT(trace_distance(ts.final_state, ss.rho), 1e-6);
}

TEST(SteadyState, GibbsLimit)
{
    auto p = params(0.0, 6000.0, 4);
    p.gamma_cm = 0.0;
    // every Fock population is conserved without the residual bath, so only
    // the reduced emitter population is unique; check it with the LU path
    for (auto mode : {EmTreatment::NonAdditive, EmTreatment::Additive}) {
        const auto L = assemble_liouvillian(mode, p);
        EXPECT_THROW(steady_state(L, SteadySolver::Svd), DegenerateSteadyStateError);
    }
    p.gamma_cm = 80.0;
    const double n = bose_occupation(p.epsilon_cm, p.T_EM_K);
    for (auto mode : {EmTreatment::NonAdditive, EmTreatment::Additive}) {
        const auto ss = steady_state(assemble_liouvillian(mode, p));
        EXPECT_NEAR(excited_population(HilbertSpace(4), ss.rho), n / (2.0 * n + 1.0), 1e-8);
        EXPECT_NEAR(excited_population(HilbertSpace(4), ss.rho), 0.1263, 1e-4);
    }
}

TEST(SteadyState, ResidualUniquenessAndSolverAgreement)
{
    for (auto mode : {EmTreatment::NonAdditive, EmTreatment::Additive}) {
        const auto p = params(0.3, 60000.0, 12);
        const auto L = assemble_liouvillian(mode, p);
        const auto svd = steady_state(L, SteadySolver::Svd);
        const auto lu = steady_state(L, SteadySolver::Lu);
        EXPECT_LT(svd.residual, 1e-10);
        EXPECT_LT(lu.residual, 1e-10);
        EXPECT_GT(svd.second_singular, 1e-6 * p.gamma0_per_ps);
        EXPECT_GT(svd.coherence_singular, 1e-6 * p.gamma0_per_ps);
        EXPECT_LT(max_abs(svd.rho - lu.rho), 1e-9);
        EXPECT_NEAR(svd.rho.trace().real(), 1.0, 1e-12);
        EXPECT_LT(hermiticity_defect(svd.rho), 1e-14);
    }
}

TEST(SteadyState, AdditiveIndependentOfAlpha)
{
    const double ref = excited_population(HilbertSpace(10),
                                          steady_state(assemble_liouvillian(EmTreatment::Additive, params(0.025, 12000.0, 10))).rho);
    for (double a : {0.1, 0.2, 0.3}) {
        const auto ss = steady_state(assemble_liouvillian(EmTreatment::Additive, params(a, 12000.0, 10)));
        EXPECT_NEAR(excited_population(HilbertSpace(10), ss.rho), ref, 1e-10 * ref);
    }
}

TEST(EmissionRate, AdditiveEqualsBareRate)
{
    for (double a : {0.025, 0.1, 0.25}) {
        const auto L = assemble_liouvillian(EmTreatment::Additive, params(a, 300.0, 26));
        EXPECT_NEAR(emission_rate(L).relative, 1.0, 1e-10);
    }
    const auto p = params(0.1, 6000.0, 20);
    const double n = bose_occupation(p.epsilon_cm, p.T_EM_K);
    EXPECT_NEAR(emission_rate(assemble_liouvillian(EmTreatment::Additive, p)).relative, n + 1.0, 1e-10);
}

TEST(EmissionRate, NonAdditiveContinuousAtZeroCoupling)
{
    const auto L = assemble_liouvillian(EmTreatment::NonAdditive, params(1e-4, 300.0, 6));
    EXPECT_NEAR(emission_rate(L).relative, 1.0, 0.02);
}

TEST(EmissionRate, MonotoneInTruncationAtModerateCoupling)
{
    std::vector<double> r;
    for (int m = 6; m <= 16; m += 2) r.push_back(emission_rate(assemble_liouvillian(EmTreatment::NonAdditive, params(0.1, 300.0, m))).relative);
    double spread = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) spread = std::max(spread, std::abs(r[i] - r[i - 1]));
    EXPECT_LT(std::abs(r.back() - r[r.size() - 2]), 0.005 * r.back());
    EXPECT_GT(spread, 0.0);
}

TEST(FitExponentialRate, SyntheticExponential)
{
    TimeSeries ts;
    for (int i = 0; i <= 400; ++i) {
        ts.times.push_back(i);
        ts.excited_population.push_back(std::exp(-0.01 * i));
    }
    const auto fit = fit_exponential_rate(ts);
    EXPECT_NEAR(fit.rate, 0.01, 1e-10 * 0.01 + 1e-14);
    EXPECT_DOUBLE_EQ(fit.window_start, 40.0);
    EXPECT_DOUBLE_EQ(fit.window_end, 200.0);
    EXPECT_TRUE(fit.warnings.empty());
}

TEST(FitExponentialRate, ShiftsPastTransient)
{
    TimeSeries ts;
    for (int i = 0; i <= 400; ++i) {
        ts.times.push_back(i);
        const double bump = (i > 50 && i < 60) ? 0.2 : 0.0;
        ts.excited_population.push_back(std::exp(-0.01 * i) + bump);
    }
    const auto fit = fit_exponential_rate(ts);
    EXPECT_GT(fit.window_start, 50.0);
    EXPECT_FALSE(fit.warnings.empty());
    EXPECT_NEAR(fit.rate, 0.01, 1e-10);
}

TEST(FitExponentialRate, AdditiveDynamicsGivesBareRate)
{
    const auto L = assemble_liouvillian(EmTreatment::Additive, params(0.1, 300.0, 8));
    const auto ts = propagate(L, initial(L, InitialKind::ExcitedThermal), uniform_grid(0.0, 400.0, 2000));
    EXPECT_NEAR(fit_exponential_rate(ts).rate, L.params.gamma0_per_ps, 0.01 * L.params.gamma0_per_ps);
}

TEST(FitExponentialRate, NonAdditiveMatchesFluxRate)
{
    const auto L = assemble_liouvillian(EmTreatment::NonAdditive, params(0.2, 300.0, 16));
    const auto ts = propagate(L, initial(L, InitialKind::ExcitedThermal), uniform_grid(0.0, 400.0, 401));
    const double flux = emission_rate(L).rate_per_ps;
    EXPECT_NEAR(fit_exponential_rate(ts).rate, flux, 0.05 * flux);
}

TEST(ConvergeTruncation, StopsOnSmallChange)
{
    auto task = [](int m) { return 1.0 + std::pow(0.5, m); };
    const auto c = converge_truncation(task, 4);
    EXPECT_EQ(c.fock_dim, 10);
    EXPECT_EQ(c.iterates.size(), 4u);
    EXPECT_DOUBLE_EQ(c.value, task(10));
}

TEST(ConvergeTruncation, ImmediateWhenUncoupled)
{
    auto task = [](int m) { return emission_rate(assemble_liouvillian(EmTreatment::NonAdditive, params(0.0, 300.0, m))).relative; };
    const auto c = converge_truncation(task, 4);
    EXPECT_EQ(c.fock_dim, 6);
}

TEST(ConvergeTruncation, ReportsLastIterates)
{
    auto task = [](int m) { return static_cast<double>(m); };
    try {
        converge_truncation(task, 4, 0.005, 12);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("M=8"), std::string::npos);
        EXPECT_NE(msg.find("M=12"), std::string::npos);
        EXPECT_EQ(msg.find("M=6"), std::string::npos);
    }
}

TEST(ParallelMap, PreservesOrder)
{
    std::vector<double> grid;
    for (int i = 0; i < 9; ++i) grid.push_back(i);
    for (int w : {1, 3, 16}) {
        const auto out = parallel_map(grid, [](double x) { return x * x; }, w);
        ASSERT_EQ(out.size(), grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(out[i], grid[i] * grid[i]);
    }
}
