// oracles.hpp: independent reference results
//
// Franck-Condon tables (closed form and matrix exponential), the golden-rule
// emission rate, and the exact coherence dynamics of the independent boson
// model. Nothing here uses the master-equation machinery except
// validate_ccme_vs_ibm, which compares the two.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "ccme/cc_mapping.hpp"
#include "ccme/dissipators.hpp"
#include "ccme/dynamics.hpp"
#include "ccme/model.hpp"
#include "ccme/operators.hpp"

namespace ccme {

// ---------------------------------------------------------------------------
// Franck-Condon factors

/// |<m~|n>|^2 with |m~> = D(d)|m>, row m (displaced), column n.
struct FCTable {
    double displacement = 0.0;
    int fock_dim = 0;
    Eigen::MatrixXd factors;         // closed form
    Eigen::MatrixXd matrix_factors;  // from the padded matrix exponential
    double max_disagreement = 0.0;
    std::vector<std::string> warnings;

    double operator()(int m, int n) const { return factors(m, n); }
};

/// |<m|D(d)|n>|^2 = (n!/m!) d^{2(m-n)} e^{-d^2} [L_n^{(m-n)}(d^2)]^2 for m >= n, symmetric otherwise.
inline double fc_closed_form(double d, int m, int n)
{
    if (m < n) std::swap(m, n);
    const double x = d * d;
    if (x == 0.0) return m == n ? 1.0 : 0.0;
    const int k = m - n;
    const double lag = std::assoc_laguerre(static_cast<unsigned>(n), static_cast<unsigned>(k), x);
    if (lag == 0.0) return 0.0;
    const double log_mag = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) + k * std::log(x) - x + 2.0 * std::log(std::abs(lag));
    return std::exp(log_mag);
}

/// Weight containment heuristic for a truncation of M levels at displacement d.
inline bool fc_contained(double d, int fock_dim) { return fock_dim >= d * d + 6.0 * std::abs(d) + 4.0; }

inline FCTable fc_factors(double d, int fock_dim)
{
    if (fock_dim < 1) throw DimensionMismatch("fc_factors: Fock dimension must be positive");
    FCTable t;
    t.displacement = d;
    t.fock_dim = fock_dim;
    t.factors.resize(fock_dim, fock_dim);
    for (int m = 0; m < fock_dim; ++m) {
        for (int n = 0; n < fock_dim; ++n) t.factors(m, n) = fc_closed_form(d, m, n);
    }

    // The truncated exponential is only trusted well below its top level.
    const int padded = fock_dim + 40 + static_cast<int>(std::ceil(d * d + 6.0 * std::abs(d)));
    const Operator u = displacement(d, padded);
    t.matrix_factors = u.topLeftCorner(fock_dim, fock_dim).cwiseAbs2().transpose();
    t.max_disagreement = (t.factors - t.matrix_factors).cwiseAbs().maxCoeff();

    if (!fc_contained(d, fock_dim)) {
        std::ostringstream os;
        os << "FC table with M = " << fock_dim << " does not contain the displaced weight for d = " << d;
        t.warnings.push_back(os.str());
    }
    return t;
}

// ---------------------------------------------------------------------------
// Golden-rule rate

enum class GoldenRuleDensity {
    True,    // J evaluated at each vibronic transition frequency
    Frozen,  // J held at epsilon
};

enum class GoldenRuleIndexing {
    ExcitedThermal,  // thermal weights on the initial (displaced, excited) level m
    AsPrinted,       // thermal weights on the undisplaced level n
};

struct GoldenRuleOptions {
    GoldenRuleDensity density = GoldenRuleDensity::True;
    GoldenRuleIndexing indexing = GoldenRuleIndexing::ExcitedThermal;
};

struct GoldenRuleRate {
    double rate_per_ps = 0.0;
    double relative = 0.0;  // in units of Gamma0
};

/// 2 pi sum_{m,n} p J(eps + (m - n) Omega) |<m~|n>|^2.
inline GoldenRuleRate golden_rule_rate(const ModelParams& p, const CCParams& cc, const FCTable& fc,
                                       const GoldenRuleOptions& opt = {})
{
    const int m_dim = fc.fock_dim;
    const auto weights = thermal_fock_populations(cc.Omega, p.kT_R(), m_dim);
    double sum = 0.0;  // cm^-1
    for (int m = 0; m < m_dim; ++m) {
        for (int n = 0; n < m_dim; ++n) {
            const double w = p.epsilon_cm + (m - n) * cc.Omega;
            const double j = opt.density == GoldenRuleDensity::Frozen ? em_sd(p.epsilon_cm, p) : em_sd(w, p);
            const double pw = weights[static_cast<std::size_t>(opt.indexing == GoldenRuleIndexing::ExcitedThermal ? m : n)];
            sum += pw * j * fc(m, n);
        }
    }
    GoldenRuleRate r;
    r.rate_per_ps = units::wavenumber_to_rad_per_ps(2.0 * std::numbers::pi * sum);
    r.relative = p.gamma0_per_ps > 0.0 ? r.rate_per_ps / p.gamma0_per_ps : 0.0;
    return r;
}

/// Fock range for golden-rule sums: thermally relevant displaced rows (m up to
/// about 20 at room temperature) spread to n ~ (sqrt(m) + d)^2.
inline int golden_rule_fock_dim(double d)
{
    return 48 + static_cast<int>(std::ceil(d * d + 10.0 * std::abs(d)));
}

/// Golden-rule rate at a bare displacement d, with the Fock range sized for containment.
inline GoldenRuleRate golden_rule_rate_at(const ModelParams& p, double d, const GoldenRuleOptions& opt = {})
{
    return golden_rule_rate(p, map_cc(p), fc_factors(d, golden_rule_fock_dim(d)), opt);
}

// ---------------------------------------------------------------------------
// Independent boson model

inline constexpr double kIbmQuadratureTolerance = 1e-9;

struct IBMSolution {
    std::vector<double> times;            // ps
    std::vector<double> decoherence;      // Gamma(t)
    std::vector<double> phase;            // Phi(t)
    std::vector<Complex> coherence;       // rho_eg(t)
    double excited_population = 0.0;      // static
    double max_quadrature_error = 0.0;    // relative
};

namespace detail {

// Near zero frequency J(w)/w^2 coth(w/2kT) ~ A/w^2 and J(w)/w^2 ~ B/w. Those
// singular parts are carried by e^{-s w}(1/w^2 + s/w) and e^{-s w}/w, whose
// transforms are closed form; the smooth remainders go through quadrature.
struct IbmIntegrands {
    ModelParams p;
    double kT;
    double A;
    double B;
    double s;

    explicit IbmIntegrands(const ModelParams& params) : p(params), kT(params.kT_R())
    {
        B = p.alpha_cm * p.gamma_cm / (p.nu0_cm * p.nu0_cm);
        A = 2.0 * kT * B;
        s = 1.0 / p.nu0_cm;
    }

    double coth_part(double w) const
    {
        const double x = w / (2.0 * kT);
        const double c = x < 1e-6 ? 1.0 / x + x / 3.0 : 1.0 / std::tanh(x);
        return phonon_sd(w, p) * c / (w * w);
    }

    // coth_part - A e^{-s w}(1/w^2 + s/w), smooth at w = 0
    double decoherence_remainder(double w) const
    {
        if (w < 1e-3 * p.nu0_cm) {
            const double x = 1e-3 * p.nu0_cm;
            const double y = 2.0 * x;
            // the subtraction cancels catastrophically below x; extrapolate linearly
            const double fx = coth_part(x) - A * std::exp(-s * x) * (1.0 / (x * x) + s / x);
            const double fy = coth_part(y) - A * std::exp(-s * y) * (1.0 / (y * y) + s / y);
            return fx + (fx - fy) * (x - w) / (y - x);
        }
        return coth_part(w) - A * std::exp(-s * w) * (1.0 / (w * w) + s / w);
    }

    // J(w)/w^2 - B e^{-s w}/w
    double phase_remainder(double w) const
    {
        if (w < 1e-3 * p.nu0_cm) {
            const double x = 1e-3 * p.nu0_cm;
            const double y = 2.0 * x;
            const double fx = phonon_sd(x, p) / (x * x) - B * std::exp(-s * x) / x;
            const double fy = phonon_sd(y, p) / (y * y) - B * std::exp(-s * y) / y;
            return fx + (fx - fy) * (x - w) / (y - x);
        }
        return phonon_sd(w, p) / (w * w) - B * std::exp(-s * w) / w;
    }
};

} // namespace detail

/// Exact rho_eg(t) = rho_eg(0) e^{-i eps t} e^{-Gamma(t)} e^{-i Phi(t)} for Gamma0 = 0, with
/// Gamma(t) = int J(w)/w^2 coth(w/2kT_R)(1 - cos wt) dw and Phi(t) = int J(w)/w^2 sin(wt) dw.
/// The excited state includes the reorganization shift, so the zero-phonon line sits at eps.
inline IBMSolution ibm_exact(const ModelParams& p, Complex rho_eg0, double rho_ee0, const std::vector<double>& times)
{
    namespace bq = boost::math::quadrature;
    const detail::IbmIntegrands f(p);
    const auto remainder_g = [&](double w) { return f.decoherence_remainder(w); };
    const auto remainder_p = [&](double w) { return f.phase_remainder(w); };

    double err0 = 0.0;
    const double static_part =
        bq::gauss_kronrod<double, 61>::integrate(remainder_g, 0.0, std::numeric_limits<double>::infinity(), 15,
                                                 1e-13, &err0);

    bq::ooura_fourier_cos<double> cos_transform(1e-11);
    bq::ooura_fourier_sin<double> sin_transform(1e-11);

    IBMSolution sol;
    sol.excited_population = rho_ee0;
    sol.max_quadrature_error = std::abs(static_part) > 0.0 ? err0 / std::abs(static_part) : 0.0;
    for (double t : times) {
        if (t < 0.0) throw ConfigError("ibm_exact: times must be nonnegative");
        const double tau = units::kRadPerPsPerWavenumber * t;  // cm
        double gamma_t = 0.0;
        double phi_t = 0.0;
        if (tau > 0.0) {
            const auto [c, cerr] = cos_transform.integrate(remainder_g, tau);
            const auto [sv, serr] = sin_transform.integrate(remainder_p, tau);
            gamma_t = f.A * tau * std::atan(tau / f.s) + static_part - c;
            phi_t = f.B * std::atan(tau / f.s) + sv;
            const double rel = std::max(cerr / std::max(std::abs(gamma_t), 1e-300),
                                        serr / std::max(std::abs(phi_t), 1e-300));
            // both transforms vanish as tau -> 0 and only absolute accuracy is meaningful there
            const double scale = std::max({std::abs(gamma_t), std::abs(phi_t), 1e-3});
            const double err = std::max(cerr, serr) / scale;
            sol.max_quadrature_error = std::max(sol.max_quadrature_error, std::min(rel, err));
        }
        const double phase = p.epsilon_cm * tau + phi_t;
        sol.times.push_back(t);
        sol.decoherence.push_back(gamma_t);
        sol.phase.push_back(phi_t);
        sol.coherence.push_back(rho_eg0 * std::exp(-gamma_t) * std::polar(1.0, -phase));
    }
    if (sol.max_quadrature_error > kIbmQuadratureTolerance) {
        std::ostringstream os;
        os << "ibm_exact: quadrature error " << sol.max_quadrature_error << " exceeds " << kIbmQuadratureTolerance;
        throw ConvergenceError(os.str());
    }
    return sol;
}

struct IbmComparison {
    std::vector<double> times;
    std::vector<double> ccme_sigma_x;
    std::vector<double> ccme_sigma_y;
    std::vector<double> exact_sigma_x;
    std::vector<double> exact_sigma_y;
    double max_deviation_x = 0.0;
    double max_deviation_y = 0.0;
    double max_population_drift = 0.0;
    int fock_dim = 0;

    double max_deviation() const { return std::max(max_deviation_x, max_deviation_y); }
};

/// Runs the CC master equation with Gamma0 = 0 from the plus-coherence state and
/// compares <sigma_x>, <sigma_y> against the exact solution on the given grid.
inline IbmComparison validate_ccme_vs_ibm(ModelParams p, const std::vector<double>& times)
{
    p.gamma0_per_ps = 0.0;
    p.validate();
    const auto L = assemble_liouvillian(EmTreatment::NonAdditive, p);
    const auto init = make_initial_state({InitialKind::PlusCoherence, {}}, p, L.cc, L.hs);
    PropagationOptions opt;
    opt.record_min_eigenvalue = false;
    const TimeSeries ts = propagate(L, init.rho, times, opt);

    const IBMSolution exact = ibm_exact(p, reduced_coherence(L.hs, init.rho), excited_population(L.hs, init.rho), times);

    IbmComparison cmp;
    cmp.fock_dim = p.fock_dim;
    cmp.times = times;
    cmp.ccme_sigma_x = ts.sigma_x;
    cmp.ccme_sigma_y = ts.sigma_y;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Complex c = exact.coherence[i];
        cmp.exact_sigma_x.push_back(2.0 * c.real());
        cmp.exact_sigma_y.push_back(-2.0 * c.imag());
        cmp.max_deviation_x = std::max(cmp.max_deviation_x, std::abs(cmp.exact_sigma_x[i] - ts.sigma_x[i]));
        cmp.max_deviation_y = std::max(cmp.max_deviation_y, std::abs(cmp.exact_sigma_y[i] - ts.sigma_y[i]));
        cmp.max_population_drift =
            std::max(cmp.max_population_drift, std::abs(ts.excited_population[i] - exact.excited_population));
    }
    return cmp;
}

} // namespace ccme
