// dissipators.hpp: residual-bath and electromagnetic superoperators, Liouvillian assembly
//
// All rate operators are built in the eigenbasis of the augmented Hamiltonian
// H_S' without any secular approximation. Imaginary (level shift) parts of the
// bath response are not included.

#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

#include "ccme/cc_mapping.hpp"
#include "ccme/model.hpp"
#include "ccme/operators.hpp"

namespace ccme {

enum class EmTreatment { NonAdditive, Additive };

inline std::string_view to_string(EmTreatment m)
{
    return m == EmTreatment::Additive ? "additive" : "nonadditive";
}

/// Gaps with |lambda| below this fraction of epsilon are treated as exactly zero.
inline constexpr double kDegenerateGapFraction = 1e-9;

inline bool is_degenerate_gap(double lambda, const ModelParams& p)
{
    return std::abs(lambda) < kDegenerateGapFraction * p.epsilon_cm;
}

/// (pi/2) J_R(lambda) [coth(lambda / 2kT_R) + 1], with its lambda -> 0 limit gamma kT_R / (2 nu0).
inline double residual_rate(double lambda, const ModelParams& p)
{
    const double kT = p.kT_R();
    if (is_degenerate_gap(lambda, p)) return p.gamma_cm * kT / (2.0 * p.nu0_cm);
    // coth(x/2) + 1 = -2 / expm1(-x)
    const double thermal = -2.0 / std::expm1(-lambda / kT);
    return 0.5 * std::numbers::pi * residual_sd(lambda, p) * thermal;
}

/// Emission rate pi J(w) (n(w) + 1); zero at zero frequency.
inline double em_rate_down(double omega, const ModelParams& p)
{
    if (is_degenerate_gap(omega, p)) return 0.0;
    const double j = em_sd(omega, p);
    if (j == 0.0) return 0.0;
    return std::numbers::pi * j * (bose_occupation(omega, p.T_EM_K) + 1.0);
}

/// Absorption rate pi J(w) n(w); zero at zero frequency.
inline double em_rate_up(double omega, const ModelParams& p)
{
    if (is_degenerate_gap(omega, p)) return 0.0;
    const double j = em_sd(omega, p);
    if (j == 0.0) return 0.0;
    return std::numbers::pi * j * bose_occupation(omega, p.T_EM_K);
}

struct RateOperators {
    Operator zeta;
    Operator chi1;
    Operator chi2;
    Eigen::MatrixXd rate_down;  // Gamma_down sampled for each eigenbasis pair (j, k)
    Eigen::MatrixXd rate_up;
};

/// zeta = sum_jk (pi/2) J_R(lambda_jk)[coth(lambda_jk/2kT_R) + 1] S_jk |psi_j><psi_k|.
inline Operator build_zeta(const EigenSystem& es, const ModelParams& p)
{
    const int d = es.dim();
    Operator z(d, d);
    for (int k = 0; k < d; ++k) {
        for (int j = 0; j < d; ++j) z(j, k) = residual_rate(es.gap(j, k), p) * es.S(j, k);
    }
    return es.from_eigenbasis(z);
}

/// Transition frequency at which the sigma_jk element is sampled.
inline double em_sample_frequency(const EigenSystem& es, int j, int k, const ModelParams& p)
{
    return p.em_gap == EmGapConvention::Positive ? es.gap(k, j) : es.gap(j, k);
}

struct ChiPair {
    Operator chi1;
    Operator chi2;
    Eigen::MatrixXd rate_down;
    Eigen::MatrixXd rate_up;
};

/// chi1 = sum_jk sigma_jk Gamma_down |psi_j><psi_k|,
/// chi2 = sum_jk conj(sigma_jk) Gamma_up |psi_k><psi_j|.
inline ChiPair build_chi(const EigenSystem& es, const ModelParams& p)
{
    const int d = es.dim();
    Operator c1 = Operator::Zero(d, d);
    Operator c2 = Operator::Zero(d, d);
    Eigen::MatrixXd down = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd up = Eigen::MatrixXd::Zero(d, d);
    const double tiny = 1e-14 * std::max(1.0, max_abs(es.sigma));
    for (int k = 0; k < d; ++k) {
        for (int j = 0; j < d; ++j) {
            const Complex s = es.sigma(j, k);
            if (std::abs(s) <= tiny) continue;
            const double w = em_sample_frequency(es, j, k, p);
            down(j, k) = em_rate_down(w, p);
            up(j, k) = em_rate_up(w, p);
            c1(j, k) = s * down(j, k);
            c2(k, j) = std::conj(s) * up(j, k);
        }
    }
    return {es.from_eigenbasis(c1), es.from_eigenbasis(c2), std::move(down), std::move(up)};
}

/// [S, rho zeta] + [zeta^dag rho, S]
inline Operator apply_K_R(const Operator& rho, const Operator& S, const Operator& zeta)
{
    const Operator rz = rho * zeta;
    const Operator zr = zeta.adjoint() * rho;
    return S * rz - rz * S + zr * S - S * zr;
}

/// -[sigma^dag, chi1 rho] - [sigma, chi2 rho] + h.c.
inline Operator apply_K_EM_nonadditive(const Operator& rho, const Operator& sigma, const Operator& chi1,
                                       const Operator& chi2)
{
    const Operator sd = sigma.adjoint();
    const Operator a = chi1 * rho;
    const Operator b = chi2 * rho;
    const Operator half = -(sd * a - a * sd) - (sigma * b - b * sigma);
    return half + half.adjoint();
}

/// 2 O rho O^dag - {O^dag O, rho}
inline Operator lindblad_dissipator(const Operator& o, const Operator& rho)
{
    const Operator od = o.adjoint();
    const Operator odo = od * o;
    return 2.0 * o * rho * od - odo * rho - rho * odo;
}

/// (Gamma0/2)(n(eps)+1) L_sigma + (Gamma0/2) n(eps) L_sigma^dag, blind to the vibrations.
inline Operator apply_K_EM_additive(const Operator& rho, const Operator& sigma, const ModelParams& p)
{
    const double down = em_rate_down(p.epsilon_cm, p);
    const double up = em_rate_up(p.epsilon_cm, p);
    return down * lindblad_dissipator(sigma, rho) + up * lindblad_dissipator(sigma.adjoint(), rho);
}

// ---------------------------------------------------------------------------

struct LiouvillianSpec {
    EmTreatment mode = EmTreatment::NonAdditive;
    ModelParams params;
    CCParams cc;
    HilbertSpace hs{2};
    Operator hamiltonian;
    CouplingOperators ops;
    EigenSystem eig;
    RateOperators rates;
    SandwichMap generator;  // in ps^-1

    int dim() const { return hs.dim(); }

    Operator apply(const Operator& rho) const { return generator.apply(rho); }

    SuperOperator superoperator() const { return generator.full_matrix(); }

    Eigen::MatrixXcd sector_matrix(Sector s) const
    {
        const auto idx = sector_indices(hs, s);
        return generator.matrix(idx);
    }

    /// Max-norm of the operator T with Tr L[rho] = Tr(T rho); zero for a trace-preserving L.
    double trace_defect() const
    {
        Operator t = generator.drift + generator.drift.adjoint();
        for (const auto& [a, b] : generator.terms) t += b * a;
        return max_abs(t);
    }
};

inline LiouvillianSpec assemble_liouvillian(EmTreatment mode, const ModelParams& p, const CCParams& cc,
                                            const HilbertSpace& hs)
{
    LiouvillianSpec L;
    L.mode = mode;
    L.params = p;
    L.cc = cc;
    L.hs = hs;
    L.hamiltonian = augmented_hamiltonian(p, cc, hs);
    L.ops = coupling_operators(hs);
    L.eig = hermitian_eig(L.hamiltonian, L.ops.S, L.ops.sigma);

    const Operator& S = L.ops.S;
    const Operator& sigma = L.ops.sigma;
    const Operator sd = sigma.adjoint();

    L.rates.zeta = build_zeta(L.eig, p);
    if (mode == EmTreatment::NonAdditive) {
        auto chi = build_chi(L.eig, p);
        L.rates.chi1 = std::move(chi.chi1);
        L.rates.chi2 = std::move(chi.chi2);
        L.rates.rate_down = std::move(chi.rate_down);
        L.rates.rate_up = std::move(chi.rate_up);
    } else {
        const double down = em_rate_down(p.epsilon_cm, p);
        const double up = em_rate_up(p.epsilon_cm, p);
        L.rates.chi1 = down * sigma;
        L.rates.chi2 = up * sd;
        L.rates.rate_down = Eigen::MatrixXd::Constant(hs.dim(), hs.dim(), down);
        L.rates.rate_up = Eigen::MatrixXd::Constant(hs.dim(), hs.dim(), up);
    }
    const Operator& zeta = L.rates.zeta;
    const Operator& chi1 = L.rates.chi1;
    const Operator& chi2 = L.rates.chi2;

    SandwichMap g;
    g.drift = -kI * L.hamiltonian - S * zeta.adjoint() - sd * chi1 - sigma * chi2;
    g.terms.emplace_back(S, zeta);
    g.terms.emplace_back(zeta.adjoint(), S);
    g.terms.emplace_back(chi1, sd);
    g.terms.emplace_back(sigma, chi1.adjoint());
    g.terms.emplace_back(chi2, sigma);
    g.terms.emplace_back(sd, chi2.adjoint());
    L.generator = g.scaled(units::kRadPerPsPerWavenumber);
    return L;
}

inline LiouvillianSpec assemble_liouvillian(EmTreatment mode, const ModelParams& p)
{
    p.validate();
    return assemble_liouvillian(mode, p, map_cc(p), HilbertSpace(p.fock_dim));
}

} // namespace ccme
