// cc_mapping.hpp: collective-coordinate mapping of the phonon bath
//
// The Drude-Lorentz bath is replaced by a single harmonic mode (frequency
// Omega, coupling eta to |e><e|) that is absorbed into the system, plus an
// Ohmic residual bath coupled to that mode through S = b^dag + b.

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "ccme/model.hpp"
#include "ccme/operators.hpp"

namespace ccme {

struct CCParams {
    double eta = 0.0;    // emitter-CC coupling (cm^-1)
    double Omega = 0.0;  // CC frequency (cm^-1)
    double reorg = 0.0;  // reorganization energy pi alpha / 2 (cm^-1)

    /// Dimensionless displacement eta / Omega between the two manifolds.
    double displacement() const { return eta / Omega; }
};

inline CCParams map_cc(const ModelParams& p)
{
    if (p.alpha_cm < 0.0) throw ConfigError("map_cc: alpha must be >= 0");
    CCParams cc;
    cc.eta = std::sqrt(std::numbers::pi * p.alpha_cm * p.nu0_cm / 2.0);
    cc.Omega = p.nu0_cm;
    cc.reorg = std::numbers::pi * p.alpha_cm / 2.0;
    return cc;
}

/// sum_m h_m^2 / nu_m for the Ohmic residual bath cut off at residual_cutoff_cm.
inline double residual_counterterm_strength(const ModelParams& p)
{
    return p.gamma_cm * p.residual_cutoff_cm / (2.0 * std::numbers::pi * p.nu0_cm);
}

struct CouplingOperators {
    Operator S;      // 1 (x) (b^dag + b)
    Operator sigma;  // |g><e| (x) 1
};

inline CouplingOperators coupling_operators(const HilbertSpace& hs)
{
    const Operator b = annihilator(hs.fock_dim());
    return {fock_op(hs, b + b.adjoint()), electronic_op(hs, qubit_sigma())};
}

/// H_S' = eps|e><e| + eta|e><e|(b^dag + b) + (pi alpha/2)|e><e| + Omega b^dag b.
inline Operator augmented_hamiltonian(const ModelParams& p, const CCParams& cc, const HilbertSpace& hs)
{
    const int m = hs.fock_dim();
    const Operator b = annihilator(m);
    const Operator x = b + b.adjoint();
    const Operator pe = qubit_excited_projector();

    Operator h = electronic_op(hs, (p.epsilon_cm + cc.reorg) * pe);
    h += tensor(pe, cc.eta * x);
    h += fock_op(hs, cc.Omega * number_operator(m));
    if (p.include_residual_counterterm) {
        h += fock_op(hs, residual_counterterm_strength(p) * (x * x));
    }
    return h;
}

inline EigenSystem augmented_eigensystem(const ModelParams& p, const CCParams& cc, const HilbertSpace& hs)
{
    const auto ops = coupling_operators(hs);
    return hermitian_eig(augmented_hamiltonian(p, cc, hs), ops.S, ops.sigma);
}

/// <psi_j| sigma^dag sigma |psi_j> for every eigenvector.
inline std::vector<double> excited_character(const EigenSystem& es, const HilbertSpace& hs)
{
    std::vector<double> w(static_cast<std::size_t>(es.dim()));
    for (int j = 0; j < es.dim(); ++j) {
        double s = 0.0;
        for (int n = 0; n < hs.fock_dim(); ++n) s += std::norm(es.vectors(hs.index(Electronic::Excited, n), j));
        w[static_cast<std::size_t>(j)] = s;
    }
    return w;
}

/// Manifold label by thresholding the excited character at 0.5.
inline Electronic manifold_of(const EigenSystem& es, const HilbertSpace& hs, int j)
{
    return excited_character(es, hs)[static_cast<std::size_t>(j)] > 0.5 ? Electronic::Excited
                                                                        : Electronic::Ground;
}

/// Energy of the lowest excited-manifold eigenstate above the overall ground state.
inline double zero_phonon_gap(const EigenSystem& es, const HilbertSpace& hs)
{
    const auto w = excited_character(es, hs);
    for (int j = 0; j < es.dim(); ++j) {
        if (w[static_cast<std::size_t>(j)] > 0.5) return es.values(j) - es.values(0);
    }
    throw ConvergenceError("zero_phonon_gap: no excited-manifold eigenstate");
}

} // namespace ccme
