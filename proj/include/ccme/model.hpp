// model.hpp: physical parameters, unit conversions and spectral densities
//
// Energies are wavenumbers (cm^-1), temperatures kelvin, times picoseconds.
// An energy E in cm^-1 corresponds to the angular frequency 2*pi*c*E in rad/ps.

#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ccme/errors.hpp"

namespace ccme {

namespace units {

inline constexpr double kSpeedOfLight = 0.0299792458;  // cm / ps
inline constexpr double kBoltzmann = 0.6950348;        // cm^-1 / K
inline constexpr double kRadPerPsPerWavenumber = 2.0 * std::numbers::pi * kSpeedOfLight;

inline constexpr double wavenumber_to_rad_per_ps(double e) { return e * kRadPerPsPerWavenumber; }
inline constexpr double rad_per_ps_to_wavenumber(double w) { return w / kRadPerPsPerWavenumber; }
inline constexpr double thermal_energy(double kelvin) { return kBoltzmann * kelvin; }

} // namespace units

/// Shape of the electromagnetic spectral density.
enum class EmShape {
    Cubic,  // Gamma0 w^3 / (2 pi eps^3)
    Flat,   // Gamma0 / (2 pi) for w > 0
};

/// Which transition frequency the non-additive EM rates are sampled at.
enum class EmGapConvention {
    Positive,  // psi_k - psi_j for sigma_jk, i.e. the energy released by the photon
    Signed,    // lambda_jk = psi_j - psi_k exactly as indexed
};

/// Continuation of the EM spectral density to w < 0.
enum class EmNegativeFrequency {
    Clamp,  // J(w <= 0) = 0
    Odd,    // J(-w) = -J(w)
};

struct ModelParams {
    double epsilon_cm = 8065.0;
    double alpha_cm = 0.1 * 8065.0;
    double nu0_cm = 400.0;
    double gamma_cm = 80.0;
    double gamma0_per_ps = 1.0 / 100.0;  // bare spontaneous emission rate
    double T_R_K = 300.0;
    double T_EM_K = 300.0;
    int fock_dim = 8;

    EmShape em_shape = EmShape::Cubic;
    EmGapConvention em_gap = EmGapConvention::Positive;
    EmNegativeFrequency em_negative = EmNegativeFrequency::Clamp;

    // Adds (b + b^dag)^2 * sum_m h_m^2 / nu_m to the augmented Hamiltonian.
    // The Ohmic residual density needs a cutoff for that sum to be finite.
    bool include_residual_counterterm = false;
    double residual_cutoff_cm = 4000.0;

    /// Gamma0 expressed as an energy.
    double gamma0_cm() const { return units::rad_per_ps_to_wavenumber(gamma0_per_ps); }
    double kT_R() const { return units::thermal_energy(T_R_K); }
    double kT_EM() const { return units::thermal_energy(T_EM_K); }

    static ModelParams with_lifetime_ps(double lifetime_ps)
    {
        ModelParams p;
        p.gamma0_per_ps = 1.0 / lifetime_ps;
        return p;
    }

    /// Throws ConfigError listing every violated constraint.
    void validate() const
    {
        std::vector<std::string> problems;
        auto require = [&](bool ok, const char* msg) {
            if (!ok) problems.emplace_back(msg);
        };
        require(std::isfinite(epsilon_cm) && epsilon_cm > 0.0, "epsilon must be > 0");
        require(std::isfinite(alpha_cm) && alpha_cm >= 0.0, "alpha must be >= 0");
        require(std::isfinite(nu0_cm) && nu0_cm > 0.0, "nu0 must be > 0");
        require(std::isfinite(gamma_cm) && gamma_cm >= 0.0, "gamma must be >= 0");
        require(std::isfinite(gamma0_per_ps) && gamma0_per_ps >= 0.0, "Gamma0 must be >= 0");
        require(std::isfinite(T_R_K) && T_R_K > 0.0, "T_R must be > 0");
        require(std::isfinite(T_EM_K) && T_EM_K > 0.0, "T_EM must be > 0");
        require(fock_dim >= 2, "fock_dim must be >= 2");
        require(!include_residual_counterterm || residual_cutoff_cm > 0.0,
                "residual_cutoff must be > 0 when the counter term is enabled");
        if (!problems.empty()) {
            std::ostringstream os;
            os << "invalid model parameters:";
            for (const auto& s : problems) os << "\n  " << s;
            throw ConfigError(os.str());
        }
    }
};

/// Drude-Lorentz (underdamped Brownian) phonon spectral density, odd in nu.
inline double phonon_sd(double nu, const ModelParams& p)
{
    const double nu0sq = p.nu0_cm * p.nu0_cm;
    const double detuning = nu * nu - nu0sq;
    const double denom = detuning * detuning + p.gamma_cm * p.gamma_cm * nu * nu;
    if (denom == 0.0) return 0.0;
    return p.alpha_cm * nu0sq * p.gamma_cm * nu / denom;
}

/// Ohmic density of the residual bath seen by the collective coordinate.
inline double residual_sd(double nu, const ModelParams& p)
{
    return p.gamma_cm * nu / (2.0 * std::numbers::pi * p.nu0_cm);
}

/// Electromagnetic spectral density; J(epsilon) = Gamma0 / (2 pi).
inline double em_sd(double omega, const ModelParams& p)
{
    if (omega < 0.0) {
        if (p.em_negative == EmNegativeFrequency::Clamp) return 0.0;
        return -em_sd(-omega, p);
    }
    const double j0 = p.gamma0_cm() / (2.0 * std::numbers::pi);
    if (p.em_shape == EmShape::Flat) return omega > 0.0 ? j0 : 0.0;
    const double x = omega / p.epsilon_cm;
    return j0 * x * x * x;
}

inline constexpr double kZeroFrequencyTolerance = 1e-12;  // cm^-1

/// Bose-Einstein occupation; n(-w) = -(n(w) + 1).
inline double bose_occupation(double omega, double kelvin)
{
    if (std::abs(omega) <= kZeroFrequencyTolerance) {
        throw DegenerateGapError("bose_occupation: zero frequency, use the analytic limit");
    }
    return 1.0 / std::expm1(omega / units::thermal_energy(kelvin));
}

} // namespace ccme
