// dynamics.hpp: initial states, time propagation, steady states and emission rates

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "ccme/cc_mapping.hpp"
#include "ccme/dissipators.hpp"
#include "ccme/operators.hpp"

namespace ccme {

// ---------------------------------------------------------------------------
// Observables

/// <sigma^dag sigma>
inline double excited_population(const HilbertSpace& hs, const Operator& rho)
{
    double s = 0.0;
    for (int n = 0; n < hs.fock_dim(); ++n) {
        const int i = hs.index(Electronic::Excited, n);
        s += rho(i, i).real();
    }
    return s;
}

/// rho_eg of the reduced emitter state, i.e. <sigma>.
inline Complex reduced_coherence(const HilbertSpace& hs, const Operator& rho)
{
    Complex s{0.0, 0.0};
    for (int n = 0; n < hs.fock_dim(); ++n) {
        s += rho(hs.index(Electronic::Excited, n), hs.index(Electronic::Ground, n));
    }
    return s;
}

inline double sigma_x(const HilbertSpace& hs, const Operator& rho) { return 2.0 * reduced_coherence(hs, rho).real(); }

/// i (rho_eg - rho_ge)
inline double sigma_y(const HilbertSpace& hs, const Operator& rho) { return -2.0 * reduced_coherence(hs, rho).imag(); }

inline double min_eigenvalue(const Operator& rho)
{
    const Operator h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

/// Sum of the ground-manifold diagonal, sum_n <g,n| A |g,n>.
inline double ground_manifold_trace(const HilbertSpace& hs, const Operator& a)
{
    double s = 0.0;
    for (int n = 0; n < hs.fock_dim(); ++n) {
        const int i = hs.index(Electronic::Ground, n);
        s += a(i, i).real();
    }
    return s;
}

// ---------------------------------------------------------------------------
// Initial states

enum class InitialKind {
    ExcitedThermal,           // |e><e| (x) rho_th
    ExcitedDisplacedThermal,  // |e><e| (x) e^{-X} rho_th e^{X},  X = (eta/Omega)(b^dag - b)
    PlusCoherence,            // (|e>+|g>)(<e|+<g|)/2 (x) rho_th
    Custom,
};

struct InitialStateSpec {
    InitialKind kind = InitialKind::ExcitedThermal;
    Operator custom;  // used when kind == Custom
};

struct PreparedState {
    Operator rho;
    std::vector<std::string> warnings;
};

inline void check_density_operator(const Operator& rho, double tol = 1e-10)
{
    if (rho.rows() != rho.cols()) throw DimensionMismatch("density operator must be square");
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > tol) throw ConfigError("density operator must have unit trace");
    if (hermiticity_defect(rho) > tol) throw ConfigError("density operator must be Hermitian");
    if (min_eigenvalue(rho) < -tol) throw ConfigError("density operator must be positive semidefinite");
}

inline constexpr double kTopLevelLeakageTolerance = 1e-6;

inline PreparedState make_initial_state(const InitialStateSpec& spec, const ModelParams& p, const CCParams& cc,
                                        const HilbertSpace& hs)
{
    const int m = hs.fock_dim();
    PreparedState out;
    const Operator rho_th = thermal_fock_state(cc.Omega, p.kT_R(), m);
    if (spec.kind != InitialKind::Custom && rho_th(m - 1, m - 1).real() > 1e-8) {
        out.warnings.push_back("thermal CC state has population above 1e-8 in the top Fock level");
    }
    Operator electronic = Operator::Zero(2, 2);
    switch (spec.kind) {
    case InitialKind::ExcitedThermal:
        electronic(1, 1) = 1.0;
        out.rho = tensor(electronic, rho_th);
        break;
    case InitialKind::ExcitedDisplacedThermal: {
        electronic(1, 1) = 1.0;
        // e^{-X} = D(-eta/Omega)
        const Operator shift = displacement(-cc.displacement(), m);
        const Operator displaced = shift * rho_th * shift.adjoint();
        out.rho = tensor(electronic, displaced);
        const double top = displaced.diagonal().real().tail(std::min(2, m)).sum();
        if (top > kTopLevelLeakageTolerance) {
            std::ostringstream os;
            os << "displaced thermal state has weight " << top << " in the top two Fock levels";
            out.warnings.push_back(os.str());
        }
        break;
    }
    case InitialKind::PlusCoherence:
        electronic.setConstant(0.5);
        out.rho = tensor(electronic, rho_th);
        break;
    case InitialKind::Custom:
        if (spec.custom.rows() != hs.dim()) throw DimensionMismatch("custom initial state has the wrong dimension");
        out.rho = spec.custom;
        break;
    }
    check_density_operator(out.rho);
    return out;
}

// ---------------------------------------------------------------------------
// Propagation

struct TimeSeries {
    std::vector<double> times;  // ps
    std::vector<double> excited_population;
    std::vector<double> sigma_x;
    std::vector<double> sigma_y;
    std::vector<double> trace;
    std::vector<double> min_eigenvalue;
    double max_hermiticity_defect = 0.0;
    int substeps = 1;  // per grid interval after any step halving
    Operator final_state;
    std::vector<std::string> warnings;
};

struct PropagationOptions {
    double trace_tolerance = 1e-8;
    int max_halvings = 6;
    double positivity_floor = -1e-6;
    bool record_min_eigenvalue = true;
    double rk4_step_factor = 0.25;  // h * |L| bound per RK4 step on non-uniform grids
};

namespace detail {

// Orthonormal real coordinates on the Hermitian operators of the population
// sector: E_ii, (E_ij + E_ji)/sqrt2 and i(E_ij - E_ji)/sqrt2 for i < j.
// The restriction of a Hermiticity-preserving L to this real space has the same
// singular values as the complex sector matrix.
struct HermitianCoords {
    enum Kind { Diagonal, Symmetric, Antisymmetric };
    struct Coord {
        int i;
        int j;
        Kind kind;
    };
    int dim = 0;
    std::vector<Coord> coords;
    std::vector<Eigen::Index> position;  // vec index -> row in the sector matrix, or -1

    HermitianCoords(const HilbertSpace& hs, std::span<const Eigen::Index> idx) : dim(hs.dim())
    {
        position.assign(static_cast<std::size_t>(dim) * dim, -1);
        for (std::size_t r = 0; r < idx.size(); ++r) position[static_cast<std::size_t>(idx[r])] = static_cast<Eigen::Index>(r);
        for (int j = 0; j < dim; ++j) {
            for (int i = 0; i <= j; ++i) {
                if (hs.electronic(i) != hs.electronic(j)) continue;
                if (i == j) {
                    coords.push_back({i, j, Diagonal});
                } else {
                    coords.push_back({i, j, Symmetric});
                    coords.push_back({i, j, Antisymmetric});
                }
            }
        }
    }

    Eigen::Index pos(int i, int j) const { return position[static_cast<std::size_t>(i + dim * j)]; }

    Eigen::MatrixXd real_matrix(const Eigen::MatrixXcd& m) const
    {
        const double r2 = std::numbers::sqrt2;
        const auto n = static_cast<Eigen::Index>(coords.size());
        Eigen::MatrixXd out(n, n);
        Eigen::VectorXcd v(m.rows());
        for (Eigen::Index c = 0; c < n; ++c) {
            const Coord& cc = coords[static_cast<std::size_t>(c)];
            switch (cc.kind) {
            case Diagonal: v = m.col(pos(cc.i, cc.i)); break;
            case Symmetric: v = (m.col(pos(cc.i, cc.j)) + m.col(pos(cc.j, cc.i))) / r2; break;
            case Antisymmetric: v = kI * (m.col(pos(cc.i, cc.j)) - m.col(pos(cc.j, cc.i))) / r2; break;
            }
            for (Eigen::Index r = 0; r < n; ++r) {
                const Coord& rr = coords[static_cast<std::size_t>(r)];
                switch (rr.kind) {
                case Diagonal: out(r, c) = v(pos(rr.i, rr.i)).real(); break;
                case Symmetric: out(r, c) = (v(pos(rr.i, rr.j)).real() + v(pos(rr.j, rr.i)).real()) / r2; break;
                case Antisymmetric:
                    out(r, c) = (v(pos(rr.i, rr.j)).imag() - v(pos(rr.j, rr.i)).imag()) / r2;
                    break;
                }
            }
        }
        return out;
    }

    /// Coordinates of a Hermitian operator supported on the sector.
    Eigen::VectorXd coordinates(const Operator& rho) const
    {
        const double r2 = std::numbers::sqrt2;
        Eigen::VectorXd x(static_cast<Eigen::Index>(coords.size()));
        for (std::size_t c = 0; c < coords.size(); ++c) {
            const Coord& cc = coords[c];
            const Complex v = rho(cc.i, cc.j);
            const auto k = static_cast<Eigen::Index>(c);
            switch (cc.kind) {
            case Diagonal: x(k) = v.real(); break;
            case Symmetric: x(k) = r2 * v.real(); break;
            case Antisymmetric: x(k) = r2 * v.imag(); break;
            }
        }
        return x;
    }

    Operator to_operator(const Eigen::VectorXd& x) const
    {
        const double r2 = std::numbers::sqrt2;
        Operator rho = Operator::Zero(dim, dim);
        for (std::size_t c = 0; c < coords.size(); ++c) {
            const Coord& cc = coords[c];
            const double w = x(static_cast<Eigen::Index>(c));
            switch (cc.kind) {
            case Diagonal: rho(cc.i, cc.i) += w; break;
            case Symmetric:
                rho(cc.i, cc.j) += w / r2;
                rho(cc.j, cc.i) += w / r2;
                break;
            case Antisymmetric:
                rho(cc.i, cc.j) += kI * w / r2;
                rho(cc.j, cc.i) -= kI * w / r2;
                break;
            }
        }
        return rho;
    }
};

inline bool is_uniform_grid(std::span<const double> t)
{
    if (t.size() < 3) return true;
    const double dt = t[1] - t[0];
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        if (std::abs((t[i + 1] - t[i]) - dt) > 1e-9 * std::abs(dt)) return false;
    }
    return true;
}

inline void record(TimeSeries& ts, const HilbertSpace& hs, const Operator& rho, double t, bool with_eig)
{
    ts.times.push_back(t);
    ts.excited_population.push_back(excited_population(hs, rho));
    ts.sigma_x.push_back(sigma_x(hs, rho));
    ts.sigma_y.push_back(sigma_y(hs, rho));
    ts.trace.push_back(rho.trace().real());
    ts.min_eigenvalue.push_back(with_eig ? min_eigenvalue(rho) : std::numeric_limits<double>::quiet_NaN());
    ts.max_hermiticity_defect = std::max(ts.max_hermiticity_defect, hermiticity_defect(rho));
}

inline double max_trace_drift(const TimeSeries& ts)
{
    double worst = 0.0;
    for (double tr : ts.trace) worst = std::max(worst, std::isfinite(tr) ? std::abs(tr - 1.0) : 1e300);
    return worst;
}

// Exact stepping with exp(L dt) inside the closed electronic sectors. The
// population sector is stepped in real Hermitian coordinates and the ge block
// is recovered as the adjoint of the eg block.
inline TimeSeries propagate_uniform(const LiouvillianSpec& L, const Operator& rho0, std::span<const double> t,
                                    int substeps, const PropagationOptions& opt)
{
    const int d = L.dim();
    const double dt = t.size() > 1 ? (t[1] - t[0]) / substeps : 0.0;

    const auto pidx = sector_indices(L.hs, Sector::Populations);
    const HermitianCoords coords(L.hs, pidx);
    Eigen::VectorXd x = coords.coordinates(rho0);
    Eigen::MatrixXd pstep;
    if (t.size() > 1) pstep = (coords.real_matrix(L.generator.matrix(pidx)) * dt).exp();

    const auto cidx = sector_indices(L.hs, Sector::CoherenceEG);
    StateVector c = restrict_to(vectorize(rho0), cidx);
    const bool coherent = c.size() > 0 && c.cwiseAbs().maxCoeff() > 0.0;
    Eigen::MatrixXcd cstep;
    if (coherent && t.size() > 1) cstep = (L.generator.matrix(cidx) * dt).exp();

    TimeSeries ts;
    ts.substeps = substeps;
    Operator rho = rho0;
    for (std::size_t n = 0; n < t.size(); ++n) {
        if (n > 0) {
            for (int s = 0; s < substeps; ++s) x = pstep * x;
            rho = coords.to_operator(x);
            if (coherent) {
                for (int s = 0; s < substeps; ++s) c = cstep * c;
                for (std::size_t r = 0; r < cidx.size(); ++r) {
                    const auto i = static_cast<int>(cidx[r] % d);
                    const auto j = static_cast<int>(cidx[r] / d);
                    rho(i, j) = c(static_cast<Eigen::Index>(r));
                    rho(j, i) = std::conj(c(static_cast<Eigen::Index>(r)));
                }
            }
        }
        record(ts, L.hs, rho, t[n], opt.record_min_eigenvalue);
    }
    ts.final_state = rho;
    return ts;
}

// Classical RK4 on the operator form, for non-uniform grids.
inline TimeSeries propagate_rk4(const LiouvillianSpec& L, const Operator& rho0, std::span<const double> t,
                                int refinement, const PropagationOptions& opt)
{
    const double bound = L.generator.norm_bound();
    TimeSeries ts;
    ts.substeps = refinement;
    Operator rho = rho0;
    record(ts, L.hs, rho, t[0], opt.record_min_eigenvalue);
    for (std::size_t n = 1; n < t.size(); ++n) {
        const double interval = t[n] - t[n - 1];
        const int steps = std::max(1, static_cast<int>(std::ceil(interval * bound / opt.rk4_step_factor))) * refinement;
        const double h = interval / steps;
        for (int s = 0; s < steps; ++s) {
            const Operator k1 = L.apply(rho);
            const Operator k2 = L.apply(rho + 0.5 * h * k1);
            const Operator k3 = L.apply(rho + 0.5 * h * k2);
            const Operator k4 = L.apply(rho + h * k3);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        record(ts, L.hs, rho, t[n], opt.record_min_eigenvalue);
    }
    ts.final_state = rho;
    return ts;
}

} // namespace detail

inline TimeSeries propagate(const LiouvillianSpec& L, const Operator& rho0, std::span<const double> times,
                            const PropagationOptions& opt = {})
{
    if (times.empty()) throw ConfigError("propagate: empty time grid");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw ConfigError("propagate: time grid must be strictly increasing");
    }
    if (rho0.rows() != L.dim() || rho0.cols() != L.dim()) throw DimensionMismatch("propagate: rho0 dimension");
    check_density_operator(rho0, 1e-8);

    const bool uniform = detail::is_uniform_grid(times);
    double drift = 0.0;
    for (int h = 0; h <= opt.max_halvings; ++h) {
        const int refinement = 1 << h;
        TimeSeries ts = uniform ? detail::propagate_uniform(L, rho0, times, refinement, opt)
                                : detail::propagate_rk4(L, rho0, times, refinement, opt);
        drift = detail::max_trace_drift(ts);
        if (drift <= opt.trace_tolerance) {
            if (opt.record_min_eigenvalue) {
                const double lowest = *std::min_element(ts.min_eigenvalue.begin(), ts.min_eigenvalue.end());
                if (lowest < opt.positivity_floor) {
                    std::ostringstream os;
                    os << "positivity violated along trajectory: min eigenvalue " << lowest;
                    ts.warnings.push_back(os.str());
                }
            }
            return ts;
        }
    }
    std::ostringstream os;
    os << "propagate: trace drift " << drift << " after " << opt.max_halvings << " step halvings";
    throw ConvergenceError(os.str());
}

inline std::vector<double> uniform_grid(double t0, double t1, int points)
{
    if (points < 2) throw ConfigError("uniform_grid: need at least two points");
    std::vector<double> t(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) t[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (points - 1);
    return t;
}

// ---------------------------------------------------------------------------
// Steady state

enum class SteadySolver {
    Svd,  // smallest singular vector, with kernel-dimension diagnostics
    Lu,   // bordered linear solve with the trace condition, no diagnostics
};

struct SteadyState {
    Operator rho;
    double residual = 0.0;  // max |L[rho_ss]|, ps^-1
    double smallest_singular = std::numeric_limits<double>::quiet_NaN();
    double second_singular = std::numeric_limits<double>::quiet_NaN();
    double coherence_singular = std::numeric_limits<double>::quiet_NaN();
};

/// Stationary state of L. It lives in the population sector (gg, ee blocks);
/// with the SVD solver the coherence sector is also checked for zero modes.
inline SteadyState steady_state(const LiouvillianSpec& L, SteadySolver solver = SteadySolver::Svd)
{
    const auto idx = sector_indices(L.hs, Sector::Populations);
    const detail::HermitianCoords coords(L.hs, idx);
    const Eigen::MatrixXd m = coords.real_matrix(L.generator.matrix(idx));
    const Eigen::Index n = m.rows();

    SteadyState out;
    Eigen::VectorXd x;
    if (solver == SteadySolver::Lu) {
        // Any diagonal row is redundant under trace preservation; replace it by the trace.
        Eigen::MatrixXd a = m;
        Eigen::RowVectorXd tr = Eigen::RowVectorXd::Zero(n);
        for (Eigen::Index c = 0; c < n; ++c) {
            if (coords.coords[static_cast<std::size_t>(c)].kind == detail::HermitianCoords::Diagonal) tr(c) = 1.0;
        }
        a.row(0) = tr;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        rhs(0) = 1.0;
        x = a.partialPivLu().solve(rhs);
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        out.smallest_singular = sv(n - 1);
        out.second_singular = n > 1 ? sv(n - 2) : std::numeric_limits<double>::infinity();

        const auto cidx = sector_indices(L.hs, Sector::CoherenceEG);
        Eigen::BDCSVD<Eigen::MatrixXcd> csvd(L.generator.matrix(cidx));
        out.coherence_singular = csvd.singularValues()(csvd.singularValues().size() - 1);

        const double gamma0 = L.params.gamma0_per_ps;
        const double threshold = gamma0 > 0.0 ? 1e-6 * gamma0 : 1e-10 * std::max(1e-300, m.cwiseAbs().maxCoeff());
        const double next = std::min(out.second_singular, out.coherence_singular);
        if (next <= threshold) {
            std::ostringstream os;
            os << "steady_state: kernel is not one-dimensional (singular values " << out.smallest_singular << ", "
               << next << ")";
            throw DegenerateSteadyStateError(os.str(), out.smallest_singular, next);
        }
        x = svd.matrixV().col(n - 1);
    }

    Operator rho = coords.to_operator(x);
    rho /= rho.trace();
    rho = (0.5 * (rho + rho.adjoint())).eval();
    out.rho = rho;
    out.residual = max_abs(L.apply(rho));
    return out;
}

// ---------------------------------------------------------------------------
// Emission rate

struct EmissionRate {
    double rate_per_ps = 0.0;
    double relative = 0.0;  // in units of Gamma0
    std::vector<std::string> warnings;
};

/// Gamma_{e->g} = sum_n <g,n| L[rho_X(0)] |g,n> for the displaced thermal excited state.
inline EmissionRate emission_rate(const LiouvillianSpec& L)
{
    auto prepared = make_initial_state({InitialKind::ExcitedDisplacedThermal, {}}, L.params, L.cc, L.hs);
    EmissionRate r;
    r.rate_per_ps = ground_manifold_trace(L.hs, L.apply(prepared.rho));
    r.relative = L.params.gamma0_per_ps > 0.0 ? r.rate_per_ps / L.params.gamma0_per_ps : 0.0;
    r.warnings = std::move(prepared.warnings);
    return r;
}

// ---------------------------------------------------------------------------
// Exponential fit

struct RateFit {
    double rate = 0.0;  // ps^-1
    double window_start = 0.0;
    double window_end = 0.0;
    std::vector<std::string> warnings;
};

/// Least-squares slope of log <sigma^dag sigma> over [t_max/10, t_max/2]. If the
/// population is not strictly decreasing there, the window slides later.
inline RateFit fit_exponential_rate(const TimeSeries& ts)
{
    if (ts.times.size() < 4) throw ConfigError("fit_exponential_rate: too few samples");
    const double t0 = ts.times.front();
    const double span = ts.times.back() - t0;
    RateFit fit;
    double lo = t0 + span / 10.0;
    double hi = t0 + span / 2.0;
    const double width = hi - lo;

    auto window_ok = [&](double a, double b) {
        double prev = std::numeric_limits<double>::infinity();
        int count = 0;
        for (std::size_t i = 0; i < ts.times.size(); ++i) {
            if (ts.times[i] < a || ts.times[i] > b) continue;
            const double y = ts.excited_population[i];
            if (!(y > 0.0) || !(y < prev)) return false;
            prev = y;
            ++count;
        }
        return count >= 3;
    };

    while (!window_ok(lo, hi)) {
        lo += width / 4.0;
        hi += width / 4.0;
        if (hi > ts.times.back() + 1e-12 * span) {
            throw ConvergenceError("fit_exponential_rate: no monotone decay window found");
        }
    }
    if (lo > t0 + span / 10.0 + 1e-12 * span) {
        std::ostringstream os;
        os << "fit window shifted to [" << lo << ", " << hi << "] ps for monotone decay";
        fit.warnings.push_back(os.str());
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < ts.times.size(); ++i) {
        if (ts.times[i] < lo || ts.times[i] > hi) continue;
        const double x = ts.times[i];
        const double y = std::log(ts.excited_population[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.rate = -slope;
    fit.window_start = lo;
    fit.window_end = hi;
    return fit;
}

// ---------------------------------------------------------------------------
// Truncation control

struct Converged {
    double value = 0.0;
    int fock_dim = 0;
    std::vector<std::pair<int, double>> iterates;
};

inline constexpr double kTruncationTolerance = 0.005;
inline constexpr int kMaxFockDim = 40;

/// Values whose successive change is below this are treated as converged
/// regardless of their relative size (e.g. populations of order 1e-17).
inline constexpr double kTruncationAbsoluteFloor = 1e-12;

/// Re-evaluates task(M) with M <- M + 2 until successive values differ by less
/// than rel_tol relative; returns the last value and the M that produced it.
inline Converged converge_truncation(const std::function<double(int)>& task, int fock_start,
                                     double rel_tol = kTruncationTolerance, int fock_max = kMaxFockDim,
                                     double abs_floor = kTruncationAbsoluteFloor)
{
    Converged c;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int m = fock_start; m <= fock_max; m += 2) {
        const double v = task(m);
        c.iterates.emplace_back(m, v);
        if (c.iterates.size() > 1 && std::abs(v - prev) <= std::max(rel_tol * std::abs(v), abs_floor)) {
            c.value = v;
            c.fock_dim = m;
            return c;
        }
        prev = v;
    }
    std::ostringstream os;
    os << "converge_truncation: no convergence by M = " << fock_max << "; last iterates";
    const std::size_t first = c.iterates.size() >= 3 ? c.iterates.size() - 3 : 0;
    for (std::size_t i = first; i < c.iterates.size(); ++i) {
        os << " (M=" << c.iterates[i].first << ", " << c.iterates[i].second << ")";
    }
    throw ConvergenceError(os.str());
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepPoint {
    double parameter = 0.0;
    std::vector<double> values;
    std::vector<int> fock_dims;
};

struct SweepResult {
    std::string parameter_name;
    std::vector<std::string> value_names;
    std::vector<SweepPoint> points;
};

/// Evaluates f over the grid with up to `workers` concurrent tasks; results keep grid order.
template <class F>
std::vector<std::invoke_result_t<F&, double>> parallel_map(const std::vector<double>& grid, F f, int workers)
{
    using R = std::invoke_result_t<F&, double>;
    std::vector<R> out;
    out.reserve(grid.size());
    const std::size_t batch = static_cast<std::size_t>(std::max(1, workers));
    for (std::size_t start = 0; start < grid.size(); start += batch) {
        std::vector<std::future<R>> pending;
        const std::size_t stop = std::min(grid.size(), start + batch);
        if (batch == 1) {
            out.push_back(f(grid[start]));
            continue;
        }
        for (std::size_t i = start; i < stop; ++i) pending.push_back(std::async(std::launch::async, f, grid[i]));
        for (auto& fut : pending) out.push_back(fut.get());
    }
    return out;
}

} // namespace ccme
