// operators.hpp: dense operator algebra on the truncated qubit (x) Fock space
//
// Basis ordering: electronic index major, Fock index minor, i = elec * M + n
// with elec 0 = |g>, 1 = |e>. Density operators are vectorized by column
// stacking, vec(rho)[i + D * j] = rho(i, j), so vec(A rho B) = (B^T (x) A) vec(rho).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "ccme/errors.hpp"

namespace ccme {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

enum class Electronic : int { Ground = 0, Excited = 1 };

class HilbertSpace {
public:
    explicit HilbertSpace(int fock_dim) : fock_dim_(fock_dim)
    {
        if (fock_dim < 1) throw DimensionMismatch("HilbertSpace: Fock dimension must be positive");
    }

    int fock_dim() const { return fock_dim_; }
    int dim() const { return 2 * fock_dim_; }

    int index(Electronic e, int n) const { return static_cast<int>(e) * fock_dim_ + n; }
    Electronic electronic(int i) const { return i < fock_dim_ ? Electronic::Ground : Electronic::Excited; }
    int fock(int i) const { return i % fock_dim_; }

    bool operator==(const HilbertSpace&) const = default;

private:
    int fock_dim_;
};

inline Operator identity(int n) { return Operator::Identity(n, n); }

inline double max_abs(const Operator& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

inline double hermiticity_defect(const Operator& a) { return max_abs(a - a.adjoint()); }

/// Upper bound on the spectral norm, sqrt(||A||_1 ||A||_inf).
inline double spectral_norm_bound(const Operator& a)
{
    if (a.size() == 0) return 0.0;
    const double col = a.cwiseAbs().colwise().sum().maxCoeff();
    const double row = a.cwiseAbs().rowwise().sum().maxCoeff();
    return std::sqrt(col * row);
}

/// Truncated bosonic annihilator, b|n> = sqrt(n)|n-1>.
inline Operator annihilator(int fock_dim)
{
    Operator b = Operator::Zero(fock_dim, fock_dim);
    for (int n = 1; n < fock_dim; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    return b;
}

inline Operator number_operator(int fock_dim)
{
    Operator n = Operator::Zero(fock_dim, fock_dim);
    for (int k = 0; k < fock_dim; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

/// |g><e| on the bare qubit.
inline Operator qubit_sigma()
{
    Operator s = Operator::Zero(2, 2);
    s(0, 1) = 1.0;
    return s;
}

/// |e><e| on the bare qubit.
inline Operator qubit_excited_projector()
{
    Operator p = Operator::Zero(2, 2);
    p(1, 1) = 1.0;
    return p;
}

/// Kronecker product with the first factor as the major index.
inline Operator tensor(const Operator& a, const Operator& b)
{
    if (a.rows() != a.cols() || b.rows() != b.cols()) {
        throw DimensionMismatch("tensor: factors must be square");
    }
    return Eigen::kroneckerProduct(a, b).eval();
}

/// A (x) 1 for a 2x2 electronic operator A.
inline Operator electronic_op(const HilbertSpace& hs, const Operator& a)
{
    if (a.rows() != 2 || a.cols() != 2) throw DimensionMismatch("electronic_op: expected 2x2");
    return tensor(a, identity(hs.fock_dim()));
}

/// 1 (x) B for an M x M Fock-space operator B.
inline Operator fock_op(const HilbertSpace& hs, const Operator& b)
{
    if (b.rows() != hs.fock_dim() || b.cols() != hs.fock_dim()) {
        throw DimensionMismatch("fock_op: operator does not match the Fock truncation");
    }
    return tensor(identity(2), b);
}

/// exp(d (b^dag - b)) on the truncated space. Exactly unitary for any truncation;
/// see displaced_vacuum_leakage() for the relevant accuracy check.
inline Operator displacement(double d, int fock_dim)
{
    const Operator b = annihilator(fock_dim);
    const Operator generator = d * (b.adjoint() - b);
    return generator.exp();
}

inline double unitarity_defect(const Operator& u)
{
    return max_abs(u.adjoint() * u - identity(static_cast<int>(u.rows())));
}

/// Population of the top two Fock levels in D|0>, i.e. how much the
/// truncation distorts the displaced vacuum.
inline double displaced_vacuum_leakage(const Operator& displacement_op)
{
    const auto m = displacement_op.rows();
    double w = 0.0;
    for (auto n = std::max<Eigen::Index>(0, m - 2); n < m; ++n) w += std::norm(displacement_op(n, 0));
    return w;
}

/// Boltzmann weights p_m proportional to exp(-m Omega / kT), normalized on the truncation.
inline std::vector<double> thermal_fock_populations(double omega_cm, double kT_cm, int fock_dim)
{
    if (!(omega_cm > 0.0) || !(kT_cm > 0.0)) {
        throw ConfigError("thermal_fock_populations: Omega and temperature must be positive");
    }
    std::vector<double> p(static_cast<std::size_t>(fock_dim));
    const double x = omega_cm / kT_cm;
    double z = 0.0;
    for (int m = 0; m < fock_dim; ++m) {
        p[static_cast<std::size_t>(m)] = std::exp(-x * m);
        z += p[static_cast<std::size_t>(m)];
    }
    for (auto& v : p) v /= z;
    return p;
}

inline Operator thermal_fock_state(double omega_cm, double kT_cm, int fock_dim)
{
    const auto p = thermal_fock_populations(omega_cm, kT_cm, fock_dim);
    Operator rho = Operator::Zero(fock_dim, fock_dim);
    for (int m = 0; m < fock_dim; ++m) rho(m, m) = p[static_cast<std::size_t>(m)];
    return rho;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition

struct EigenSystem {
    Eigen::VectorXd values;  // ascending
    Operator vectors;        // columns |psi_j>
    Operator S;              // <psi_j| S |psi_k>
    Operator sigma;          // <psi_j| sigma |psi_k>

    int dim() const { return static_cast<int>(values.size()); }
    double gap(int j, int k) const { return values(j) - values(k); }

    Operator to_eigenbasis(const Operator& a) const { return vectors.adjoint() * a * vectors; }
    Operator from_eigenbasis(const Operator& a) const { return vectors * a * vectors.adjoint(); }
};

inline EigenSystem hermitian_eig(const Operator& h, double hermiticity_tol = 1e-10)
{
    if (h.rows() != h.cols()) throw DimensionMismatch("hermitian_eig: matrix must be square");
    const double scale = std::max(1.0, max_abs(h));
    if (hermiticity_defect(h) > hermiticity_tol * scale) {
        throw std::invalid_argument("hermitian_eig: input is not Hermitian");
    }
    const Operator sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> solver(sym);
    if (solver.info() != Eigen::Success) throw ConvergenceError("hermitian_eig: eigensolver failed");
    EigenSystem es;
    es.values = solver.eigenvalues();
    es.vectors = solver.eigenvectors();
    return es;
}

/// Eigendecomposition plus the eigenbasis matrix elements of the two coupling operators.
inline EigenSystem hermitian_eig(const Operator& h, const Operator& s, const Operator& sigma)
{
    if (s.rows() != h.rows() || sigma.rows() != h.rows()) {
        throw DimensionMismatch("hermitian_eig: coupling operators do not match H");
    }
    EigenSystem es = hermitian_eig(h);
    es.S = es.to_eigenbasis(s);
    es.sigma = es.to_eigenbasis(sigma);
    return es;
}

// ---------------------------------------------------------------------------
// Vectorization

struct SuperOperator {
    int dim = 0;  // dimension D of the operators it acts on
    Eigen::MatrixXcd matrix;

    StateVector apply(const StateVector& v) const { return matrix * v; }
};

inline StateVector vectorize(const Operator& rho)
{
    return Eigen::Map<const StateVector>(rho.data(), rho.size());
}

inline Operator unvectorize(const StateVector& v, int dim)
{
    if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
        throw DimensionMismatch("unvectorize: length is not dim^2");
    }
    return Eigen::Map<const Operator>(v.data(), dim, dim);
}

/// Matrix of a linear map on D x D operators, built column by column from
/// its action on the elementary matrices.
template <class Map>
SuperOperator vectorize_map(Map&& f, int dim)
{
    const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
    SuperOperator out{dim, Eigen::MatrixXcd::Zero(n, n)};
    Operator e = Operator::Zero(dim, dim);
    for (int l = 0; l < dim; ++l) {
        for (int k = 0; k < dim; ++k) {
            e(k, l) = 1.0;
            const Operator image = f(static_cast<const Operator&>(e));
            out.matrix.col(k + static_cast<Eigen::Index>(dim) * l) = vectorize(image);
            e(k, l) = 0.0;
        }
    }
    return out;
}

inline SuperOperator left_multiplication(const Operator& a)
{
    return {static_cast<int>(a.rows()), tensor(identity(static_cast<int>(a.rows())), a)};
}

inline SuperOperator right_multiplication(const Operator& b)
{
    return {static_cast<int>(b.rows()), tensor(Operator(b.transpose()), identity(static_cast<int>(b.rows())))};
}

// ---------------------------------------------------------------------------
// Electronic sectors
//
// Every generator in this library is block diagonal in the electronic index
// pair of rho, with the population blocks (gg, ee) coupled to each other and
// the two coherence blocks (eg, ge) each closed.

enum class Sector { Full, Populations, CoherenceEG, CoherenceGE };

inline std::vector<Eigen::Index> sector_indices(const HilbertSpace& hs, Sector sector)
{
    const int d = hs.dim();
    std::vector<Eigen::Index> idx;
    idx.reserve(static_cast<std::size_t>(d) * d);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            const auto ei = hs.electronic(i);
            const auto ej = hs.electronic(j);
            bool keep = false;
            switch (sector) {
            case Sector::Full: keep = true; break;
            case Sector::Populations: keep = ei == ej; break;
            case Sector::CoherenceEG: keep = ei == Electronic::Excited && ej == Electronic::Ground; break;
            case Sector::CoherenceGE: keep = ei == Electronic::Ground && ej == Electronic::Excited; break;
            }
            if (keep) idx.push_back(i + static_cast<Eigen::Index>(d) * j);
        }
    }
    return idx;
}

inline StateVector restrict_to(const StateVector& v, std::span<const Eigen::Index> idx)
{
    StateVector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) out(static_cast<Eigen::Index>(r)) = v(idx[r]);
    return out;
}

inline StateVector extend_from(const StateVector& v, std::span<const Eigen::Index> idx, int dim)
{
    StateVector out = StateVector::Zero(static_cast<Eigen::Index>(dim) * dim);
    for (std::size_t r = 0; r < idx.size(); ++r) out(idx[r]) = v(static_cast<Eigen::Index>(r));
    return out;
}

// ---------------------------------------------------------------------------
// Generators of the form L[rho] = K rho + rho K^dag + sum_t A_t rho B_t

struct SandwichMap {
    Operator drift;
    std::vector<std::pair<Operator, Operator>> terms;

    int dim() const { return static_cast<int>(drift.rows()); }

    Operator apply(const Operator& rho) const
    {
        Operator out = drift * rho + rho * drift.adjoint();
        for (const auto& [a, b] : terms) out.noalias() += a * rho * b;
        return out;
    }

    SandwichMap scaled(double factor) const
    {
        SandwichMap s{factor * drift, {}};
        s.terms.reserve(terms.size());
        for (const auto& [a, b] : terms) s.terms.emplace_back(factor * a, b);
        return s;
    }

    /// Matrix elements between the given vectorized indices (column stacking).
    Eigen::MatrixXcd matrix(std::span<const Eigen::Index> idx) const
    {
        const Eigen::Index d = drift.rows();
        const Eigen::Index n = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
        for (Eigen::Index c = 0; c < n; ++c) {
            const Eigen::Index k = idx[static_cast<std::size_t>(c)] % d;
            const Eigen::Index l = idx[static_cast<std::size_t>(c)] / d;
            for (Eigen::Index r = 0; r < n; ++r) {
                const Eigen::Index i = idx[static_cast<std::size_t>(r)] % d;
                const Eigen::Index j = idx[static_cast<std::size_t>(r)] / d;
                Complex v{0.0, 0.0};
                if (j == l) v += drift(i, k);
                if (i == k) v += std::conj(drift(j, l));
                for (const auto& [a, b] : terms) v += a(i, k) * b(l, j);
                m(r, c) = v;
            }
        }
        return m;
    }

    SuperOperator full_matrix() const
    {
        const int d = dim();
        std::vector<Eigen::Index> all(static_cast<std::size_t>(d) * d);
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Eigen::Index>(i);
        return {d, matrix(all)};
    }

    /// Crude bound on the spectral radius, used to size explicit time steps.
    double norm_bound() const
    {
        double s = 2.0 * spectral_norm_bound(drift);
        for (const auto& [a, b] : terms) s += spectral_norm_bound(a) * spectral_norm_bound(b);
        return s;
    }
};

} // namespace ccme
