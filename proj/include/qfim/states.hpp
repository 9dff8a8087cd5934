#pragma once

// Quantum states, purification, pure-state ensembles, fidelity and seeded random sampling.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "qfim/linalg.hpp"

namespace qfim {

using Rng = std::mt19937_64;

/// Independent stream for `index` derived from a master seed (splitmix64 mixing).
Rng derive_rng(std::uint64_t seed, std::uint64_t index);

class InvalidStateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Eigenvalues at or below this are treated as outside the support.
inline constexpr double kSupportTolerance = 1e-12;

class PureState;

/// Trace-one positive semidefinite operator.
///
/// Construction rejects min eigenvalue < -1e-10 or |tr - 1| > 1e-10, then clamps
/// negative eigenvalues to zero and renormalizes. The spectral decomposition is kept.
class DensityMatrix {
public:
    explicit DensityMatrix(const ComplexMatrix& m);

    static DensityMatrix maximally_mixed(std::size_t dim);
    static DensityMatrix diagonal(std::span<const double> probabilities);

    [[nodiscard]] std::size_t dim() const noexcept { return matrix_.rows(); }
    [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return matrix_; }
    [[nodiscard]] HermitianOperator hermitian() const { return HermitianOperator::hermitized(matrix_); }
    [[nodiscard]] const EigenSystem& spectrum() const noexcept { return spectrum_; }
    [[nodiscard]] std::size_t rank() const;
    [[nodiscard]] double min_eigenvalue() const { return spectrum_.values.front(); }

    /// tr(rho X)
    [[nodiscard]] double expectation(const HermitianOperator& x) const;
    /// tr(rho X^2) - tr(rho X)^2
    [[nodiscard]] double variance(const HermitianOperator& x) const;

private:
    ComplexMatrix matrix_;
    EigenSystem spectrum_;
};

/// Unit vector; norm must be 1 within 1e-12 at construction.
class PureState {
public:
    explicit PureState(ComplexVector amplitudes);
    static PureState normalized(ComplexVector amplitudes);
    static PureState basis(std::size_t dim, std::size_t index);

    [[nodiscard]] std::size_t dim() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] DensityMatrix projector() const;
    [[nodiscard]] double expectation(const HermitianOperator& x) const;
    [[nodiscard]] double variance(const HermitianOperator& x) const;

private:
    ComplexVector amplitudes_;
};

/// Decomposition rho = sum_i p_i |phi_i><phi_i| (not necessarily spectral).
class Ensemble {
public:
    Ensemble(std::vector<double> weights, std::vector<PureState> states);

    [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
    [[nodiscard]] const std::vector<PureState>& states() const noexcept { return states_; }
    [[nodiscard]] DensityMatrix density() const;

private:
    std::vector<double> weights_;
    std::vector<PureState> states_;
};

/// sum_i w_i rho_i
DensityMatrix mix(std::span<const double> weights, std::span<const DensityMatrix> states);

/// (1 - eps) rho + eps I/d
DensityMatrix regularize(const DensityMatrix& rho, double eps);

/// Canonical purification (I_R (x) sqrt(rho)) sum_i |i>|i>, ancilla first, ancilla dim = dim(rho).
PureState purify(const DensityMatrix& rho);

/// Root fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)), clamped to [0, 1].
double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Ensemble with |phi~_i> = sum_j U_ij sqrt(p_j)|psi_j> for an m x r isometry U
/// (r = rank, columns orthonormal). Every decomposition of rho arises this way.
Ensemble ensemble_from_isometry(const DensityMatrix& rho, const ComplexMatrix& isometry);
Ensemble random_ensemble(const DensityMatrix& rho, std::size_t size, Rng& rng);

/// Haar unitary from Ginibre QR with R's diagonal made positive.
ComplexMatrix random_unitary(std::size_t dim, Rng& rng);
/// Ginibre-induced state of the given rank.
DensityMatrix random_density(std::size_t dim, std::size_t rank, Rng& rng);
PureState random_pure(std::size_t dim, Rng& rng);
/// (G + G^dagger)/2 for complex Gaussian G.
HermitianOperator random_hermitian(std::size_t dim, Rng& rng);
ComplexMatrix random_ginibre(std::size_t rows, std::size_t cols, Rng& rng);

/// U rho U^dagger
DensityMatrix conjugate_by(const ComplexMatrix& u, const DensityMatrix& rho);

}  // namespace qfim
