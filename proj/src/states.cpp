#include "qfim/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qfim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

cplx complex_gaussian(Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double re = normal(rng);
    const double im = normal(rng);
    return {re * M_SQRT1_2, im * M_SQRT1_2};
}

}  // namespace

Rng derive_rng(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(const ComplexMatrix& m) {
    const HermitianOperator h(m);
    spectrum_ = eig_hermitian(h);
    if (spectrum_.values.empty()) throw InvalidStateError("DensityMatrix: empty matrix");
    if (spectrum_.values.front() < -1e-10)
        throw InvalidStateError("DensityMatrix: not positive semidefinite (min eigenvalue " +
                                std::to_string(spectrum_.values.front()) + ")");
    const double tr = h.matrix().trace().real();
    if (std::abs(tr - 1.0) > 1e-10)
        throw InvalidStateError("DensityMatrix: trace " + std::to_string(tr) + " is not 1");

    bool clamped = false;
    for (auto& p : spectrum_.values)
        if (p < 0.0) {
            p = 0.0;
            clamped = true;
        }
    matrix_ = clamped ? HermitianOperator::hermitized(spectrum_.reconstruct()).matrix() : h.matrix();
    const double total = matrix_.trace().real();
    if (total != 1.0) {
        matrix_ *= 1.0 / total;
        for (auto& p : spectrum_.values) p /= total;
    }
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    ComplexMatrix m = ComplexMatrix::identity(dim);
    m *= 1.0 / static_cast<double>(dim);
    return DensityMatrix(m);
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> probabilities) {
    return DensityMatrix(ComplexMatrix::diagonal(probabilities));
}

std::size_t DensityMatrix::rank() const {
    return static_cast<std::size_t>(std::count_if(spectrum_.values.begin(), spectrum_.values.end(),
                                                  [](double p) { return p > kSupportTolerance; }));
}

double DensityMatrix::expectation(const HermitianOperator& x) const {
    if (x.dim() != dim()) throw DimensionError("expectation: dimension mismatch");
    return (matrix_ * x.matrix()).trace().real();
}

double DensityMatrix::variance(const HermitianOperator& x) const {
    const double mean = expectation(x);
    return (matrix_ * x.matrix() * x.matrix()).trace().real() - mean * mean;
}

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.empty()) throw InvalidStateError("PureState: empty amplitude vector");
    if (std::abs(norm(amplitudes_) - 1.0) > 1e-12) throw InvalidStateError("PureState: vector is not normalized");
}

PureState PureState::normalized(ComplexVector amplitudes) {
    const double n = norm(amplitudes);
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidStateError("PureState: zero or non-finite vector");
    for (auto& z : amplitudes) z /= n;
    return PureState(std::move(amplitudes));
}

PureState PureState::basis(std::size_t dim, std::size_t index) {
    ComplexVector v(dim, cplx{0.0, 0.0});
    v.at(index) = 1.0;
    return PureState(std::move(v));
}

DensityMatrix PureState::projector() const {
    return DensityMatrix(HermitianOperator::hermitized(ComplexMatrix::outer(amplitudes_, amplitudes_)).matrix());
}

double PureState::expectation(const HermitianOperator& x) const {
    if (x.dim() != dim()) throw DimensionError("expectation: dimension mismatch");
    return inner(amplitudes_, x.matrix() * std::span<const cplx>(amplitudes_)).real();
}

double PureState::variance(const HermitianOperator& x) const {
    const ComplexVector xv = x.matrix() * std::span<const cplx>(amplitudes_);
    const double mean = inner(amplitudes_, xv).real();
    return inner(xv, xv).real() - mean * mean;
}

// ---------------------------------------------------------------------------
// Ensemble

Ensemble::Ensemble(std::vector<double> weights, std::vector<PureState> states)
    : weights_(std::move(weights)), states_(std::move(states)) {
    if (weights_.empty() || weights_.size() != states_.size())
        throw InvalidStateError("Ensemble: weights and states must be non-empty and of equal length");
    double total = 0.0;
    for (double w : weights_) {
        if (w < 0.0) throw InvalidStateError("Ensemble: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10) throw InvalidStateError("Ensemble: weights do not sum to 1");
    for (const auto& s : states_)
        if (s.dim() != states_.front().dim()) throw InvalidStateError("Ensemble: mixed dimensions");
}

DensityMatrix Ensemble::density() const {
    const std::size_t d = states_.front().dim();
    ComplexMatrix m(d, d);
    for (std::size_t i = 0; i < size(); ++i)
        m += cplx{weights_[i], 0.0} * ComplexMatrix::outer(states_[i].amplitudes(), states_[i].amplitudes());
    return DensityMatrix(HermitianOperator::hermitized(m).matrix());
}

DensityMatrix mix(std::span<const double> weights, std::span<const DensityMatrix> states) {
    if (weights.size() != states.size() || states.empty()) throw DimensionError("mix: size mismatch");
    ComplexMatrix m(states.front().dim(), states.front().dim());
    for (std::size_t i = 0; i < states.size(); ++i) m += cplx{weights[i], 0.0} * states[i].matrix();
    return DensityMatrix(HermitianOperator::hermitized(m).matrix());
}

DensityMatrix regularize(const DensityMatrix& rho, double eps) {
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(rho.dim());
    const std::vector<double> w{1.0 - eps, eps};
    const std::vector<DensityMatrix> s{rho, mixed};
    return mix(w, s);
}

DensityMatrix conjugate_by(const ComplexMatrix& u, const DensityMatrix& rho) {
    return DensityMatrix(HermitianOperator::hermitized(u * rho.matrix() * u.adjoint()).matrix());
}

// ---------------------------------------------------------------------------
// Purification and fidelity

PureState purify(const DensityMatrix& rho) {
    const HermitianOperator root = sqrt_psd(rho.hermitian());
    // (I (x) S)|Phi+> = |S^T>> in the row-major vectorization with the ancilla index first.
    ComplexVector psi = vectorize(root.matrix().transpose());
    return PureState::normalized(std::move(psi));
}

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionError("uhlmann_fidelity: dimension mismatch");
    const HermitianOperator root = sqrt_psd(rho.hermitian());
    const HermitianOperator inner_op =
        HermitianOperator::hermitized(root.matrix() * sigma.matrix() * root.matrix());
    const double f = sqrt_psd(inner_op).matrix().trace().real();
    return std::clamp(f, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Ensembles

Ensemble ensemble_from_isometry(const DensityMatrix& rho, const ComplexMatrix& isometry) {
    const EigenSystem& es = rho.spectrum();
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < es.values.size(); ++j)
        if (es.values[j] > kSupportTolerance) support.push_back(j);
    const std::size_t r = support.size();
    if (isometry.cols() != r) throw DimensionError("ensemble_from_isometry: isometry must have rank(rho) columns");
    if ((isometry.adjoint() * isometry - ComplexMatrix::identity(r)).max_abs() > 1e-10)
        throw DimensionError("ensemble_from_isometry: columns are not orthonormal");

    const std::size_t d = rho.dim();
    std::vector<double> weights;
    std::vector<PureState> states;
    for (std::size_t i = 0; i < isometry.rows(); ++i) {
        ComplexVector phi(d, cplx{0.0, 0.0});
        for (std::size_t c = 0; c < r; ++c) {
            const cplx coeff = isometry(i, c) * std::sqrt(es.values[support[c]]);
            for (std::size_t a = 0; a < d; ++a) phi[a] += coeff * es.vectors(a, support[c]);
        }
        const double w = std::pow(norm(phi), 2);
        if (w <= 1e-300) continue;
        weights.push_back(w);
        states.push_back(PureState::normalized(std::move(phi)));
    }
    double total = 0.0;
    for (double w : weights) total += w;
    for (auto& w : weights) w /= total;
    return Ensemble(std::move(weights), std::move(states));
}

Ensemble random_ensemble(const DensityMatrix& rho, std::size_t size, Rng& rng) {
    const std::size_t r = rho.rank();
    if (size < r) throw std::invalid_argument("random_ensemble: ensemble size is below rank(rho)");
    const ComplexMatrix u = random_unitary(size, rng);
    ComplexMatrix isometry(size, r);
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t c = 0; c < r; ++c) isometry(i, c) = u(i, c);
    return ensemble_from_isometry(rho, isometry);
}

// ---------------------------------------------------------------------------
// Random sampling

ComplexMatrix random_ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
    ComplexMatrix g(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) g(r, c) = complex_gaussian(rng);
    return g;
}

ComplexMatrix random_unitary(std::size_t dim, Rng& rng) {
    ComplexMatrix q = random_ginibre(dim, dim, rng);
    // Modified Gram-Schmidt yields R with a positive real diagonal, which is the phase fix.
    for (std::size_t c = 0; c < dim; ++c) {
        ComplexVector v = q.column(c);
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t p = 0; p < c; ++p) {
                const ComplexVector b = q.column(p);
                const cplx proj = inner(b, v);
                for (std::size_t i = 0; i < dim; ++i) v[i] -= proj * b[i];
            }
        const double n = norm(v);
        for (auto& z : v) z /= n;
        q.set_column(c, v);
    }
    return q;
}

DensityMatrix random_density(std::size_t dim, std::size_t rank, Rng& rng) {
    if (rank < 1 || rank > dim) throw std::invalid_argument("random_density: rank must be in [1, dim]");
    const ComplexMatrix g = random_ginibre(dim, rank, rng);
    ComplexMatrix m = g * g.adjoint();
    m *= 1.0 / m.trace().real();
    return DensityMatrix(HermitianOperator::hermitized(m).matrix());
}

PureState random_pure(std::size_t dim, Rng& rng) {
    ComplexVector v(dim);
    for (auto& z : v) z = complex_gaussian(rng);
    return PureState::normalized(std::move(v));
}

HermitianOperator random_hermitian(std::size_t dim, Rng& rng) {
    return HermitianOperator::hermitized(random_ginibre(dim, dim, rng));
}

}  // namespace qfim
