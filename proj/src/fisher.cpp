#include "qfim/fisher.hpp"

#include <algorithm>
#include <cmath>

#include "qfim/symmetry.hpp"

namespace qfim {

// ---------------------------------------------------------------------------
// StandardOperatorFunction

StandardOperatorFunction::StandardOperatorFunction(std::string name, std::function<double(double)> fn, double f0)
    : name_(std::move(name)), fn_(std::move(fn)), f0_(f0) {
    if (!fn_) throw std::invalid_argument("StandardOperatorFunction: empty function");
    if (!(f0_ >= 0.0) || !std::isfinite(f0_))
        throw std::invalid_argument("StandardOperatorFunction '" + name_ + "': f0 must be finite and >= 0");
    if (std::abs(fn_(1.0) - 1.0) > 1e-12)
        throw std::invalid_argument("StandardOperatorFunction '" + name_ + "': f(1) != 1");
    double previous = -std::numeric_limits<double>::infinity();
    for (int k = -20; k <= 20; ++k) {
        const double x = std::ldexp(1.0, k);
        const double fx = fn_(x);
        const double mirrored = x * fn_(1.0 / x);
        if (!std::isfinite(fx) || std::abs(fx - mirrored) > 1e-10 * std::max(std::abs(fx), std::abs(mirrored)))
            throw std::invalid_argument("StandardOperatorFunction '" + name_ + "': f(x) != x f(1/x) at x = 2^" +
                                        std::to_string(k));
        if (fx < previous)
            throw std::invalid_argument("StandardOperatorFunction '" + name_ + "': not monotone at x = 2^" +
                                        std::to_string(k));
        previous = fx;
    }
}

double StandardOperatorFunction::mean(double pi, double pj) const {
    const double hi = std::max(pi, pj);
    const double lo = std::min(pi, pj);
    if (hi == 0.0) return 0.0;
    if (lo == 0.0) return hi * f0_;
    return hi * fn_(lo / hi);
}

StandardOperatorFunction builtin_f(const std::string& name) {
    if (name == "sld") return {"sld", [](double x) { return 0.5 * (1.0 + x); }, 0.5};
    if (name == "wy") {
        return {"wy",
                [](double x) {
                    const double r = 0.5 * (1.0 + std::sqrt(x));
                    return r * r;
                },
                0.25};
    }
    if (name == "km") {
        return {"km",
                [](double x) {
                    if (std::abs(x - 1.0) < 1e-8) return 1.0;
                    return (x - 1.0) / std::log(x);
                },
                0.0};
    }
    throw std::invalid_argument("unknown standard operator function '" + name + "' (expected sld, wy or km)");
}

// ---------------------------------------------------------------------------
// SymmetricRealMatrix

SymmetricRealMatrix::SymmetricRealMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

SymmetricRealMatrix::SymmetricRealMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), data_(std::move(entries)) {
    if (data_.size() != n_ * n_) throw DimensionError("SymmetricRealMatrix: entry count != n*n");
    double scale = 1.0;
    for (double v : data_) {
        if (!std::isfinite(v)) throw DimensionError("SymmetricRealMatrix: non-finite entry");
        scale = std::max(scale, std::abs(v));
    }
    for (std::size_t r = 0; r < n_; ++r)
        for (std::size_t c = r + 1; c < n_; ++c) {
            const double a = data_[r * n_ + c];
            const double b = data_[c * n_ + r];
            if (std::abs(a - b) > 1e-10 * scale) throw DimensionError("SymmetricRealMatrix: matrix is not symmetric");
            data_[r * n_ + c] = data_[c * n_ + r] = 0.5 * (a + b);
        }
}

SymmetricRealMatrix SymmetricRealMatrix::identity(std::size_t n) {
    SymmetricRealMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1.0;
    return m;
}

double SymmetricRealMatrix::quadratic_form(std::span<const double> lambda) const {
    if (lambda.size() != n_) throw DimensionError("quadratic_form: length mismatch");
    double s = 0.0;
    for (std::size_t r = 0; r < n_; ++r)
        for (std::size_t c = 0; c < n_; ++c) s += lambda[r] * data_[r * n_ + c] * lambda[c];
    return s;
}

double SymmetricRealMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double SymmetricRealMatrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

namespace {

EigenSystem real_eig(const SymmetricRealMatrix& a) {
    const std::size_t n = a.size();
    ComplexMatrix m(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) m(r, c) = a(r, c);
    return eig_hermitian(HermitianOperator::hermitized(m));
}

}  // namespace

std::vector<double> SymmetricRealMatrix::eigenvalues() const { return real_eig(*this).values; }
double SymmetricRealMatrix::min_eigenvalue() const { return eigenvalues().front(); }
double SymmetricRealMatrix::max_eigenvalue() const { return eigenvalues().back(); }

std::vector<double> SymmetricRealMatrix::min_eigenvector() const {
    const EigenSystem es = real_eig(*this);
    // Real symmetric input: rotate the complex eigenvector to a real one.
    ComplexVector v = es.vector(0);
    std::size_t big = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[big])) big = i;
    const cplx phase = std::abs(v[big]) > 0.0 ? std::conj(v[big]) / std::abs(v[big]) : cplx{1.0, 0.0};
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] * phase).real();
    return out;
}

SymmetricRealMatrix operator+(const SymmetricRealMatrix& a, const SymmetricRealMatrix& b) {
    if (a.n_ != b.n_) throw DimensionError("SymmetricRealMatrix +: size mismatch");
    SymmetricRealMatrix c(a.n_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = a.data_[i] + b.data_[i];
    return c;
}

SymmetricRealMatrix operator-(const SymmetricRealMatrix& a, const SymmetricRealMatrix& b) {
    if (a.n_ != b.n_) throw DimensionError("SymmetricRealMatrix -: size mismatch");
    SymmetricRealMatrix c(a.n_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = a.data_[i] - b.data_[i];
    return c;
}

SymmetricRealMatrix operator*(double s, const SymmetricRealMatrix& a) {
    SymmetricRealMatrix c(a.n_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = s * a.data_[i];
    return c;
}

PsdComparison psd_geq(const SymmetricRealMatrix& a, const SymmetricRealMatrix& b, double rel_tol) {
    const SymmetricRealMatrix diff = a - b;
    PsdComparison out;
    const EigenSystem es = real_eig(diff);
    out.min_eigenvalue = es.values.front();
    out.tolerance = rel_tol * std::max({1.0, a.frobenius_norm(), b.frobenius_norm()});
    out.holds = out.min_eigenvalue >= -out.tolerance;
    out.witness = diff.min_eigenvector();
    return out;
}

// ---------------------------------------------------------------------------
// Fisher information

namespace {

void check_dims(const DensityMatrix& rho, std::span<const HermitianOperator> gens) {
    if (gens.empty()) throw DimensionError("at least one generator is required");
    for (const auto& g : gens)
        if (g.dim() != rho.dim()) throw DimensionError("generator dimension does not match the state");
}

}  // namespace

FisherMatrix fisher_matrix(const DensityMatrix& rho, std::span<const HermitianOperator> gens,
                           const StandardOperatorFunction& f) {
    check_dims(rho, gens);
    const EigenSystem& es = rho.spectrum();
    const std::size_t d = rho.dim();
    const std::size_t n = gens.size();

    std::vector<double> p(es.values);
    for (auto& v : p)
        if (v <= kSupportTolerance) v = 0.0;

    // Generators in the eigenbasis of rho.
    const ComplexMatrix basis_adj = es.vectors.adjoint();
    std::vector<ComplexMatrix> rotated;
    rotated.reserve(n);
    double scale = 1.0;
    for (const auto& g : gens) {
        rotated.push_back(basis_adj * g.matrix() * es.vectors);
        scale = std::max(scale, g.matrix().frobenius_norm());
    }

    std::vector<double> entries(n * n, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (p[i] == p[j]) continue;  // includes the excluded p_i = p_j = 0 pairs
            const double mean = f.mean(p[i], p[j]);
            if (mean == 0.0) {
                for (const auto& x : rotated)
                    if (std::abs(x(i, j)) > 1e-12 * scale)
                        throw UnboundedFisherError("Fisher information is unbounded: f(0) = 0 for " + f.name() +
                                                   " and a generator couples the support to the kernel");
                continue;
            }
            const double w = (p[i] - p[j]) * (p[i] - p[j]) / mean;
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = k; l < n; ++l)
                    entries[k * n + l] += w * (rotated[k](i, j) * rotated[l](j, i)).real();
        }
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < k; ++l) entries[k * n + l] = entries[l * n + k];
    return FisherMatrix(n, std::move(entries));
}

FisherMatrix fisher_matrix(const DensityMatrix& rho, const GeneratorSet& gens, const StandardOperatorFunction& f) {
    return fisher_matrix(rho, std::span<const HermitianOperator>(gens.generators()), f);
}

double fisher_scalar(const DensityMatrix& rho, const HermitianOperator& h, const StandardOperatorFunction& f) {
    return fisher_matrix(rho, std::span<const HermitianOperator>(&h, 1), f)(0, 0);
}

// ---------------------------------------------------------------------------
// Covariance and skew information

SymmetricRealMatrix covariance_matrix(const DensityMatrix& rho, std::span<const HermitianOperator> gens) {
    check_dims(rho, gens);
    const std::size_t n = gens.size();
    const std::size_t d = rho.dim();
    std::vector<ComplexMatrix> centred;
    centred.reserve(n);
    for (const auto& g : gens) {
        ComplexMatrix c = g.matrix();
        const double mean = rho.expectation(g);
        for (std::size_t i = 0; i < d; ++i) c(i, i) -= mean;
        centred.push_back(std::move(c));
    }
    std::vector<double> entries(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = k; l < n; ++l) {
            const double v = 0.5 * (rho.matrix() * anticommutator(centred[k], centred[l])).trace().real();
            entries[k * n + l] = entries[l * n + k] = v;
        }
    return SymmetricRealMatrix(n, std::move(entries));
}

SymmetricRealMatrix covariance_matrix(const DensityMatrix& rho, const GeneratorSet& gens) {
    return covariance_matrix(rho, std::span<const HermitianOperator>(gens.generators()));
}

SymmetricRealMatrix covariance_matrix(const PureState& psi, std::span<const HermitianOperator> gens) {
    if (gens.empty()) throw DimensionError("at least one generator is required");
    const std::size_t n = gens.size();
    const std::span<const cplx> amp(psi.amplitudes());
    std::vector<ComplexVector> centred;
    centred.reserve(n);
    for (const auto& g : gens) {
        if (g.dim() != psi.dim()) throw DimensionError("generator dimension does not match the state");
        ComplexVector v = g.matrix() * amp;
        const cplx mean = inner(amp, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= mean.real() * amp[i];
        centred.push_back(std::move(v));
    }
    std::vector<double> entries(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = k; l < n; ++l) entries[k * n + l] = entries[l * n + k] = inner(centred[k], centred[l]).real();
    return SymmetricRealMatrix(n, std::move(entries));
}

SymmetricRealMatrix skew_info_matrix(const DensityMatrix& rho, std::span<const HermitianOperator> gens,
                                     const StandardOperatorFunction& f) {
    return (0.5 * f.f0()) * fisher_matrix(rho, gens, f);
}

SymmetricRealMatrix skew_info_matrix(const DensityMatrix& rho, const GeneratorSet& gens,
                                     const StandardOperatorFunction& f) {
    return skew_info_matrix(rho, std::span<const HermitianOperator>(gens.generators()), f);
}

}  // namespace qfim
