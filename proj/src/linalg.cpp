#include "qfim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qfim {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": shape mismatch");
    }
}

void require_square(const ComplexMatrix& a, const char* what) {
    if (!a.is_square()) throw DimensionError(std::string(what) + ": matrix must be square");
}

}  // namespace

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) throw DimensionError("ComplexMatrix: entry count != rows*cols");
    if (!all_finite()) throw DimensionError("ComplexMatrix: non-finite entry");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("ComplexMatrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
    if (!all_finite()) throw DimensionError("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const cplx> a, std::span<const cplx> b) {
    ComplexMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
    return m;
}

ComplexVector ComplexMatrix::column(std::size_t c) const {
    ComplexVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

void ComplexMatrix::set_column(std::size_t c, std::span<const cplx> v) {
    if (v.size() != rows_) throw DimensionError("set_column: length mismatch");
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
    return m;
}

ComplexMatrix ComplexMatrix::conjugate() const {
    ComplexMatrix m = *this;
    for (auto& z : m.data_) z = std::conj(z);
    return m;
}

cplx ComplexMatrix::trace() const {
    require_square(*this, "trace");
    cplx t{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
}

bool ComplexMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    require_same_shape(*this, other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    require_same_shape(*this, other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matrix product: inner dimension mismatch");
    ComplexMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

ComplexVector operator*(const ComplexMatrix& a, std::span<const cplx> v) {
    if (a.cols() != v.size()) throw DimensionError("matrix-vector product: dimension mismatch");
    ComplexVector out(a.rows(), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
    return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b + b * a; }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx{0.0, 0.0}) continue;
            for (std::size_t p = 0; p < b.rows(); ++p)
                for (std::size_t q = 0; q < b.cols(); ++q)
                    k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
        }
    return k;
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) throw DimensionError("inner: length mismatch");
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

double unitarity_defect(const ComplexMatrix& u) {
    require_square(u, "unitarity_defect");
    return (u * u.adjoint() - ComplexMatrix::identity(u.rows())).max_abs();
}

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator::HermitianOperator(const ComplexMatrix& m) {
    require_square(m, "HermitianOperator");
    if (!m.all_finite()) throw DimensionError("HermitianOperator: non-finite entry");
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            if (std::abs(m(i, j) - std::conj(m(j, i))) > 1e-12)
                throw DimensionError("HermitianOperator: matrix is not Hermitian");
    *this = hermitized(m);
}

HermitianOperator HermitianOperator::hermitized(const ComplexMatrix& m) {
    require_square(m, "HermitianOperator::hermitized");
    ComplexMatrix h = m + m.adjoint();
    h *= 0.5;
    return HermitianOperator(std::move(h), Unchecked{});
}

HermitianOperator HermitianOperator::identity(std::size_t n) {
    return HermitianOperator(ComplexMatrix::identity(n), Unchecked{});
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> values) {
    return HermitianOperator(ComplexMatrix::diagonal(values), Unchecked{});
}

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(a.matrix_ + b.matrix_, HermitianOperator::Unchecked{});
}

HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(a.matrix_ - b.matrix_, HermitianOperator::Unchecked{});
}

HermitianOperator operator*(double s, const HermitianOperator& a) {
    return HermitianOperator(cplx{s, 0.0} * a.matrix_, HermitianOperator::Unchecked{});
}

HermitianOperator linear_combination(std::span<const double> coeffs,
                                     std::span<const HermitianOperator> ops) {
    if (coeffs.size() != ops.size() || ops.empty())
        throw DimensionError("linear_combination: coefficient/operator count mismatch");
    HermitianOperator acc = coeffs[0] * ops[0];
    for (std::size_t k = 1; k < ops.size(); ++k) acc = acc + coeffs[k] * ops[k];
    return acc;
}

// ---------------------------------------------------------------------------
// Eigendecomposition

ComplexMatrix EigenSystem::reconstruct() const {
    const std::size_t n = values.size();
    ComplexMatrix scaled = vectors;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) scaled(r, c) *= values[c];
    return scaled * vectors.adjoint();
}

EigenSystem eig_hermitian(const HermitianOperator& m) {
    constexpr int kMaxSweeps = 100;
    const std::size_t n = m.dim();
    ComplexMatrix a = m.matrix();
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double scale = a.frobenius_norm();

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q)
                if (p != q) s += std::norm(a(p, q));
        return std::sqrt(s);
    };

    bool converged = scale == 0.0;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        if (off_norm() <= 1e-14 * scale) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                // Phase rotation makes the (p,q) block real symmetric, then a real Jacobi rotation.
                const cplx phase = apq / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx jpp = c;
                const cplx jpq = s;
                const cplx jqp = -s * std::conj(phase);
                const cplx jqq = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    if (!converged && off_norm() > 1e-14 * scale)
        throw NumericalError("eig_hermitian: Jacobi iteration did not converge in 100 sweeps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
    EigenSystem es;
    es.values.resize(n);
    es.vectors = ComplexMatrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        es.values[c] = a(order[c], order[c]).real();
        for (std::size_t r = 0; r < n; ++r) es.vectors(r, c) = v(r, order[c]);
    }
    return es;
}

HermitianOperator apply_spectral(const EigenSystem& es, const std::function<double(double)>& fn) {
    EigenSystem mapped = es;
    for (auto& x : mapped.values) x = fn(x);
    return HermitianOperator::hermitized(mapped.reconstruct());
}

HermitianOperator apply_spectral(const HermitianOperator& m, const std::function<double(double)>& fn) {
    return apply_spectral(eig_hermitian(m), fn);
}

HermitianOperator sqrt_psd(const HermitianOperator& m) {
    const EigenSystem es = eig_hermitian(m);
    const double scale = m.matrix().frobenius_norm();
    const double floor = -1e-10 * std::max(1.0, scale);
    if (!es.values.empty() && es.values.front() < floor)
        throw DimensionError("sqrt_psd: operator is not positive semidefinite");
    // Eigenvalues at rounding level are zero; their square roots would not be.
    const double zero = 1e-14 * scale;
    return apply_spectral(es, [zero](double x) { return x <= zero ? 0.0 : std::sqrt(x); });
}

ComplexMatrix unitary_exp(const HermitianOperator& h, double t) {
    const EigenSystem es = eig_hermitian(h);
    const std::size_t n = h.dim();
    ComplexMatrix scaled = es.vectors;
    for (std::size_t c = 0; c < n; ++c) {
        const cplx phase = std::exp(cplx{0.0, -t * es.values[c]});
        for (std::size_t r = 0; r < n; ++r) scaled(r, c) *= phase;
    }
    return scaled * es.vectors.adjoint();
}

// ---------------------------------------------------------------------------
// Polar decomposition

namespace {

// Scaled Newton iteration X <- (z X + (z X)^{-dagger}) / 2, which converges to the
// unitary polar factor of an invertible starting matrix.
bool newton_polar(const ComplexMatrix& a, ComplexMatrix& out) {
    constexpr int kMaxIterations = 100;
    const std::size_t n = a.rows();
    const double tol = 1e-15 * std::sqrt(static_cast<double>(n));
    ComplexMatrix x = a;
    bool scaling = true;
    for (int it = 0; it < kMaxIterations; ++it) {
        const LuDecomposition lu(x);
        if (lu.singular()) return false;
        ComplexMatrix inv_adj = lu.inverse().adjoint();
        double zeta = 1.0;
        if (scaling) zeta = std::sqrt(inv_adj.frobenius_norm() / x.frobenius_norm());
        ComplexMatrix next = cplx{0.5 * zeta, 0.0} * x + cplx{0.5 / zeta, 0.0} * inv_adj;
        const double step = (next - x).frobenius_norm();
        x = std::move(next);
        if (step < 1e-2) scaling = false;
        if (step <= tol) {
            out = std::move(x);
            return true;
        }
        if (!x.all_finite()) return false;
    }
    // Quadratic convergence stalls only at rounding level; accept if already unitary.
    if (unitarity_defect(x) <= 1e-13) {
        out = std::move(x);
        return true;
    }
    return false;
}

// Orthonormalizes `u` against `basis` (twice, modified Gram-Schmidt); returns the residual norm.
double orthogonalize(ComplexVector& u, const std::vector<ComplexVector>& basis) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) {
            const cplx c = inner(b, u);
            for (std::size_t i = 0; i < u.size(); ++i) u[i] -= c * b[i];
        }
    const double nrm = norm(u);
    if (nrm > 0.0)
        for (auto& z : u) z /= nrm;
    return nrm;
}

ComplexMatrix eig_polar(const ComplexMatrix& a) {
    const std::size_t n = a.rows();
    const double scale = a.frobenius_norm();
    const EigenSystem es = eig_hermitian(HermitianOperator::hermitized(a.adjoint() * a));

    std::vector<ComplexVector> left;
    std::vector<ComplexVector> right;
    left.reserve(n);
    right.reserve(n);
    std::vector<std::size_t> null_directions;
    // Descending singular values, so orthogonalization favours the best-determined vectors.
    for (std::size_t idx = n; idx-- > 0;) {
        const double sv = std::sqrt(std::max(es.values[idx], 0.0));
        ComplexVector w = es.vector(idx);
        if (sv > 1e-12 * scale) {
            ComplexVector u = a * std::span<const cplx>(w);
            if (orthogonalize(u, left) > 0.0) {
                left.push_back(std::move(u));
                right.push_back(std::move(w));
                continue;
            }
        }
        null_directions.push_back(idx);
    }
    for (std::size_t idx : null_directions) {
        // Extend the left basis with the standard basis vector that has the largest residual.
        ComplexVector best;
        double best_norm = -1.0;
        for (std::size_t e = 0; e < n; ++e) {
            ComplexVector candidate(n, cplx{0.0, 0.0});
            candidate[e] = 1.0;
            const double r = orthogonalize(candidate, left);
            if (r > best_norm) {
                best_norm = r;
                best = std::move(candidate);
            }
        }
        left.push_back(std::move(best));
        right.push_back(es.vector(idx));
    }
    ComplexMatrix v(n, n);
    for (std::size_t k = 0; k < n; ++k) v += ComplexMatrix::outer(left[k], right[k]);
    return v;
}

}  // namespace

ComplexMatrix polar_unitary(const ComplexMatrix& a) {
    require_square(a, "polar_unitary");
    if (a.frobenius_norm() == 0.0) return ComplexMatrix::identity(a.rows());
    const LuDecomposition lu(a);
    if (lu.pivot_ratio() > 1e-12) {
        ComplexMatrix v;
        if (newton_polar(a, v)) return v;
    }
    return eig_polar(a);
}

// ---------------------------------------------------------------------------
// Partial trace and vectorization

ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_first, std::size_t dim_second,
                            Subsystem keep) {
    const std::size_t total = dim_first * dim_second;
    if (m.rows() != total || m.cols() != total) throw DimensionError("partial_trace: dimension mismatch");
    if (keep == Subsystem::second) {
        ComplexMatrix out(dim_second, dim_second);
        for (std::size_t a = 0; a < dim_first; ++a)
            for (std::size_t b = 0; b < dim_second; ++b)
                for (std::size_t bp = 0; bp < dim_second; ++bp)
                    out(b, bp) += m(a * dim_second + b, a * dim_second + bp);
        return out;
    }
    ComplexMatrix out(dim_first, dim_first);
    for (std::size_t a = 0; a < dim_first; ++a)
        for (std::size_t ap = 0; ap < dim_first; ++ap)
            for (std::size_t b = 0; b < dim_second; ++b)
                out(a, ap) += m(a * dim_second + b, ap * dim_second + b);
    return out;
}

ComplexVector vectorize(const ComplexMatrix& x) {
    const auto e = x.entries();
    return ComplexVector(e.begin(), e.end());
}

ComplexMatrix devectorize(std::span<const cplx> v, std::size_t rows, std::size_t cols) {
    if (v.size() != rows * cols) throw DimensionError("devectorize: length mismatch");
    return ComplexMatrix(rows, cols, ComplexVector(v.begin(), v.end()));
}

// ---------------------------------------------------------------------------
// LU

LuDecomposition::LuDecomposition(const ComplexMatrix& a) : n_(a.rows()), lu_(a), perm_(a.rows()) {
    require_square(a, "LuDecomposition");
    std::iota(perm_.begin(), perm_.end(), 0);
    double min_pivot = std::numeric_limits<double>::infinity();
    double max_pivot = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t r = k + 1; r < n_; ++r)
            if (std::abs(lu_(r, k)) > best) {
                best = std::abs(lu_(r, k));
                piv = r;
            }
        min_pivot = std::min(min_pivot, best);
        max_pivot = std::max(max_pivot, best);
        if (best == 0.0) continue;
        if (piv != k) {
            for (std::size_t c = 0; c < n_; ++c) std::swap(lu_(k, c), lu_(piv, c));
            std::swap(perm_[k], perm_[piv]);
        }
        for (std::size_t r = k + 1; r < n_; ++r) {
            const cplx f = lu_(r, k) / lu_(k, k);
            lu_(r, k) = f;
            for (std::size_t c = k + 1; c < n_; ++c) lu_(r, c) -= f * lu_(k, c);
        }
    }
    pivot_ratio_ = (n_ == 0 || max_pivot == 0.0) ? 0.0 : min_pivot / max_pivot;
}

ComplexVector LuDecomposition::solve(std::span<const cplx> b) const {
    if (b.size() != n_) throw DimensionError("LuDecomposition::solve: length mismatch");
    if (singular()) throw NumericalError("LuDecomposition::solve: singular matrix");
    ComplexVector x(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        cplx s = b[perm_[i]];
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n_; i-- > 0;) {
        cplx s = x[i];
        for (std::size_t j = i + 1; j < n_; ++j) s -= lu_(i, j) * x[j];
        x[i] = s / lu_(i, i);
    }
    return x;
}

ComplexMatrix LuDecomposition::inverse() const {
    ComplexMatrix inv(n_, n_);
    ComplexVector e(n_);
    for (std::size_t c = 0; c < n_; ++c) {
        std::fill(e.begin(), e.end(), cplx{0.0, 0.0});
        e[c] = 1.0;
        inv.set_column(c, solve(e));
    }
    return inv;
}

ComplexVector solve(const ComplexMatrix& a, std::span<const cplx> b) { return LuDecomposition(a).solve(b); }

}  // namespace qfim
