#pragma once

// Dense complex linear algebra for small (desk-scale) operators.

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace qfim {

using cplx = std::complex<double>;
using ComplexVector = std::vector<cplx>;

inline constexpr cplx kI{0.0, 1.0};

/// Raised when an iterative kernel fails to converge or meets a singular system.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised on shape mismatches and malformed operands.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Row-major dense complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    /// Takes ownership of row-major entries; rejects size mismatch and non-finite values.
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const double> values);
    /// |a><b|
    static ComplexMatrix outer(std::span<const cplx> a, std::span<const cplx> b);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<const cplx> entries() const noexcept { return data_; }
    [[nodiscard]] ComplexVector column(std::size_t c) const;
    void set_column(std::size_t c, std::span<const cplx> v);

    [[nodiscard]] ComplexMatrix adjoint() const;
    [[nodiscard]] ComplexMatrix transpose() const;
    [[nodiscard]] ComplexMatrix conjugate() const;
    [[nodiscard]] cplx trace() const;
    [[nodiscard]] double frobenius_norm() const;
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] bool all_finite() const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(cplx s);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
ComplexMatrix operator*(ComplexMatrix a, cplx s);
ComplexVector operator*(const ComplexMatrix& a, std::span<const cplx> v);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

cplx inner(std::span<const cplx> a, std::span<const cplx> b);  // <a|b>
double norm(std::span<const cplx> v);

/// Hermitian operator; construction enforces |M - M^dagger| <= 1e-12 entrywise.
class HermitianOperator {
public:
    HermitianOperator() = default;
    explicit HermitianOperator(const ComplexMatrix& m);

    /// (M + M^dagger)/2 without the tolerance check, for results that are Hermitian in exact arithmetic.
    static HermitianOperator hermitized(const ComplexMatrix& m);
    static HermitianOperator identity(std::size_t n);
    static HermitianOperator diagonal(std::span<const double> values);

    [[nodiscard]] std::size_t dim() const noexcept { return matrix_.rows(); }
    [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return matrix_; }

    friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b);
    friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b);
    friend HermitianOperator operator*(double s, const HermitianOperator& a);

private:
    struct Unchecked {};
    HermitianOperator(ComplexMatrix m, Unchecked) : matrix_(std::move(m)) {}
    ComplexMatrix matrix_;
};

/// sum_k coeffs[k] * ops[k]
HermitianOperator linear_combination(std::span<const double> coeffs,
                                     std::span<const HermitianOperator> ops);

struct EigenSystem {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // columns are eigenvectors

    [[nodiscard]] ComplexVector vector(std::size_t i) const { return vectors.column(i); }
    [[nodiscard]] ComplexMatrix reconstruct() const;
};

/// Cyclic Jacobi; at most 100 sweeps, stops when off-diagonal Frobenius norm <= 1e-14 |M|_F.
EigenSystem eig_hermitian(const HermitianOperator& m);

/// V f(D) V^dagger
HermitianOperator apply_spectral(const EigenSystem& es, const std::function<double(double)>& fn);
HermitianOperator apply_spectral(const HermitianOperator& m, const std::function<double(double)>& fn);

/// Principal square root of a PSD operator. Eigenvalues in [-1e-10 max(1,|M|_F), 0) are clamped.
HermitianOperator sqrt_psd(const HermitianOperator& m);

/// exp(-i t H)
ComplexMatrix unitary_exp(const HermitianOperator& h, double t = 1.0);

/// Unitary factor V of A = V |A|. Kernel directions of rank-deficient A are completed
/// by orthonormal basis extension, so V is one of many valid polar factors there.
ComplexMatrix polar_unitary(const ComplexMatrix& a);

enum class Subsystem { first, second };

/// Partial trace of an operator on H_first (x) H_second, keeping `keep`.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_first, std::size_t dim_second,
                            Subsystem keep);

/// Row-major |X>> = sum_ij X_ij |i>|j>, satisfying (Y (x) Z)|X>> = |Y X Z^T>>.
ComplexVector vectorize(const ComplexMatrix& x);
ComplexMatrix devectorize(std::span<const cplx> v, std::size_t rows, std::size_t cols);

/// LU factorization with partial pivoting.
class LuDecomposition {
public:
    explicit LuDecomposition(const ComplexMatrix& a);

    /// min |pivot| / max |pivot|; zero for exactly singular input.
    [[nodiscard]] double pivot_ratio() const noexcept { return pivot_ratio_; }
    [[nodiscard]] bool singular() const noexcept { return pivot_ratio_ == 0.0; }
    [[nodiscard]] ComplexVector solve(std::span<const cplx> b) const;
    [[nodiscard]] ComplexMatrix inverse() const;

private:
    std::size_t n_ = 0;
    ComplexMatrix lu_;
    std::vector<std::size_t> perm_;
    double pivot_ratio_ = 0.0;
};

ComplexVector solve(const ComplexMatrix& a, std::span<const cplx> b);

/// max |M M^dagger - I| entrywise
double unitarity_defect(const ComplexMatrix& u);

}  // namespace qfim
