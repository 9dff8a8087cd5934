#pragma once

// Standard operator functions, quantum Fisher information (scalar and matrix),
// covariance matrices and metric-adjusted skew information.

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfim/linalg.hpp"
#include "qfim/states.hpp"

namespace qfim {

class GeneratorSet;

/// Pairs with p_j = 0 < p_i and a nonzero matrix element when f(0) = 0.
class UnboundedFisherError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Monotone f on (0, inf) with f(1) = 1 and f(x) = x f(1/x); f0 is the limit at 0.
///
/// The axioms are checked at construction on the grid x = 2^k, k = -20..20.
class StandardOperatorFunction {
public:
    StandardOperatorFunction(std::string name, std::function<double(double)> fn, double f0);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] double f0() const noexcept { return f0_; }
    [[nodiscard]] double operator()(double x) const { return x == 0.0 ? f0_ : fn_(x); }

    /// p_j f(p_i / p_j), evaluated through the argument in [0, 1] and
    /// extended to p_j = 0 by p_i f0.
    [[nodiscard]] double mean(double pi, double pj) const;

private:
    std::string name_;
    std::function<double(double)> fn_;
    double f0_;
};

/// "sld" (1+x)/2, "wy" ((1+sqrt x)/2)^2, "km" (x-1)/ln x. Throws std::invalid_argument otherwise.
StandardOperatorFunction builtin_f(const std::string& name);

/// Real N x N matrix kept symmetric (symmetrized at construction after a 1e-10 check).
class SymmetricRealMatrix {
public:
    SymmetricRealMatrix() = default;
    explicit SymmetricRealMatrix(std::size_t n);
    SymmetricRealMatrix(std::size_t n, std::vector<double> entries);

    static SymmetricRealMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
    [[nodiscard]] std::span<const double> entries() const noexcept { return data_; }

    /// lambda^T A lambda
    [[nodiscard]] double quadratic_form(std::span<const double> lambda) const;
    [[nodiscard]] double frobenius_norm() const;
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] std::vector<double> eigenvalues() const;
    [[nodiscard]] double min_eigenvalue() const;
    [[nodiscard]] double max_eigenvalue() const;
    /// Unit eigenvector for the smallest eigenvalue.
    [[nodiscard]] std::vector<double> min_eigenvector() const;

    friend SymmetricRealMatrix operator+(const SymmetricRealMatrix& a, const SymmetricRealMatrix& b);
    friend SymmetricRealMatrix operator-(const SymmetricRealMatrix& a, const SymmetricRealMatrix& b);
    friend SymmetricRealMatrix operator*(double s, const SymmetricRealMatrix& a);

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

using FisherMatrix = SymmetricRealMatrix;

/// Result of the PSD-order comparison A >= B, i.e. min eig(A - B) >= -tol
/// with tol = rel_tol * max(1, |A|_F, |B|_F).
struct PsdComparison {
    double min_eigenvalue = 0.0;
    double tolerance = 0.0;
    bool holds = false;
    std::vector<double> witness;  // eigenvector of A - B for min_eigenvalue
};

PsdComparison psd_geq(const SymmetricRealMatrix& a, const SymmetricRealMatrix& b, double rel_tol = 1e-9);

/// sum_ij (p_i - p_j)^2 / (p_j f(p_i/p_j)) |<psi_i|H|psi_j>|^2
double fisher_scalar(const DensityMatrix& rho, const HermitianOperator& h, const StandardOperatorFunction& f);

/// (F)_kl = sum_ij (p_i - p_j)^2 / (p_j f(p_i/p_j)) Re <psi_i|X_k|psi_j><psi_j|X_l|psi_i>
FisherMatrix fisher_matrix(const DensityMatrix& rho, std::span<const HermitianOperator> gens,
                           const StandardOperatorFunction& f);
FisherMatrix fisher_matrix(const DensityMatrix& rho, const GeneratorSet& gens, const StandardOperatorFunction& f);

/// (V)_kl = <{X_k - <X_k>, X_l - <X_l>}>/2
SymmetricRealMatrix covariance_matrix(const DensityMatrix& rho, std::span<const HermitianOperator> gens);
SymmetricRealMatrix covariance_matrix(const DensityMatrix& rho, const GeneratorSet& gens);
SymmetricRealMatrix covariance_matrix(const PureState& psi, std::span<const HermitianOperator> gens);

/// (f(0)/2) F
SymmetricRealMatrix skew_info_matrix(const DensityMatrix& rho, std::span<const HermitianOperator> gens,
                                     const StandardOperatorFunction& f);
SymmetricRealMatrix skew_info_matrix(const DensityMatrix& rho, const GeneratorSet& gens,
                                     const StandardOperatorFunction& f);

}  // namespace qfim
