#pragma once

// Executable checks of the Fisher-matrix theorems: resource-measure properties,
// selective monotonicity, matrix Luo criteria, the purification minimum-covariance
// identity with constructive ancilla generators, and the ensemble-average counterexample.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qfim/channels.hpp"
#include "qfim/fisher.hpp"
#include "qfim/linalg.hpp"
#include "qfim/states.hpp"
#include "qfim/symmetry.hpp"

namespace qfim {

struct TrialDiagnostic {
    std::size_t trial = 0;
    std::string check;
    std::size_t dim = 0;
    std::size_t rank = 0;
    std::string group;
    std::string f;
    double violation = 0.0;
    std::vector<double> witness;  // eigenvector / lambda direction of the worst defect, if any
};

/// passed <=> max_violation <= tolerance. Composite reports (non-empty components) use
/// tolerance 1 and max_violation = max over children of violation / tolerance (0/0 read as 0).
struct VerificationReport {
    std::string theorem_id;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    double tolerance = 0.0;
    double max_violation = 0.0;
    bool passed = false;
    std::vector<TrialDiagnostic> diagnostics;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> notes;
    std::vector<VerificationReport> components;

    /// Records a trial, keeping the running maximum.
    void record(TrialDiagnostic d);
    /// Sets passed from max_violation and tolerance.
    void finalize();
};

/// Builds a composite report from finished children.
VerificationReport combine(std::string theorem_id, std::uint64_t seed, std::vector<VerificationReport> children);

// ---------------------------------------------------------------------------
// Ancilla generator extraction

struct PolarDerivative {
    HermitianOperator XR;
    double h = 0.0;
    double residual = 0.0;  // max-entry Hermiticity defect of i dW/dt before symmetrization
};

/// X^R = i dW_t/dt at t = 0 with W_t = (U_t^dagger V_t^dagger)^T, V_t the polar factor of
/// sqrt(rho) sqrt(rho_t), by a central difference (optionally Richardson-extrapolated).
/// Throws InvalidStateError for rank-deficient rho.
PolarDerivative extract_optimal_XR(const DensityMatrix& rho, const HermitianOperator& x, double h = 1e-4,
                                   bool richardson = false);

/// The same generator in closed form: X^R = -(sum_ij c_ij <i|X|j> |i><j|)^T over the eigenbasis
/// of rho, c_ij = 2 sqrt(p_i p_j)/(p_i + p_j).
HermitianOperator optimal_XR_closed_form(const DensityMatrix& rho, const HermitianOperator& x);

/// 4 V on the canonical purification for X^R (x) I + I (x) X.
SymmetricRealMatrix purified_covariance(const DensityMatrix& rho, std::span<const HermitianOperator> xr,
                                        std::span<const HermitianOperator> xs);

struct MinCovResult {
    SymmetricRealMatrix fisher;          // SLD F
    SymmetricRealMatrix four_v;          // 4 V on the canonical purification
    std::vector<PolarDerivative> xr;
    double residual = 0.0;               // max |F - 4V| entrywise
    VerificationReport report;
};

struct MinCovOptions {
    double h = 1e-4;
    bool richardson = false;
    std::size_t alternatives = 20;
    double equality_tol = 1e-5;
};

/// Equality F = 4V for the constructed X_k^R plus F <= 4V' for random alternative purifications
/// and ancilla generators. Requires full-rank rho.
MinCovResult verify_min_cov_matrix(const DensityMatrix& rho, const GeneratorSet& gens, Rng& rng,
                                   const MinCovOptions& options = {});

// ---------------------------------------------------------------------------
// Suites. Each derives one RNG stream per trial from (seed, trial index).

struct SuiteOptions {
    std::uint64_t seed = 7;
    std::size_t trials = 0;  // 0 = suite default
};

/// Random (rho, gens, f in {sld, wy}) with dims 2-8 and N <= 4: min eig F >= -1e-9 max(1, |F|).
VerificationReport verify_positivity(const SuiteOptions& options);

/// Constructed symmetric states give |F| <= 1e-9, coherent superpositions give lambda_max(F) >= 1e-4,
/// and the commutator predicate agrees with both.
VerificationReport verify_faithfulness(const GeneratorSet& gens, const StandardOperatorFunction& f,
                                       const SuiteOptions& options);

struct MonotonicityOptions {
    std::size_t samples = 0;           // twirl samples (0: exact grid, or 2000 Haar samples)
    bool inject_noncovariant = false;  // negative control
};

/// F_rho - F_E(rho) PSD for twirled random channels E.
VerificationReport verify_monotonicity(const GeneratorSet& gens, const StandardOperatorFunction& f,
                                       const SuiteOptions& options, const MonotonicityOptions& mono = {});

/// Mean covariance deviation of Haar-twirled channels at M and 4M samples; their ratio should be near 2.
VerificationReport verify_twirl_scaling(const GeneratorSet& gens, std::size_t samples, const SuiteOptions& options);

/// F_rho - sum_j p_j F_sigma_j PSD for projective instruments built from the commutant.
VerificationReport verify_selective(const GeneratorSet& gens, const StandardOperatorFunction& f,
                                    const SuiteOptions& options);

/// The four matrix Luo criteria, one child report each.
VerificationReport verify_luo_matrix(const StandardOperatorFunction& f, const SuiteOptions& options);

/// Positivity of F for the given generators, faithfulness and monotonicity.
VerificationReport verify_resource_measure(const GeneratorSet& gens, const StandardOperatorFunction& f,
                                           const SuiteOptions& options, const MonotonicityOptions& mono = {});

/// Random full-rank trials of verify_min_cov_matrix plus the O(h^2) convergence check.
VerificationReport verify_min_cov_suite(const SuiteOptions& options, const MinCovOptions& min_cov = {});

/// rho = I/2 with (sigma_x, sigma_y): F = 0, yet every ensemble has tr sum p_i V_i >= 1.
VerificationReport counterexample_yu(const SuiteOptions& options, std::size_t max_ensemble_size = 4);

/// Scalar/matrix consistency lambda^T F lambda = F(sum lambda_k X_k).
VerificationReport verify_contraction(const SuiteOptions& options);

/// Default generator sets used by the suites for a preset name ("u1", "rN", "su2").
GeneratorSet default_preset(const std::string& name, double j = 1.0);

/// A projective instrument over the commutant of gens; irreducible su(2) generators are first
/// extended by a trivial block so the instrument is non-trivial.
struct SelectiveSetup {
    GeneratorSet gens;
    HermitianOperator b;
};
SelectiveSetup selective_setup(const GeneratorSet& gens, Rng& rng);

}  // namespace qfim
