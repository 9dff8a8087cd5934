#pragma once

// Kraus-form channels and instruments, covariance checks, group twirling,
// covariant dilations and projective covariant instruments.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfim/linalg.hpp"
#include "qfim/states.hpp"
#include "qfim/symmetry.hpp"

namespace qfim {

enum class Completeness { trace_preserving, trace_non_increasing };

/// How a channel's covariance was established and the deviation it is certified to.
struct CovarianceMetadata {
    std::string scheme;        // "u1-grid", "rN-grid", "su2-haar", "dilation", "projective", ...
    std::size_t samples = 0;
    double tolerance = 0.0;
};

class KrausChannel {
public:
    /// Rejects sum K^dagger K != I (preserving) or not <= I (non-increasing), each within 1e-9.
    KrausChannel(std::vector<ComplexMatrix> kraus, Completeness completeness);

    static KrausChannel identity(std::size_t dim);
    /// Kraus operators from the eigendecomposition of a Choi matrix
    /// J = sum_ab |a><b| (x) E(|a><b|); eigenvalues below 1e-12 are discarded.
    static KrausChannel from_choi(const ComplexMatrix& choi, std::size_t dim_in, std::size_t dim_out,
                                  Completeness completeness);

    [[nodiscard]] std::size_t dim_in() const noexcept { return dim_in_; }
    [[nodiscard]] std::size_t dim_out() const noexcept { return dim_out_; }
    [[nodiscard]] const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }
    [[nodiscard]] Completeness completeness() const noexcept { return completeness_; }
    [[nodiscard]] const std::optional<CovarianceMetadata>& metadata() const noexcept { return metadata_; }

    [[nodiscard]] KrausChannel with_metadata(CovarianceMetadata meta) const;

    /// sum_k K X K^dagger for an arbitrary operator X.
    [[nodiscard]] ComplexMatrix apply_operator(const ComplexMatrix& x) const;
    [[nodiscard]] ComplexMatrix choi() const;

private:
    std::size_t dim_in_ = 0;
    std::size_t dim_out_ = 0;
    std::vector<ComplexMatrix> kraus_;
    Completeness completeness_;
    std::optional<CovarianceMetadata> metadata_;
};

/// Trace-preserving application.
DensityMatrix apply(const KrausChannel& channel, const DensityMatrix& rho);

struct BranchOutcome {
    double weight;        // tr E_j(rho)
    DensityMatrix state;  // E_j(rho) / weight
};

/// Branch application; nullopt when the branch fires with weight < 1e-12.
std::optional<BranchOutcome> apply_branch(const KrausChannel& branch, const DensityMatrix& rho);

struct CovarianceCheck {
    bool covariant = false;
    double max_deviation = 0.0;
};

using ParameterGrid = std::vector<std::vector<double>>;

/// Axis points and a few fixed pseudo-random directions in parameter space.
ParameterGrid default_covariance_grid(const GeneratorSet& gens);

/// max over t in grid and matrix units E_ab of |E(U E_ab U^dagger) - U E(E_ab) U^dagger|_F.
CovarianceCheck check_covariance(const KrausChannel& channel, const GeneratorSet& gens, const ParameterGrid& grid,
                                 double tol = 1e-8);
CovarianceCheck check_covariance(const KrausChannel& channel, const GeneratorSet& gens, double tol = 1e-8);

struct TwirlScheme {
    enum class Kind { u1_grid, rn_grid, su2_haar };
    Kind kind = Kind::u1_grid;
    std::size_t samples = 0;  // grid points per generator (0 = smallest exact grid) or Haar samples
    std::uint64_t seed = 0;   // su2_haar only
};

/// Average of U_g^dagger E(U_g . U_g^dagger) U_g over the group.
///
/// Grid schemes need commuting generators with commensurate spectra and are exact once the
/// grid resolves every harmonic; the certified tolerance is 1e-9. Haar sampling needs an
/// su(2) triple and is certified to sqrt(5/M).
KrausChannel twirl(const KrausChannel& channel, const GeneratorSet& gens, const TwirlScheme& scheme);

/// Haar element of SU(2) mapped into the representation generated by an su(2) triple.
ComplexMatrix random_su2_element(const GeneratorSet& gens, Rng& rng);

/// E(rho) = tr_R[V (rho (x) |eta><eta|) V^dagger] with V on S (x) R.
/// Requires [V, U^S_t (x) U^R_t] = 0 on the grid and eta symmetric for gens_r.
KrausChannel dilation_covariant(const ComplexMatrix& v, const PureState& eta, const GeneratorSet& gens_s,
                                const GeneratorSet& gens_r);

class CovariantInstrument {
public:
    /// Each branch must be trace-non-increasing and covariant; the sum must be trace-preserving.
    CovariantInstrument(std::vector<KrausChannel> branches, const GeneratorSet& gens);

    [[nodiscard]] const std::vector<KrausChannel>& branches() const noexcept { return branches_; }
    [[nodiscard]] std::size_t size() const noexcept { return branches_.size(); }

private:
    std::vector<KrausChannel> branches_;
};

/// Branches rho -> P_j rho P_j over the eigenprojectors of B, which must commute with every generator.
CovariantInstrument projective_instrument(const HermitianOperator& b, const GeneratorSet& gens);

// Channel constructors used by tests, suites and the CLI.
KrausChannel unitary_channel(const ComplexMatrix& u);
/// rho -> (1 - p) rho + p tr(rho) I/d
KrausChannel depolarizing_channel(std::size_t dim, double p);
/// Full dephasing in the computational basis.
KrausChannel dephasing_channel(std::size_t dim);
/// Random channel from a Haar-like isometry with `kraus_count` Kraus operators.
KrausChannel random_channel(std::size_t dim_in, std::size_t dim_out, std::size_t kraus_count, Rng& rng);

}  // namespace qfim
