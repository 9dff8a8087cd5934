#pragma once

// Generator sets, the unitary action U_t = exp(-i sum_k t_k X_k), symmetric-state
// predicates and group presets.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qfim/linalg.hpp"
#include "qfim/states.hpp"

namespace qfim {

/// Ordered, linearly independent Hermitian generators on a common space.
class GeneratorSet {
public:
    explicit GeneratorSet(std::vector<HermitianOperator> gens, std::string label = "custom");

    [[nodiscard]] std::size_t dim() const noexcept { return gens_.front().dim(); }
    [[nodiscard]] std::size_t size() const noexcept { return gens_.size(); }
    [[nodiscard]] const std::vector<HermitianOperator>& generators() const noexcept { return gens_; }
    [[nodiscard]] const HermitianOperator& operator[](std::size_t k) const { return gens_.at(k); }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    /// sum_k t_k X_k
    [[nodiscard]] HermitianOperator combination(std::span<const double> t) const;

private:
    std::vector<HermitianOperator> gens_;
    std::string label_;
};

/// t -> exp(-i sum_k t_k X_k). Conjugation by U_t is insensitive to projective phases,
/// so no multiplier is carried.
class UnitaryRep {
public:
    explicit UnitaryRep(GeneratorSet gens) : gens_(std::move(gens)) {}

    [[nodiscard]] const GeneratorSet& generators() const noexcept { return gens_; }
    [[nodiscard]] ComplexMatrix at(std::span<const double> t) const;

private:
    GeneratorSet gens_;
};

DensityMatrix evolve(const DensityMatrix& rho, const UnitaryRep& rep, std::span<const double> t);

struct SymmetryCheck {
    bool symmetric = false;
    double witness = 0.0;  // max_k |[rho, X_k]|_F
};

/// Symmetry with respect to the connected group generated by `gens`, tested via commutators.
SymmetryCheck is_symmetric(const DensityMatrix& rho, const GeneratorSet& gens, double tol = 1e-9);

/// Spin operators (Jx, Jy, Jz) of dimension 2j+1; Jz = diag(j, j-1, ..., -j).
std::vector<HermitianOperator> spin_operators(double j);

struct PresetParams {
    double j = 0.5;                                  // su2
    std::optional<HermitianOperator> hamiltonian;    // u1
    std::vector<HermitianOperator> generators;       // rN
};

/// "u1" (single H), "rN" (user list), "su2" / "su2-spin-j" (spin-j irrep).
GeneratorSet preset(const std::string& name, const PresetParams& params);

/// Smallest w > 0 with every eigenvalue gap of H an integer multiple of w, found by
/// rationalizing gap ratios with denominators <= 64. Zero when H is a multiple of I,
/// nullopt when the gaps are incommensurate.
struct Periodicity {
    double frequency = 0.0;
    long max_harmonic = 0;  // max gap / frequency
};
std::optional<Periodicity> fundamental_frequency(const HermitianOperator& h);

/// True if every pair of generators commutes within tol.
bool generators_commute(const GeneratorSet& gens, double tol = 1e-10);

/// Orthonormal (Hilbert-Schmidt) basis of the commutant {Y : [Y, X_k] = 0 for all k}.
std::vector<ComplexMatrix> commutant_basis(const GeneratorSet& gens);

/// Gaussian random Hermitian element of the commutant.
HermitianOperator random_commutant_element(const GeneratorSet& gens, Rng& rng);

}  // namespace qfim
