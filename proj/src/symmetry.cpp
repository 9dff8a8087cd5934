#include "qfim/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qfim {

GeneratorSet::GeneratorSet(std::vector<HermitianOperator> gens, std::string label)
    : gens_(std::move(gens)), label_(std::move(label)) {
    if (gens_.empty()) throw std::invalid_argument("GeneratorSet: at least one generator is required");
    const std::size_t d = gens_.front().dim();
    for (const auto& g : gens_)
        if (g.dim() != d) throw DimensionError("GeneratorSet: generators act on different dimensions");

    const std::size_t n = gens_.size();
    ComplexMatrix gram(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) gram(k, l) = (gens_[k].matrix() * gens_[l].matrix()).trace();
    const double scale = gram.frobenius_norm();
    const EigenSystem es = eig_hermitian(HermitianOperator::hermitized(gram));
    if (!(es.values.front() > 1e-10 * scale))
        throw std::invalid_argument("GeneratorSet: generators are not linearly independent");
}

HermitianOperator GeneratorSet::combination(std::span<const double> t) const {
    if (t.size() != gens_.size()) throw DimensionError("GeneratorSet: parameter vector length mismatch");
    return linear_combination(t, gens_);
}

ComplexMatrix UnitaryRep::at(std::span<const double> t) const { return unitary_exp(gens_.combination(t), 1.0); }

DensityMatrix evolve(const DensityMatrix& rho, const UnitaryRep& rep, std::span<const double> t) {
    if (rho.dim() != rep.generators().dim()) throw DimensionError("evolve: dimension mismatch");
    return conjugate_by(rep.at(t), rho);
}

SymmetryCheck is_symmetric(const DensityMatrix& rho, const GeneratorSet& gens, double tol) {
    if (rho.dim() != gens.dim()) throw DimensionError("is_symmetric: dimension mismatch");
    SymmetryCheck out;
    for (const auto& g : gens.generators())
        out.witness = std::max(out.witness, commutator(rho.matrix(), g.matrix()).frobenius_norm());
    out.symmetric = out.witness <= tol;
    return out;
}

bool generators_commute(const GeneratorSet& gens, double tol) {
    const auto& g = gens.generators();
    for (std::size_t k = 0; k < g.size(); ++k)
        for (std::size_t l = k + 1; l < g.size(); ++l)
            if (commutator(g[k].matrix(), g[l].matrix()).frobenius_norm() > tol) return false;
    return true;
}

std::vector<HermitianOperator> spin_operators(double j) {
    const double twice = 2.0 * j;
    if (j <= 0.0 || std::abs(twice - std::round(twice)) > 1e-12)
        throw std::invalid_argument("spin_operators: j must be a positive multiple of 1/2");
    const auto d = static_cast<std::size_t>(std::lround(twice)) + 1;
    ComplexMatrix jx(d, d), jy(d, d), jz(d, d);
    for (std::size_t r = 0; r < d; ++r) {
        const double m = j - static_cast<double>(r);
        jz(r, r) = m;
        if (r + 1 < d) {
            // <m|J+|m-1> = sqrt(j(j+1) - m(m-1))
            const double c = std::sqrt(j * (j + 1.0) - m * (m - 1.0));
            jx(r, r + 1) = 0.5 * c;
            jx(r + 1, r) = 0.5 * c;
            jy(r, r + 1) = cplx{0.0, -0.5 * c};
            jy(r + 1, r) = cplx{0.0, 0.5 * c};
        }
    }
    return {HermitianOperator(jx), HermitianOperator(jy), HermitianOperator(jz)};
}

GeneratorSet preset(const std::string& name, const PresetParams& params) {
    if (name == "u1") {
        if (!params.hamiltonian) throw std::invalid_argument("preset u1: a Hermitian operator H is required");
        return GeneratorSet({*params.hamiltonian}, "u1");
    }
    if (name == "rN") {
        if (params.generators.empty()) throw std::invalid_argument("preset rN: a generator list is required");
        return GeneratorSet(params.generators, "rN");
    }
    if (name == "su2" || name == "su2-spin-j") return GeneratorSet(spin_operators(params.j), "su2");
    throw std::invalid_argument("unknown group preset '" + name + "' (expected u1, rN or su2)");
}

std::optional<Periodicity> fundamental_frequency(const HermitianOperator& h) {
    constexpr long kMaxDenominator = 64;
    const EigenSystem es = eig_hermitian(h);
    const double spread = es.values.back() - es.values.front();
    const double scale = std::max(1.0, std::max(std::abs(es.values.front()), std::abs(es.values.back())));
    if (spread <= 1e-12 * scale) return Periodicity{};

    std::vector<double> gaps;
    double smallest = spread;
    for (double v : es.values) {
        const double g = v - es.values.front();
        if (g > 1e-9 * scale) {
            gaps.push_back(g);
            smallest = std::min(smallest, g);
        }
    }
    // gap_i / smallest = num_i / den_i
    std::vector<long> num, den;
    for (double g : gaps) {
        const double ratio = g / smallest;
        bool found = false;
        for (long q = 1; q <= kMaxDenominator && !found; ++q) {
            const double scaled = ratio * static_cast<double>(q);
            const double rounded = std::round(scaled);
            if (std::abs(scaled - rounded) <= 1e-9 * std::max(1.0, scaled)) {
                num.push_back(static_cast<long>(rounded));
                den.push_back(q);
                found = true;
            }
        }
        if (!found) return std::nullopt;
    }
    long lcm = 1;
    for (long q : den) lcm = std::lcm(lcm, q);
    long gcd = 0;
    long top = 0;
    for (std::size_t i = 0; i < num.size(); ++i) {
        const long scaled = num[i] * (lcm / den[i]);
        gcd = std::gcd(gcd, scaled);
        top = std::max(top, scaled);
    }
    Periodicity p;
    p.frequency = smallest * static_cast<double>(gcd) / static_cast<double>(lcm);
    p.max_harmonic = top / gcd;
    return p;
}

std::vector<ComplexMatrix> commutant_basis(const GeneratorSet& gens) {
    const std::size_t d = gens.dim();
    const ComplexMatrix id = ComplexMatrix::identity(d);
    // vec([X, Y]) = (X (x) I - I (x) X^T) vec(Y)
    ComplexMatrix gram(d * d, d * d);
    for (const auto& g : gens.generators()) {
        const ComplexMatrix l = kron(g.matrix(), id) - kron(id, g.matrix().transpose());
        gram += l.adjoint() * l;
    }
    const EigenSystem es = eig_hermitian(HermitianOperator::hermitized(gram));
    const double cut = 1e-10 * std::max(1.0, gram.frobenius_norm());
    std::vector<ComplexMatrix> basis;
    for (std::size_t i = 0; i < es.values.size() && es.values[i] <= cut; ++i)
        basis.push_back(devectorize(es.vector(i), d, d));
    return basis;
}

HermitianOperator random_commutant_element(const GeneratorSet& gens, Rng& rng) {
    const auto basis = commutant_basis(gens);
    std::normal_distribution<double> normal;
    ComplexMatrix y(gens.dim(), gens.dim());
    for (const auto& b : basis) y += cplx{normal(rng), normal(rng)} * b;
    // The commutant is closed under adjoints, so the Hermitian part stays inside it.
    return HermitianOperator::hermitized(y);
}

}  // namespace qfim
