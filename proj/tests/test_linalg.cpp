#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qfim/linalg.hpp"
#include "qfim/states.hpp"

using namespace qfim;

namespace {

ComplexMatrix pauli_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }

double diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).frobenius_norm(); }

double orthonormality_defect(const ComplexMatrix& v) {
    return (v.adjoint() * v - ComplexMatrix::identity(v.cols())).max_abs();
}

}  // namespace

TEST_CASE("matrix construction rejects bad shapes and non-finite entries") {
    CHECK_THROWS_AS(ComplexMatrix(2, 2, std::vector<cplx>(3)), DimensionError);
    CHECK_THROWS_AS(ComplexMatrix(1, 1, {cplx{std::nan(""), 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS((ComplexMatrix{{1.0, 2.0}, {3.0}}), DimensionError);
    CHECK_THROWS_AS(ComplexMatrix(2, 3) * ComplexMatrix(2, 3), DimensionError);
}

TEST_CASE("hermitian operator enforces the entrywise tolerance") {
    CHECK_NOTHROW(HermitianOperator(ComplexMatrix{{1.0, cplx{0.0, 1.0}}, {cplx{0.0, -1.0}, 2.0}}));
    CHECK_THROWS_AS(HermitianOperator(ComplexMatrix{{1.0, 1.0}, {0.0, 1.0}}), std::invalid_argument);
    const HermitianOperator h(ComplexMatrix{{1.0, cplx{1.0, 5e-13}}, {1.0, 0.0}});
    CHECK(h.matrix()(0, 1).imag() == doctest::Approx(2.5e-13));
}

TEST_CASE("eigendecomposition of small matrices") {
    SUBCASE("diagonal input") {
        const double d[] = {1.0, 2.0};
        const EigenSystem es = eig_hermitian(HermitianOperator::diagonal(d));
        CHECK(es.values[0] == doctest::Approx(1.0));
        CHECK(es.values[1] == doctest::Approx(2.0));
        CHECK(diff(es.vectors.adjoint() * es.vectors, ComplexMatrix::identity(2)) < 1e-14);
        CHECK(std::abs(es.vectors(0, 0)) == doctest::Approx(1.0));
    }
    SUBCASE("pauli x") {
        const EigenSystem es = eig_hermitian(HermitianOperator(pauli_x()));
        CHECK(es.values[0] == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(es.values[1] == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("similarity invariance and reconstruction on random input") {
        Rng rng = derive_rng(11, 0);
        for (std::size_t d = 2; d <= 12; ++d) {
            const HermitianOperator m = random_hermitian(d, rng);
            const ComplexMatrix u = random_unitary(d, rng);
            const EigenSystem a = eig_hermitian(m);
            const EigenSystem b = eig_hermitian(HermitianOperator::hermitized(u * m.matrix() * u.adjoint()));
            for (std::size_t i = 0; i < d; ++i) CHECK(std::abs(a.values[i] - b.values[i]) < 1e-12);
            CHECK(diff(a.reconstruct(), m.matrix()) <= 1e-10 * m.matrix().frobenius_norm());
            CHECK(orthonormality_defect(a.vectors) < 1e-10);
            for (std::size_t i = 1; i < d; ++i) CHECK(a.values[i - 1] <= a.values[i]);
        }
    }
    SUBCASE("degenerate spectrum") {
        Rng rng = derive_rng(11, 1);
        const ComplexMatrix u = random_unitary(4, rng);
        const double d[] = {1.0, 1.0, 1.0, -2.0};
        const HermitianOperator m = HermitianOperator::hermitized(u * ComplexMatrix::diagonal(d) * u.adjoint());
        const EigenSystem es = eig_hermitian(m);
        CHECK(es.values[0] == doctest::Approx(-2.0));
        CHECK(diff(es.reconstruct(), m.matrix()) < 1e-12);
        CHECK(orthonormality_defect(es.vectors) < 1e-12);
    }
}

TEST_CASE("matrix square root") {
    CHECK(diff(sqrt_psd(HermitianOperator::identity(3)).matrix(), ComplexMatrix::identity(3)) < 1e-14);
    const double d[] = {4.0, 9.0};
    const double r[] = {2.0, 3.0};
    CHECK(diff(sqrt_psd(HermitianOperator::diagonal(d)).matrix(), ComplexMatrix::diagonal(r)) < 1e-14);

    Rng rng = derive_rng(12, 0);
    for (std::size_t n = 2; n <= 6; ++n) {
        const ComplexMatrix g = random_ginibre(n, n - 1, rng);
        const HermitianOperator m = HermitianOperator::hermitized(g * g.adjoint());
        const HermitianOperator s = sqrt_psd(m);
        CHECK(diff(s.matrix() * s.matrix(), m.matrix()) <= 1e-9 * m.matrix().frobenius_norm());
        CHECK(eig_hermitian(s).values.front() >= -1e-12);
    }

    const double neg[] = {1.0, -1e-11};
    CHECK_NOTHROW(sqrt_psd(HermitianOperator::diagonal(neg)));
    const double bad[] = {1.0, -1e-3};
    CHECK_THROWS_AS(sqrt_psd(HermitianOperator::diagonal(bad)), std::invalid_argument);
}

TEST_CASE("polar decomposition") {
    Rng rng = derive_rng(13, 0);
    SUBCASE("unitary input is its own polar factor") {
        const ComplexMatrix u = random_unitary(3, rng);
        CHECK(diff(polar_unitary(u), u) < 1e-12);
    }
    SUBCASE("real diagonal input gives signs") {
        const ComplexMatrix a{{2.0, 0.0}, {0.0, -3.0}};
        const ComplexMatrix expected{{1.0, 0.0}, {0.0, -1.0}};
        CHECK(diff(polar_unitary(a), expected) < 1e-12);
    }
    SUBCASE("positive input gives the identity") {
        const ComplexMatrix g = random_ginibre(3, 3, rng);
        const ComplexMatrix p = g * g.adjoint();
        CHECK(diff(polar_unitary(p), ComplexMatrix::identity(3)) < 1e-10);
    }
    SUBCASE("random full-rank and rank-deficient inputs factor correctly") {
        for (std::size_t n = 2; n <= 6; ++n)
            for (std::size_t rank : {n, n - 1, std::size_t{1}}) {
                const ComplexMatrix a = random_ginibre(n, rank, rng) * random_ginibre(rank, n, rng);
                const ComplexMatrix v = polar_unitary(a);
                CHECK(unitarity_defect(v) < 1e-10);
                const ComplexMatrix modulus = sqrt_psd(HermitianOperator::hermitized(a.adjoint() * a)).matrix();
                CHECK(diff(v * modulus, a) <= 1e-9 * a.frobenius_norm());
                // V^dagger A = |A| is positive semidefinite.
                const ComplexMatrix vda = v.adjoint() * a;
                CHECK((vda - vda.adjoint()).max_abs() <= 1e-9 * a.frobenius_norm());
                CHECK(eig_hermitian(HermitianOperator::hermitized(vda)).values.front() >= -1e-9 * a.frobenius_norm());
            }
    }
    SUBCASE("zero matrix") { CHECK(unitarity_defect(polar_unitary(ComplexMatrix(3, 3))) < 1e-12); }
    CHECK_THROWS_AS(polar_unitary(ComplexMatrix(2, 3)), DimensionError);
}

TEST_CASE("unitary exponential agrees with a Taylor series") {
    Rng rng = derive_rng(14, 0);
    for (std::size_t d = 2; d <= 5; ++d) {
        const HermitianOperator h = random_hermitian(d, rng);
        for (double t : {0.0, 0.3, -1.7, 4.0}) {
            const ComplexMatrix u = unitary_exp(h, t);
            CHECK(diff(u, oracle::expm_taylor(h.matrix(), t)) < 1e-11);
            CHECK(unitarity_defect(u) < 1e-12);
        }
    }
}

TEST_CASE("partial trace") {
    Rng rng = derive_rng(15, 0);
    const ComplexMatrix a = random_ginibre(2, 2, rng);
    const ComplexMatrix b = random_ginibre(3, 3, rng);
    SUBCASE("product operators") {
        CHECK(diff(partial_trace(kron(a, b), 2, 3, Subsystem::second), a.trace() * b) < 1e-12);
        CHECK(diff(partial_trace(kron(a, b), 2, 3, Subsystem::first), b.trace() * a) < 1e-12);
    }
    SUBCASE("maximally entangled projector reduces to I/2") {
        ComplexVector phi(4);
        phi[0] = phi[3] = 1.0 / std::sqrt(2.0);
        const ComplexMatrix p = ComplexMatrix::outer(phi, phi);
        CHECK(diff(partial_trace(p, 2, 2, Subsystem::first), 0.5 * ComplexMatrix::identity(2)) < 1e-14);
        CHECK(diff(partial_trace(p, 2, 2, Subsystem::second), 0.5 * ComplexMatrix::identity(2)) < 1e-14);
    }
    SUBCASE("linear and trace preserving") {
        for (int i = 0; i < 20; ++i) {
            const ComplexMatrix m1 = random_ginibre(6, 6, rng);
            const ComplexMatrix m2 = random_ginibre(6, 6, rng);
            const cplx c{0.3, -1.2};
            for (auto keep : {Subsystem::first, Subsystem::second}) {
                const ComplexMatrix lhs = partial_trace(m1 + c * m2, 2, 3, keep);
                const ComplexMatrix rhs = partial_trace(m1, 2, 3, keep) + c * partial_trace(m2, 2, 3, keep);
                CHECK(diff(lhs, rhs) < 1e-12);
                CHECK(std::abs(lhs.trace() - (m1 + c * m2).trace()) < 1e-12);
            }
        }
    }
    CHECK_THROWS_AS(partial_trace(ComplexMatrix(5, 5), 2, 3, Subsystem::first), DimensionError);
}

TEST_CASE("vectorization") {
    const ComplexVector phi = vectorize(ComplexMatrix::identity(2));
    CHECK(phi == ComplexVector{1.0, 0.0, 0.0, 1.0});

    Rng rng = derive_rng(16, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const ComplexMatrix x = random_ginibre(n, n, rng);
        const ComplexMatrix y = random_ginibre(n, n, rng);
        const ComplexMatrix z = random_ginibre(n, n, rng);
        const ComplexVector lhs = kron(y, z) * std::span<const cplx>(vectorize(x));
        const ComplexVector rhs = vectorize(y * x * z.transpose());
        for (std::size_t i = 0; i < lhs.size(); ++i) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
        // Independent index-level evaluation of the Kronecker action.
        const ComplexVector brute = oracle::kron_apply(y, z, vectorize(x));
        for (std::size_t i = 0; i < lhs.size(); ++i) worst = std::max(worst, std::abs(brute[i] - rhs[i]));
    }
    CHECK(worst <= 1e-13);

    const ComplexMatrix x = random_ginibre(3, 3, rng);
    CHECK(diff(devectorize(vectorize(x), 3, 3), x) == 0.0);
    const ComplexVector id_action = kron(ComplexMatrix::identity(3), ComplexMatrix::identity(3)) *
                                    std::span<const cplx>(vectorize(x));
    CHECK(id_action == vectorize(x));
    CHECK_THROWS_AS(devectorize(ComplexVector(5), 2, 2), DimensionError);
}

TEST_CASE("LU solve and inverse") {
    Rng rng = derive_rng(17, 0);
    const ComplexMatrix a = random_ginibre(5, 5, rng);
    ComplexVector b(5);
    for (auto& v : b) v = cplx{1.0, 2.0};
    const ComplexVector x = solve(a, b);
    const ComplexVector ax = a * std::span<const cplx>(x);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(ax[i] - b[i]) < 1e-12);
    const LuDecomposition lu(a);
    CHECK(diff(lu.inverse() * a, ComplexMatrix::identity(5)) < 1e-11);
    CHECK_FALSE(lu.singular());
    CHECK(LuDecomposition(ComplexMatrix(3, 3)).singular());
    CHECK_THROWS_AS(solve(ComplexMatrix(3, 3), ComplexVector(3)), NumericalError);
}
