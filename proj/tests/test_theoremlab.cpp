#include <doctest.h>

#include <cmath>

#include "qfim/theoremlab.hpp"

using namespace qfim;

namespace {

HermitianOperator sx() { return HermitianOperator(ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}}); }
HermitianOperator sy() { return HermitianOperator(ComplexMatrix{{0.0, cplx{0.0, -1.0}}, {cplx{0.0, 1.0}, 0.0}}); }
HermitianOperator sz() { return HermitianOperator(ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}}); }

double diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).frobenius_norm(); }

const VerificationReport* find_child(const VerificationReport& r, const std::string& prefix) {
    for (const auto& c : r.components)
        if (c.theorem_id.rfind(prefix, 0) == 0) return &c;
    return nullptr;
}

double metric(const VerificationReport& r, const std::string& key) {
    for (const auto& [k, v] : r.metrics)
        if (k == key) return v;
    FAIL("missing metric " << key);
    return 0.0;
}

}  // namespace

TEST_CASE("report bookkeeping") {
    VerificationReport leaf;
    leaf.theorem_id = "leaf";
    leaf.tolerance = 1e-3;
    leaf.record({0, "a", 2, 2, "u1", "sld", 5e-4, {}});
    leaf.record({1, "a", 2, 2, "u1", "sld", 2e-4, {}});
    leaf.finalize();
    CHECK(leaf.max_violation == 5e-4);
    CHECK(leaf.passed);

    VerificationReport exact;
    exact.theorem_id = "exact";
    exact.tolerance = 0.0;
    exact.record({0, "b", 2, 2, "u1", "sld", 0.0, {}});
    exact.finalize();
    CHECK(exact.passed);

    const VerificationReport both = combine("both", 3, {leaf, exact});
    CHECK(both.tolerance == 1.0);
    CHECK(both.max_violation == doctest::Approx(0.5));
    CHECK(both.passed);
    CHECK(both.seed == 3);

    exact.record({1, "b", 2, 2, "u1", "sld", 1e-15, {}});
    exact.finalize();
    CHECK_FALSE(exact.passed);
    const VerificationReport broken = combine("broken", 3, {leaf, exact});
    CHECK_FALSE(broken.passed);
    CHECK(broken.max_violation > 1.0);
}

TEST_CASE("ancilla generator by finite differences") {
    SUBCASE("agrees with the closed form and the SLD Fisher information") {
        Rng rng = derive_rng(61, 0);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t d = 2 + static_cast<std::size_t>(trial % 3);
            const DensityMatrix rho = random_density(d, d, rng);
            const HermitianOperator x = random_hermitian(d, rng);
            const PolarDerivative pd = extract_optimal_XR(rho, x);
            CHECK(pd.h == 1e-4);
            CHECK(pd.residual <= 1e-6);
            const HermitianOperator closed = optimal_XR_closed_form(rho, x);
            const double scale = std::max(1.0, closed.matrix().frobenius_norm());
            CHECK(diff(pd.XR.matrix(), closed.matrix()) <= 1e-5 * scale);
            const std::vector<HermitianOperator> xr{closed};
            const std::vector<HermitianOperator> xs{x};
            CHECK(std::abs(purified_covariance(rho, xr, xs)(0, 0) - fisher_scalar(rho, x, builtin_f("sld"))) <= 1e-10);
        }
    }
    SUBCASE("diag(0.75, 0.25) with sigma_x") {
        const DensityMatrix rho = DensityMatrix::diagonal(std::vector<double>{0.75, 0.25});
        const PolarDerivative pd = extract_optimal_XR(rho, sx());
        const std::vector<HermitianOperator> xr{pd.XR};
        const std::vector<HermitianOperator> xs{sx()};
        CHECK(std::abs(purified_covariance(rho, xr, xs)(0, 0) - 1.0) <= 1e-6);
    }
    SUBCASE("commuting case cancels on the purification") {
        const DensityMatrix rho = DensityMatrix::diagonal(std::vector<double>{0.6, 0.4});
        const PolarDerivative pd = extract_optimal_XR(rho, sz());
        const std::vector<HermitianOperator> xr{pd.XR};
        const std::vector<HermitianOperator> xs{sz()};
        CHECK(std::abs(purified_covariance(rho, xr, xs)(0, 0)) <= 1e-6);
    }
    SUBCASE("continuity near a pure state") {
        const double eps = 1e-6;
        const DensityMatrix rho = regularize(PureState::normalized({1.0, 1.0}).projector(), eps);
        const PolarDerivative pd = extract_optimal_XR(rho, sz());
        const std::vector<HermitianOperator> xr{pd.XR};
        const std::vector<HermitianOperator> xs{sz()};
        const double four_v = purified_covariance(rho, xr, xs)(0, 0);
        const double f = fisher_scalar(rho, sz(), builtin_f("sld"));
        CHECK(std::abs(four_v - 4.0) <= 1e-3);
        CHECK(std::abs(f - 4.0) <= 1e-3);
    }
    SUBCASE("second-order convergence and Richardson extrapolation") {
        const DensityMatrix rho = DensityMatrix::diagonal(std::vector<double>{0.5, 0.3, 0.2});
        Rng rng = derive_rng(61, 1);
        const HermitianOperator x = random_hermitian(3, rng);
        const HermitianOperator closed = optimal_XR_closed_form(rho, x);
        const double e1 = diff(extract_optimal_XR(rho, x, 1e-3).XR.matrix(), closed.matrix());
        const double e2 = diff(extract_optimal_XR(rho, x, 5e-4).XR.matrix(), closed.matrix());
        CHECK(e1 / e2 >= 3.0);
        CHECK(e1 / e2 <= 5.0);
        CHECK(diff(extract_optimal_XR(rho, x, 1e-3, true).XR.matrix(), closed.matrix()) < e2);
    }
    SUBCASE("preconditions") {
        const DensityMatrix pure = DensityMatrix::diagonal(std::vector<double>{1.0, 0.0});
        CHECK_THROWS_AS(extract_optimal_XR(pure, sx()), InvalidStateError);
        CHECK_THROWS_AS(extract_optimal_XR(DensityMatrix::maximally_mixed(2), sx(), 0.5), std::invalid_argument);
    }
}

TEST_CASE("minimum covariance over purifications") {
    SUBCASE("maximally mixed qubit") {
        Rng rng = derive_rng(62, 0);
        const MinCovResult r = verify_min_cov_matrix(DensityMatrix::maximally_mixed(2), GeneratorSet({sx(), sy()}), rng);
        CHECK(r.fisher.max_abs() <= 1e-12);
        CHECK(r.four_v.max_abs() <= 1e-6);
        CHECK(r.report.passed);
    }
    SUBCASE("random qubit states with sigma_x, sigma_z") {
        Rng rng = derive_rng(62, 1);
        for (int trial = 0; trial < 10; ++trial) {
            const MinCovResult r = verify_min_cov_matrix(random_density(2, 2, rng), GeneratorSet({sx(), sz()}), rng);
            CHECK(r.residual <= 1e-5);
            CHECK(r.xr.size() == 2);
            CHECK(r.report.passed);
            const VerificationReport* alt = find_child(r.report, "min-cov-alternatives");
            REQUIRE(alt);
            CHECK(alt->trials == 20);
            CHECK(alt->passed);
        }
    }
    SUBCASE("rank-deficient input is refused") {
        Rng rng = derive_rng(62, 2);
        CHECK_THROWS_AS(verify_min_cov_matrix(DensityMatrix::diagonal(std::vector<double>{1.0, 0.0}),
                                              GeneratorSet({sx()}), rng),
                        InvalidStateError);
    }
}

TEST_CASE("counterexample to the ensemble-average extension") {
    const VerificationReport r = counterexample_yu(SuiteOptions{7, 2000});
    CHECK(r.passed);
    const VerificationReport* fisher = find_child(r, "counterexample-fisher");
    REQUIRE(fisher);
    CHECK(fisher->max_violation <= 1e-12);
    const VerificationReport* ens = find_child(r, "counterexample-ensembles");
    REQUIRE(ens);
    CHECK(ens->trials == 2000);
    CHECK(metric(*ens, "min-trace") >= 1.0 - 1e-9);

    // The spectral decomposition gives sum_i p_i V_i = I.
    const std::vector<HermitianOperator> xy{sx(), sy()};
    const SymmetricRealMatrix v0 = covariance_matrix(PureState::basis(2, 0), xy);
    const SymmetricRealMatrix v1 = covariance_matrix(PureState::basis(2, 1), xy);
    const SymmetricRealMatrix avg = 0.5 * v0 + 0.5 * v1;
    CHECK((avg - SymmetricRealMatrix::identity(2)).max_abs() < 1e-15);

    // Bloch bound for pure qubit states.
    Rng rng = derive_rng(63, 0);
    for (int i = 0; i < 100; ++i) {
        const PureState psi = random_pure(2, rng);
        const double vx = psi.variance(sx());
        const double vy = psi.variance(sy());
        const double ex = psi.expectation(sx());
        const double ey = psi.expectation(sy());
        CHECK(std::abs(vx + vy - (2.0 - ex * ex - ey * ey)) < 1e-12);
        CHECK(vx + vy >= 1.0 - 1e-12);
    }
}

TEST_CASE("suites pass with small trial counts") {
    const SuiteOptions small{11, 10};
    const auto sld = builtin_f("sld");
    CHECK(verify_positivity(small).passed);
    CHECK(verify_contraction(small).passed);
    CHECK(verify_luo_matrix(sld, small).passed);
    CHECK(verify_luo_matrix(builtin_f("wy"), small).passed);
    CHECK_THROWS_AS(verify_luo_matrix(builtin_f("km"), small), std::invalid_argument);
    CHECK(verify_min_cov_suite(SuiteOptions{11, 5}).passed);
    for (const char* name : {"u1", "rN", "su2"}) {
        const GeneratorSet g = default_preset(name);
        CHECK(verify_faithfulness(g, sld, small).passed);
        CHECK(verify_selective(g, sld, small).passed);
        CHECK(verify_resource_measure(g, sld, small).passed);
    }
}

TEST_CASE("suites are deterministic in the seed") {
    const SuiteOptions opts{5, 8};
    const VerificationReport a = verify_positivity(opts);
    const VerificationReport b = verify_positivity(opts);
    const auto fingerprint = [](const VerificationReport& r) {
        std::vector<double> out;
        for (const auto& d : r.diagnostics) {
            out.push_back(static_cast<double>(d.dim));
            out.insert(out.end(), d.witness.begin(), d.witness.end());
        }
        return out;
    };
    CHECK(a.max_violation == b.max_violation);
    CHECK(fingerprint(a) == fingerprint(b));
    CHECK(fingerprint(a) != fingerprint(verify_positivity(SuiteOptions{6, 8})));
}

TEST_CASE("non-covariant channels are caught") {
    MonotonicityOptions mono;
    mono.inject_noncovariant = true;
    const VerificationReport r =
        verify_monotonicity(default_preset("u1"), builtin_f("sld"), SuiteOptions{7, 5}, mono);
    CHECK_FALSE(r.passed);
    CHECK(r.max_violation > r.tolerance);
    bool witnessed = false;
    for (const auto& d : r.diagnostics) witnessed = witnessed || !d.witness.empty();
    CHECK(witnessed);
}

TEST_CASE("selective setup is non-trivial for irreducible generators") {
    Rng rng = derive_rng(64, 0);
    const SelectiveSetup s = selective_setup(default_preset("su2"), rng);
    CHECK(s.gens.dim() > 3);
    CHECK(projective_instrument(s.b, s.gens).size() >= 2);
    const SelectiveSetup u = selective_setup(default_preset("u1"), rng);
    CHECK(u.gens.dim() == 2);
    CHECK(projective_instrument(u.b, u.gens).size() == 2);
}

TEST_CASE("presets") {
    CHECK(default_preset("u1").size() == 1);
    CHECK(default_preset("rN").size() == 2);
    CHECK(default_preset("su2", 1.5).dim() == 4);
    CHECK_THROWS_AS(default_preset("z2"), std::invalid_argument);
}
