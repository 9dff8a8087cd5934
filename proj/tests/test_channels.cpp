#include <doctest.h>

#include <cmath>

#include "qfim/channels.hpp"
#include "qfim/fisher.hpp"
#include "qfim/symmetry.hpp"

using namespace qfim;

namespace {

HermitianOperator sx() { return HermitianOperator(ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}}); }
HermitianOperator sz() { return HermitianOperator(ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}}); }

double diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).frobenius_norm(); }

GeneratorSet su2(double j) {
    PresetParams p;
    p.j = j;
    return preset("su2", p);
}

ComplexMatrix swap2() {
    ComplexMatrix s(4, 4);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) s(a * 2 + b, b * 2 + a) = 1.0;
    return s;
}

}  // namespace

TEST_CASE("Kraus channel validation") {
    CHECK_THROWS_AS(KrausChannel({ComplexMatrix{{1.0, 0.0}, {0.0, 0.5}}}, Completeness::trace_preserving),
                    std::invalid_argument);
    CHECK_NOTHROW(KrausChannel({ComplexMatrix{{1.0, 0.0}, {0.0, 0.5}}}, Completeness::trace_non_increasing));
    CHECK_THROWS_AS(KrausChannel({ComplexMatrix{{1.2, 0.0}, {0.0, 0.5}}}, Completeness::trace_non_increasing),
                    std::invalid_argument);
    CHECK_THROWS_AS(KrausChannel({ComplexMatrix::identity(2), ComplexMatrix::identity(3)},
                                 Completeness::trace_non_increasing),
                    DimensionError);
    CHECK_THROWS_AS(KrausChannel({}, Completeness::trace_preserving), std::invalid_argument);
}

TEST_CASE("channel application") {
    Rng rng = derive_rng(51, 0);
    const DensityMatrix rho = random_density(3, 3, rng);
    CHECK(diff(apply(KrausChannel::identity(3), rho).matrix(), rho.matrix()) < 1e-15);

    const DensityMatrix plus = PureState::normalized({1.0, 1.0}).projector();
    CHECK(diff(apply(dephasing_channel(2), plus).matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);

    const KrausChannel branch({ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}}, Completeness::trace_non_increasing);
    const auto out = apply_branch(branch, plus);
    REQUIRE(out);
    CHECK(out->weight == doctest::Approx(0.5));
    CHECK(diff(out->state.matrix(), DensityMatrix::diagonal(std::vector<double>{1.0, 0.0}).matrix()) < 1e-14);
    CHECK_FALSE(apply_branch(branch, DensityMatrix::diagonal(std::vector<double>{0.0, 1.0})));
    CHECK_THROWS_AS(apply(branch, plus), std::invalid_argument);

    const KrausChannel dep = depolarizing_channel(2, 0.4);
    CHECK(diff(apply(dep, plus).matrix(), (0.6 * plus.matrix() + 0.2 * ComplexMatrix::identity(2))) < 1e-14);
    const KrausChannel rc = random_channel(3, 2, 4, rng);
    CHECK(rc.dim_out() == 2);
    CHECK(std::abs(apply(rc, rho).matrix().trace() - 1.0) < 1e-12);
}

TEST_CASE("Choi round trip") {
    Rng rng = derive_rng(52, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const KrausChannel ch = random_channel(3, 2, 3, rng);
        const KrausChannel back = KrausChannel::from_choi(ch.choi(), 3, 2, Completeness::trace_preserving);
        CHECK(diff(back.choi(), ch.choi()) < 1e-10);
        const DensityMatrix rho = random_density(3, 2, rng);
        CHECK(diff(apply(back, rho).matrix(), apply(ch, rho).matrix()) < 1e-10);
    }
    CHECK(KrausChannel::from_choi(KrausChannel::identity(2).choi(), 2, 2, Completeness::trace_preserving)
              .kraus()
              .size() == 1);
}

TEST_CASE("covariance checks") {
    const GeneratorSet z({sz()}, "u1");
    const GeneratorSet x({sx()}, "u1");
    CHECK(check_covariance(depolarizing_channel(2, 0.3), z).covariant);
    CHECK(check_covariance(depolarizing_channel(3, 0.7), su2(1.0)).covariant);
    CHECK(check_covariance(dephasing_channel(2), z).covariant);
    const CovarianceCheck bad = check_covariance(dephasing_channel(2), x);
    CHECK_FALSE(bad.covariant);
    CHECK(bad.max_deviation > 0.1);
    CHECK(check_covariance(unitary_channel(unitary_exp(sz(), 0.4)), z).covariant);
    CHECK_FALSE(check_covariance(unitary_channel(unitary_exp(sx(), 0.4)), z).covariant);
}

TEST_CASE("covariant channels preserve symmetric states") {
    Rng rng = derive_rng(53, 0);
    const GeneratorSet g = su2(1.0);
    TwirlScheme haar{TwirlScheme::Kind::su2_haar, 2000, 5};
    const KrausChannel tw = twirl(random_channel(3, 3, 2, rng), g, haar);
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(3);
    CHECK(is_symmetric(apply(tw, mixed), g, tw.metadata()->tolerance).symmetric);

    const GeneratorSet z({HermitianOperator::diagonal(std::vector<double>{0.0, 1.0, 2.0})}, "u1");
    const KrausChannel tz = twirl(random_channel(3, 3, 3, rng), z, TwirlScheme{});
    for (int i = 0; i < 10; ++i) {
        const DensityMatrix sym = DensityMatrix::diagonal(std::vector<double>{0.5, 0.2, 0.3});
        CHECK(is_symmetric(apply(tz, sym), z).symmetric);
    }
}

TEST_CASE("twirling") {
    Rng rng = derive_rng(54, 0);
    const GeneratorSet z({sz()}, "u1");
    SUBCASE("identity is fixed") {
        const KrausChannel tw = twirl(KrausChannel::identity(2), z, TwirlScheme{TwirlScheme::Kind::u1_grid, 64, 0});
        CHECK(diff(tw.choi(), KrausChannel::identity(2).choi()) < 1e-12);
    }
    SUBCASE("grid twirl of qubit channels is exactly covariant") {
        for (int trial = 0; trial < 10; ++trial) {
            const KrausChannel ch = random_channel(2, 2, 3, rng);
            CHECK_FALSE(check_covariance(ch, z).covariant);
            const KrausChannel tw = twirl(ch, z, TwirlScheme{TwirlScheme::Kind::u1_grid, 64, 0});
            const CovarianceCheck c = check_covariance(tw, z, 1e-9);
            CHECK(c.covariant);
            CHECK(c.max_deviation <= 1e-9);
            REQUIRE(tw.metadata());
            CHECK(tw.metadata()->scheme == "u1-grid");
            CHECK(tw.metadata()->samples == 64);
            CHECK(tw.metadata()->tolerance == 1e-9);
        }
    }
    SUBCASE("commuting multi-generator grid twirl") {
        const GeneratorSet rn({HermitianOperator::diagonal(std::vector<double>{0.0, 1.0, 2.0}),
                               HermitianOperator::diagonal(std::vector<double>{1.0, 0.0, 0.0})},
                              "rN");
        const KrausChannel tw = twirl(random_channel(3, 3, 2, rng), rn, TwirlScheme{TwirlScheme::Kind::rn_grid, 0, 0});
        CHECK(check_covariance(tw, rn, 1e-9).covariant);
        CHECK(tw.metadata()->scheme == "rN-grid");
    }
    SUBCASE("haar twirl deviation shrinks with samples") {
        const GeneratorSet g = su2(0.5);
        double small = 0.0;
        double large = 0.0;
        const int trials = 6;
        for (int trial = 0; trial < trials; ++trial) {
            const KrausChannel ch = random_channel(2, 2, 2, rng);
            const auto seed = static_cast<std::uint64_t>(100 + trial);
            const KrausChannel a = twirl(ch, g, TwirlScheme{TwirlScheme::Kind::su2_haar, 2000, seed});
            const KrausChannel b = twirl(ch, g, TwirlScheme{TwirlScheme::Kind::su2_haar, 8000, seed});
            const double da = check_covariance(a, g).max_deviation;
            CHECK(da <= 5e-2);
            CHECK(a.metadata()->tolerance == doctest::Approx(std::sqrt(5.0 / 2000.0)));
            CHECK(a.metadata()->scheme == "su2-haar");
            small += da;
            large += check_covariance(b, g).max_deviation;
        }
        CHECK(small / large > 1.4);
        CHECK(small / large < 2.8);
    }
    SUBCASE("unsupported requests are refused") {
        const GeneratorSet irr({HermitianOperator::diagonal(std::vector<double>{0.0, 1.0, std::sqrt(2.0)})}, "u1");
        CHECK_THROWS_AS(twirl(KrausChannel::identity(3), irr, TwirlScheme{}), std::invalid_argument);
        CHECK_THROWS_AS(twirl(KrausChannel::identity(2), z, TwirlScheme{TwirlScheme::Kind::u1_grid, 2, 0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(twirl(KrausChannel::identity(2), GeneratorSet({sz(), sx()}),
                              TwirlScheme{TwirlScheme::Kind::rn_grid, 0, 0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(twirl(KrausChannel::identity(2), z, TwirlScheme{TwirlScheme::Kind::su2_haar, 100, 0}),
                        std::invalid_argument);
    }
}

TEST_CASE("haar elements of SU(2) in a representation") {
    Rng rng = derive_rng(55, 0);
    const GeneratorSet g = su2(1.0);
    for (int i = 0; i < 10; ++i) CHECK(unitarity_defect(random_su2_element(g, rng)) < 1e-12);
}

TEST_CASE("covariant dilations") {
    const GeneratorSet z({sz()}, "u1");
    const PureState zero = PureState::basis(2, 0);
    SUBCASE("swap gives the constant channel onto the ancilla state") {
        const KrausChannel ch = dilation_covariant(swap2(), zero, z, z);
        Rng rng = derive_rng(56, 0);
        const DensityMatrix rho = random_density(2, 2, rng);
        CHECK(diff(apply(ch, rho).matrix(), zero.projector().matrix()) < 1e-14);
        CHECK(check_covariance(ch, z).covariant);
    }
    SUBCASE("coupling along the conserved quantity") {
        const ComplexMatrix v = unitary_exp(HermitianOperator(kron(sz().matrix(), sz().matrix())), 0.7);
        const KrausChannel ch = dilation_covariant(v, PureState::basis(2, 1), z, z);
        CHECK(check_covariance(ch, z).covariant);
    }
    SUBCASE("identity unitary gives the identity channel") {
        const KrausChannel ch = dilation_covariant(ComplexMatrix::identity(4), zero, z, z);
        CHECK(diff(ch.choi(), KrausChannel::identity(2).choi()) < 1e-14);
    }
    SUBCASE("precondition failures") {
        const ComplexMatrix v = unitary_exp(HermitianOperator(kron(sx().matrix(), sx().matrix())), 0.3);
        CHECK_THROWS_WITH_AS(dilation_covariant(v, zero, z, z), doctest::Contains("t = "), std::invalid_argument);
        CHECK_THROWS_AS(dilation_covariant(swap2(), PureState::normalized({1.0, 1.0}), z, z), std::invalid_argument);
        CHECK_THROWS_AS(dilation_covariant(ComplexMatrix::identity(6), zero, z, z), DimensionError);
    }
}

TEST_CASE("projective instruments") {
    const GeneratorSet z({sz()}, "u1");
    const CovariantInstrument inst = projective_instrument(sz(), z);
    CHECK(inst.size() == 2);
    for (const auto& b : inst.branches()) CHECK(eig_hermitian(HermitianOperator::hermitized(b.choi())).values.back() ==
                                                doctest::Approx(1.0));

    const GeneratorSet s = su2(1.0);
    CHECK_THROWS_AS(projective_instrument(s[2], s), std::invalid_argument);
    const HermitianOperator casimir = HermitianOperator::hermitized(
        s[0].matrix() * s[0].matrix() + s[1].matrix() * s[1].matrix() + s[2].matrix() * s[2].matrix());
    CHECK(projective_instrument(casimir, s).size() == 1);

    const DensityMatrix plus = PureState::normalized({1.0, 1.0}).projector();
    double total = 0.0;
    for (const auto& b : inst.branches()) total += apply_branch(b, plus)->weight;
    CHECK(total == doctest::Approx(1.0));

    CHECK_THROWS_AS(CovariantInstrument({KrausChannel({ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}},
                                                      Completeness::trace_non_increasing)},
                                        z),
                    std::invalid_argument);
}
