#include "qfim/theoremlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qfim {

namespace {

// Reports with more trials than this keep only the worst trial and the failures.
constexpr std::size_t kFullDiagnosticsLimit = 1000;
constexpr std::size_t kMaxFailureDiagnostics = 100;

std::size_t uniform_index(std::size_t lo, std::size_t hi, Rng& rng) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double uniform(double lo, double hi, Rng& rng) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::vector<HermitianOperator> random_generators(std::size_t dim, std::size_t count, Rng& rng) {
    std::vector<HermitianOperator> gens;
    gens.reserve(count);
    for (std::size_t k = 0; k < count; ++k) gens.push_back(random_hermitian(dim, rng));
    return gens;
}

std::vector<double> random_direction(std::size_t n, Rng& rng) {
    std::normal_distribution<double> normal;
    std::vector<double> v(n);
    for (auto& x : v) x = normal(rng);
    return v;
}

// A random state, full rank when f(0) = 0 so the Fisher matrix stays finite.
DensityMatrix random_state_for(std::size_t dim, const StandardOperatorFunction& f, Rng& rng) {
    const std::size_t rank = f.f0() > 0.0 ? uniform_index(1, dim, rng) : dim;
    return random_density(dim, rank, rng);
}

double normalized_violation(const VerificationReport& r) {
    if (std::isnan(r.max_violation)) return std::numeric_limits<double>::infinity();
    if (r.max_violation <= 0.0) return 0.0;
    if (r.tolerance > 0.0) return r.max_violation / r.tolerance;
    return 1.0 + r.max_violation;
}

// Shortfall below a one-sided floor: 0 when value >= floor.
double shortfall(double value, double floor) { return std::max(0.0, floor - value); }

TrialDiagnostic diag(std::size_t trial, std::string check, std::size_t dim, std::size_t rank, std::string group,
                     std::string f, double violation, std::vector<double> witness = {}) {
    return TrialDiagnostic{trial, std::move(check), dim, rank, std::move(group), std::move(f), violation,
                           std::move(witness)};
}

VerificationReport leaf(std::string id, const SuiteOptions& options, std::size_t default_trials, double tol) {
    VerificationReport r;
    r.theorem_id = std::move(id);
    r.seed = options.seed;
    r.trials = options.trials == 0 ? default_trials : options.trials;
    r.tolerance = tol;
    return r;
}

TwirlScheme scheme_for(const GeneratorSet& gens, std::size_t samples, std::uint64_t seed) {
    TwirlScheme s;
    s.seed = seed;
    if (generators_commute(gens)) {
        s.kind = gens.size() == 1 ? TwirlScheme::Kind::u1_grid : TwirlScheme::Kind::rn_grid;
        s.samples = samples;
    } else {
        s.kind = TwirlScheme::Kind::su2_haar;
        s.samples = samples == 0 ? 2000 : samples;
    }
    return s;
}

SymmetricRealMatrix weighted_sum(const std::vector<double>& w, const std::vector<SymmetricRealMatrix>& ms) {
    SymmetricRealMatrix acc(ms.front().size());
    for (std::size_t i = 0; i < ms.size(); ++i) acc = acc + w[i] * ms[i];
    return acc;
}

std::vector<double> random_weights(std::size_t n, Rng& rng) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(n);
    double s = 0.0;
    for (auto& x : w) s += (x = e(rng));
    for (auto& x : w) x /= s;
    return w;
}

}  // namespace

// ---------------------------------------------------------------------------
// Reports

void VerificationReport::record(TrialDiagnostic d) {
    const bool worst = diagnostics.empty() || d.violation > max_violation;
    max_violation = std::max(max_violation, d.violation);
    if (std::isnan(d.violation)) max_violation = d.violation;
    if (trials <= kFullDiagnosticsLimit) {
        diagnostics.push_back(std::move(d));
        return;
    }
    // Slot 0 holds the worst trial; failures follow.
    if (diagnostics.empty()) {
        diagnostics.push_back(std::move(d));
    } else if (d.violation > tolerance && diagnostics.size() <= kMaxFailureDiagnostics) {
        if (worst) diagnostics.front() = d;
        diagnostics.push_back(std::move(d));
    } else if (worst) {
        diagnostics.front() = std::move(d);
    }
}

void VerificationReport::finalize() {
    passed = !std::isnan(max_violation) && max_violation <= tolerance;
}

VerificationReport combine(std::string theorem_id, std::uint64_t seed, std::vector<VerificationReport> children) {
    VerificationReport r;
    r.theorem_id = std::move(theorem_id);
    r.seed = seed;
    r.tolerance = 1.0;
    for (const auto& c : children) {
        r.trials += c.trials;
        r.max_violation = std::max(r.max_violation, normalized_violation(c));
    }
    r.components = std::move(children);
    r.finalize();
    for (const auto& c : r.components) r.passed = r.passed && c.passed;
    return r;
}

// ---------------------------------------------------------------------------
// Ancilla generators

PolarDerivative extract_optimal_XR(const DensityMatrix& rho, const HermitianOperator& x, double h, bool richardson) {
    if (x.dim() != rho.dim()) throw DimensionError("extract_optimal_XR: dimension mismatch");
    if (!(h >= 1e-6 && h <= 1e-2)) throw std::invalid_argument("extract_optimal_XR: step h must lie in [1e-6, 1e-2]");
    if (rho.rank() < rho.dim())
        throw InvalidStateError(
            "extract_optimal_XR: state is rank-deficient, so the polar factor is not unique; regularize first");

    const ComplexMatrix root = sqrt_psd(rho.hermitian()).matrix();
    const auto w_at = [&](double t) {
        const ComplexMatrix u = unitary_exp(x, t);
        const ComplexMatrix root_t = u * root * u.adjoint();
        const ComplexMatrix v = polar_unitary(root * root_t);
        return (u.adjoint() * v.adjoint()).transpose();
    };
    const auto central = [&](double step) {
        return cplx{1.0 / (2.0 * step), 0.0} * (w_at(step) - w_at(-step));
    };
    ComplexMatrix dw = central(h);
    if (richardson) dw = cplx{1.0 / 3.0, 0.0} * (cplx{4.0, 0.0} * central(0.5 * h) - dw);

    const ComplexMatrix m = kI * dw;
    PolarDerivative out;
    out.h = h;
    out.residual = (m - m.adjoint()).max_abs();
    out.XR = HermitianOperator::hermitized(m);
    return out;
}

HermitianOperator optimal_XR_closed_form(const DensityMatrix& rho, const HermitianOperator& x) {
    if (x.dim() != rho.dim()) throw DimensionError("optimal_XR_closed_form: dimension mismatch");
    const EigenSystem& es = rho.spectrum();
    const std::size_t d = rho.dim();
    ComplexMatrix xe = es.vectors.adjoint() * x.matrix() * es.vectors;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double pi = std::max(es.values[i], 0.0);
            const double pj = std::max(es.values[j], 0.0);
            const double c = pi + pj > 0.0 ? 2.0 * std::sqrt(pi * pj) / (pi + pj) : 0.0;
            xe(i, j) *= c;
        }
    const ComplexMatrix back = es.vectors * xe * es.vectors.adjoint();
    return HermitianOperator::hermitized(cplx{-1.0, 0.0} * back.transpose());
}

namespace {

SymmetricRealMatrix four_v_on(const PureState& psi, std::span<const HermitianOperator> xr,
                              std::span<const HermitianOperator> xs) {
    if (xr.size() != xs.size()) throw DimensionError("purified covariance: generator counts differ");
    std::vector<HermitianOperator> total;
    total.reserve(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const ComplexMatrix id_r = ComplexMatrix::identity(xr[k].dim());
        const ComplexMatrix id_s = ComplexMatrix::identity(xs[k].dim());
        total.push_back(HermitianOperator::hermitized(kron(xr[k].matrix(), id_s) + kron(id_r, xs[k].matrix())));
    }
    return 4.0 * covariance_matrix(psi, total);
}

double max_entry_difference(const SymmetricRealMatrix& a, const SymmetricRealMatrix& b) {
    return (a - b).max_abs();
}

}  // namespace

SymmetricRealMatrix purified_covariance(const DensityMatrix& rho, std::span<const HermitianOperator> xr,
                                        std::span<const HermitianOperator> xs) {
    return four_v_on(purify(rho), xr, xs);
}

MinCovResult verify_min_cov_matrix(const DensityMatrix& rho, const GeneratorSet& gens, Rng& rng,
                                   const MinCovOptions& options) {
    const std::size_t d = rho.dim();
    if (gens.dim() != d) throw DimensionError("verify_min_cov_matrix: dimension mismatch");
    const auto& xs = gens.generators();

    MinCovResult out;
    out.fisher = fisher_matrix(rho, gens, builtin_f("sld"));
    std::vector<HermitianOperator> xr;
    for (const auto& x : xs) {
        out.xr.push_back(extract_optimal_XR(rho, x, options.h, options.richardson));
        xr.push_back(out.xr.back().XR);
    }
    const PureState psi = purify(rho);
    out.four_v = four_v_on(psi, xr, xs);
    out.residual = max_entry_difference(out.fisher, out.four_v);

    VerificationReport equality;
    equality.theorem_id = "min-cov-equality";
    equality.trials = 1;
    equality.tolerance = options.equality_tol;
    equality.record(diag(0, "max |F - 4V|", d, rho.rank(), gens.label(), "sld", out.residual));
    equality.finalize();

    VerificationReport alternatives;
    alternatives.theorem_id = "min-cov-alternatives";
    alternatives.trials = options.alternatives;
    alternatives.tolerance = 1e-9;
    for (std::size_t a = 0; a < options.alternatives; ++a) {
        // psi' = (U_R (x) I) psi; half the trials perturb the rotated optimum, half are random.
        const ComplexMatrix u = random_unitary(d, rng);
        const ComplexVector rotated = kron(u, ComplexMatrix::identity(d)) * std::span<const cplx>(psi.amplitudes());
        const PureState psi_alt = PureState::normalized(rotated);
        std::vector<HermitianOperator> xr_alt;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const HermitianOperator noise = random_hermitian(d, rng);
            if (a % 2 == 0) {
                const HermitianOperator moved = HermitianOperator::hermitized(u * xr[k].matrix() * u.adjoint());
                xr_alt.push_back(moved + 1e-2 * noise);
            } else {
                xr_alt.push_back(noise);
            }
        }
        const SymmetricRealMatrix four_v_alt = four_v_on(psi_alt, xr_alt, xs);
        const PsdComparison cmp = psd_geq(four_v_alt, out.fisher);
        const double scale = cmp.tolerance / 1e-9;
        alternatives.record(diag(a, a % 2 == 0 ? "4V' >= F (perturbed optimum)" : "4V' >= F (random X'^R)", d,
                                 rho.rank(), gens.label(), "sld", shortfall(cmp.min_eigenvalue, 0.0) / scale,
                                 cmp.witness));
    }
    alternatives.finalize();

    double defect = 0.0;
    for (const auto& p : out.xr) defect = std::max(defect, p.residual);
    VerificationReport hermiticity;
    hermiticity.theorem_id = "min-cov-hermiticity";
    hermiticity.trials = 1;
    hermiticity.tolerance = 1e-6;
    hermiticity.record(diag(0, "Hermiticity defect of i dW/dt", d, rho.rank(), gens.label(), "sld", defect));
    hermiticity.finalize();

    out.report = combine("min-cov", 0, {equality, alternatives, hermiticity});
    out.report.metrics = {{"residual", out.residual}, {"h", options.h}};
    return out;
}

// ---------------------------------------------------------------------------
// Suites

GeneratorSet default_preset(const std::string& name, double j) {
    if (name == "u1") {
        const double z[] = {1.0, -1.0};
        PresetParams p;
        p.hamiltonian = HermitianOperator::diagonal(z);
        return preset("u1", p);
    }
    if (name == "rN") {
        const double a[] = {0.0, 1.0, 2.0};
        const double b[] = {1.0, 0.0, 0.0};
        PresetParams p;
        p.generators = {HermitianOperator::diagonal(a), HermitianOperator::diagonal(b)};
        return preset("rN", p);
    }
    PresetParams p;
    p.j = j;
    return preset(name, p);
}

SelectiveSetup selective_setup(const GeneratorSet& gens, Rng& rng) {
    if (commutant_basis(gens).size() > 1) return {gens, random_commutant_element(gens, rng)};
    // Irreducible: adjoin a one-dimensional trivial block, X_k (+) 0.
    const std::size_t d = gens.dim();
    std::vector<HermitianOperator> extended;
    for (const auto& g : gens.generators()) {
        ComplexMatrix m(d + 1, d + 1);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) m(r, c) = g.matrix()(r, c);
        extended.push_back(HermitianOperator(m));
    }
    GeneratorSet aug(std::move(extended), gens.label() + "+trivial");
    HermitianOperator b = random_commutant_element(aug, rng);
    return {std::move(aug), std::move(b)};
}

VerificationReport verify_positivity(const SuiteOptions& options) {
    VerificationReport r = leaf("fisher-positivity", options, 200, 1e-9);
    const StandardOperatorFunction fs[] = {builtin_f("sld"), builtin_f("wy")};
    for (std::size_t t = 0; t < r.trials; ++t) {
        Rng rng = derive_rng(options.seed, t);
        const std::size_t d = uniform_index(2, 8, rng);
        const std::size_t n = uniform_index(1, 4, rng);
        const auto& f = fs[t % 2];
        const GeneratorSet gens(random_generators(d, n, rng));
        const DensityMatrix rho = random_state_for(d, f, rng);
        const FisherMatrix fm = fisher_matrix(rho, gens, f);
        const double scale = std::max(1.0, fm.frobenius_norm());
        r.record(diag(t, "min eig F / max(1, |F|)", d, rho.rank(), "random", f.name(),
                      shortfall(fm.min_eigenvalue(), 0.0) / scale, fm.min_eigenvector()));
    }
    r.finalize();
    return r;
}

VerificationReport verify_faithfulness(const GeneratorSet& gens, const StandardOperatorFunction& f,
                                       const SuiteOptions& options) {
    const std::size_t d = gens.dim();
    VerificationReport sym = leaf("faithfulness-symmetric[" + gens.label() + "]", options, 50, 1e-9);
    for (std::size_t t = 0; t < sym.trials; ++t) {
        Rng rng = derive_rng(options.seed, t);
        const HermitianOperator y = random_commutant_element(gens, rng);
        ComplexMatrix m = y.matrix() * y.matrix();
        const double c = uniform(0.01, 1.0, rng) * std::max(1.0, m.trace().real());
        for (std::size_t i = 0; i < d; ++i) m(i, i) += c;
        m *= 1.0 / m.trace().real();
        const DensityMatrix rho(HermitianOperator::hermitized(m).matrix());
        const double norm = fisher_matrix(rho, gens, f).frobenius_norm();
        const SymmetryCheck pred = is_symmetric(rho, gens);
        double v = norm;
        if (!pred.symmetric) v = std::max(v, 1.0);
        sym.record(diag(t, pred.symmetric ? "|F| on symmetric state" : "predicate disagrees: state not symmetric", d,
                        rho.rank(), gens.label(), f.name(), v));
    }
    sym.finalize();

    VerificationReport asym = leaf("faithfulness-asymmetric[" + gens.label() + "]", options, 50, 0.0);
    double min_lambda_max = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < asym.trials; ++t) {
        Rng rng = derive_rng(options.seed ^ 0xa5a5a5a5ULL, t);
        const auto& x = gens[t % gens.size()];
        const EigenSystem es = eig_hermitian(x);
        std::size_t i = uniform_index(0, d - 1, rng);
        std::size_t j = uniform_index(0, d - 1, rng);
        // Coherence across distinct eigenvalues; fall back to the extremes if the draw is degenerate.
        if (std::abs(es.values[i] - es.values[j]) < 1e-6) {
            i = 0;
            j = d - 1;
        }
        const double phase = uniform(0.0, 2.0 * std::numbers::pi, rng);
        ComplexVector psi(d);
        const ComplexVector vi = es.vector(i);
        const ComplexVector vj = es.vector(j);
        for (std::size_t r = 0; r < d; ++r) psi[r] = vi[r] + std::polar(1.0, phase) * vj[r];
        const PureState coherent = PureState::normalized(psi);
        const double q = uniform(0.01, 0.5, rng);
        const DensityMatrix rho = regularize(coherent.projector(), q);
        const FisherMatrix fm = fisher_matrix(rho, gens, f);
        const SymmetryCheck pred = is_symmetric(rho, gens);
        min_lambda_max = std::min(min_lambda_max, fm.max_eigenvalue());
        double v = shortfall(fm.max_eigenvalue(), 1e-4);
        if (pred.symmetric) v += 1.0;
        asym.record(diag(t, pred.symmetric ? "predicate disagrees: state reported symmetric" : "lambda_max(F) >= 1e-4",
                         d, rho.rank(), gens.label(), f.name(), v));
    }
    asym.metrics = {{"min-lambda-max", min_lambda_max}};
    asym.finalize();
    return combine("faithfulness[" + gens.label() + "]", options.seed, {sym, asym});
}

VerificationReport verify_monotonicity(const GeneratorSet& gens, const StandardOperatorFunction& f,
                                       const SuiteOptions& options, const MonotonicityOptions& mono) {
    const std::size_t d = gens.dim();
    const TwirlScheme base = scheme_for(gens, mono.samples, 0);
    const bool grid = base.kind != TwirlScheme::Kind::su2_haar;
    const double tol = grid ? 1e-8 : std::sqrt(5.0 / static_cast<double>(base.samples));
    VerificationReport r = leaf((mono.inject_noncovariant ? "monotonicity-noncovariant-control[" : "monotonicity[") + gens.label() + "]",
                                options, 100, tol);
    if (mono.inject_noncovariant)
        r.notes.push_back("negative control: channels are non-covariant unitaries, violations are expected");
    else if (!grid)
        r.notes.push_back("Haar-sampled twirl with " + std::to_string(base.samples) +
                          " samples; tolerance sqrt(5/M) from the certified averaging error");

    for (std::size_t t = 0; t < r.trials; ++t) {
        Rng rng = derive_rng(options.seed, t);
        DensityMatrix rho = random_state_for(d, f, rng);
        KrausChannel channel = KrausChannel::identity(d);
        if (mono.inject_noncovariant) {
            // A state diagonal in the eigenbasis of X_1 has F_11 = 0; a generic rotation makes it positive.
            const EigenSystem es = eig_hermitian(gens[0]);
            const std::vector<double> w = random_weights(d, rng);
            ComplexMatrix m(d, d);
            for (std::size_t i = 0; i < d; ++i) m += cplx{w[i], 0.0} * ComplexMatrix::outer(es.vector(i), es.vector(i));
            rho = DensityMatrix(HermitianOperator::hermitized(m).matrix());
            channel = unitary_channel(unitary_exp(random_hermitian(d, rng), std::numbers::pi / 4.0));
        } else {
            const std::size_t kraus = uniform_index(f.f0() > 0.0 ? 1 : 2, 3, rng);
            TwirlScheme scheme = base;
            scheme.seed = rng();
            channel = twirl(random_channel(d, d, kraus, rng), gens, scheme);
        }
        const DensityMatrix out = apply(channel, rho);
        const PsdComparison cmp = psd_geq(fisher_matrix(rho, gens, f), fisher_matrix(out, gens, f));
        r.record(diag(t, "min eig(F_rho - F_E(rho))", d, rho.rank(), gens.label(), f.name(),
                      shortfall(cmp.min_eigenvalue, 0.0), cmp.witness));
    }
    r.finalize();
    return r;
}

VerificationReport verify_twirl_scaling(const GeneratorSet& gens, std::size_t samples, const SuiteOptions& options) {
    VerificationReport r = leaf("twirl-scaling[" + gens.label() + "]", options, 8, 0.0);
    const std::size_t d = gens.dim();
    double sum_small = 0.0;
    double sum_large = 0.0;
    double worst_small = 0.0;
    const double certified = std::sqrt(5.0 / static_cast<double>(samples));
    for (std::size_t t = 0; t < r.trials; ++t) {
        Rng rng = derive_rng(options.seed, t);
        const KrausChannel ch = random_channel(d, d, uniform_index(1, 3, rng), rng);
        const TwirlScheme small{TwirlScheme::Kind::su2_haar, samples, rng()};
        const TwirlScheme large{TwirlScheme::Kind::su2_haar, 4 * samples, rng()};
        const double dev_small = check_covariance(twirl(ch, gens, small), gens).max_deviation;
        const double dev_large = check_covariance(twirl(ch, gens, large), gens).max_deviation;
        sum_small += dev_small;
        sum_large += dev_large;
        worst_small = std::max(worst_small, dev_small);
        // Per-channel deviations are informational; only the mean ratio is gated.
        r.record(diag(t, "covariance deviation at M and 4M", d, 0, gens.label(), "-", 0.0, {dev_small, dev_large}));
    }
    const double mean_small = sum_small / static_cast<double>(r.trials);
    const double mean_large = sum_large / static_cast<double>(r.trials);
    const double ratio = mean_small / mean_large;
    // sqrt(4) = 2 expected; the band allows for averaging noise over a handful of channels.
    const double band = ratio < 1.4 ? 1.4 - ratio : (ratio > 2.8 ? ratio - 2.8 : 0.0);
    r.max_violation = std::max(r.max_violation, band);
    r.metrics = {{"samples", static_cast<double>(samples)},
                 {"mean-deviation-M", mean_small},
                 {"mean-deviation-4M", mean_large},
                 {"ratio", ratio},
                 {"max-deviation-M", worst_small},
                 {"certified-tolerance-M", certified}};
    r.finalize();
    return r;
}

VerificationReport verify_selective(const GeneratorSet& gens, const StandardOperatorFunction& f,
                                    const SuiteOptions& options) {
    VerificationReport r = leaf("selective-monotonicity[" + gens.label() + "]", options, 100, 1e-8);
    for (std::size_t t = 0; t < r.trials; ++t) {
        Rng rng = derive_rng(options.seed, t);
        const SelectiveSetup setup = selective_setup(gens, rng);
        if (t == 0 && setup.gens.label() != gens.label())
            r.notes.push_back("irreducible generators extended by a trivial block (" + setup.gens.label() + ")");
        const std::size_t d = setup.gens.dim();
        const DensityMatrix rho = random_state_for(d, f, rng);
        const CovariantInstrument inst = projective_instrument(setup.b, setup.gens);
        SymmetricRealMatrix average(setup.gens.size());
        for (const auto& branch : inst.branches()) {
            const auto outcome = apply_branch(branch, rho);
            if (!outcome) continue;
            average = average + outcome->weight * fisher_matrix(outcome->state, setup.gens, f);
        }
        const PsdComparison cmp = psd_geq(fisher_matrix(rho, setup.gens, f), average);
        r.record(diag(t, "min eig(F_rho - sum_j p_j F_sigma_j), " + std::to_string(inst.size()) + " branches", d,
                      rho.rank(), setup.gens.label(), f.name(), shortfall(cmp.min_eigenvalue, 0.0), cmp.witness));
    }
    r.finalize();
    return r;
}

VerificationReport verify_luo_matrix(const StandardOperatorFunction& f, const SuiteOptions& options) {
    if (!(f.f0() > 0.0))
        throw std::invalid_argument("verify_luo_matrix: f(0) = 0 makes the skew information vanish identically");
    VerificationReport bounds = leaf("luo-bounds", options, 100, 1e-9);
    VerificationReport pure = leaf("luo-pure", options, 100, 1e-9);
    VerificationReport commuting = leaf("luo-commuting", options, 100, 1e-10);
    VerificationReport convex = leaf("luo-convexity", options, 100, 1e-9);

    for (std::size_t t = 0; t < bounds.trials; ++t) {
        Rng rng = derive_rng(options.seed, t);
        const std::size_t d = uniform_index(2, 5, rng);
        const std::size_t n = uniform_index(1, 3, rng);
        const GeneratorSet gens(random_generators(d, n, rng));

        {  // 0 <= I <= V
            const DensityMatrix rho = random_state_for(d, f, rng);
            const SymmetricRealMatrix skew = skew_info_matrix(rho, gens, f);
            const SymmetricRealMatrix cov = covariance_matrix(rho, gens);
            const PsdComparison upper = psd_geq(cov, skew);
            const double lower = skew.min_eigenvalue();
            const bool upper_worse = upper.min_eigenvalue < lower;
            bounds.record(diag(t, upper_worse ? "min eig(V - I)" : "min eig(I)", d, rho.rank(), "random", f.name(),
                               shortfall(std::min(lower, upper.min_eigenvalue), 0.0),
                               upper_worse ? upper.witness : skew.min_eigenvector()));
        }
        {  // pure states: I = V
            const PureState psi = random_pure(d, rng);
            const DensityMatrix rho = psi.projector();
            const double gap = (skew_info_matrix(rho, gens, f) - covariance_matrix(psi, gens.generators())).frobenius_norm();
            pure.record(diag(t, "|I - V| on pure state", d, 1, "random", f.name(), gap));
        }
        {  // [rho, X_k] = 0 for all k: I = 0
            const ComplexMatrix u = random_unitary(d, rng);
            std::vector<HermitianOperator> diag_gens;
            // Commuting generators live in a d-dimensional space of diagonals.
            for (std::size_t k = 0; k < std::min(n, d); ++k) {
                std::vector<double> ev(d);
                for (auto& e : ev) e = uniform(-2.0, 2.0, rng);
                diag_gens.push_back(HermitianOperator::hermitized(u * ComplexMatrix::diagonal(ev) * u.adjoint()));
            }
            const GeneratorSet commuting_gens(std::move(diag_gens));
            std::vector<double> p = random_weights(d, rng);
            if (f.f0() > 0.0 && t % 3 == 0) p[0] = 0.0;  // include rank-deficient commuting states
            double s = 0.0;
            for (double x : p) s += x;
            for (auto& x : p) x /= s;
            const DensityMatrix rho(HermitianOperator::hermitized(u * ComplexMatrix::diagonal(p) * u.adjoint()).matrix());
            const double norm = skew_info_matrix(rho, commuting_gens, f).frobenius_norm();
            commuting.record(diag(t, "|I| for commuting state", d, rho.rank(), "random-commuting", f.name(), norm));
        }
        {  // convexity over 3-element mixtures
            const std::vector<double> w = random_weights(3, rng);
            std::vector<DensityMatrix> states;
            std::vector<SymmetricRealMatrix> skews;
            for (int i = 0; i < 3; ++i) {
                states.push_back(random_state_for(d, f, rng));
                skews.push_back(skew_info_matrix(states.back(), gens, f));
            }
            const DensityMatrix mixed = mix(w, states);
            const PsdComparison cmp = psd_geq(weighted_sum(w, skews), skew_info_matrix(mixed, gens, f));
            convex.record(diag(t, "min eig(sum p_i I_i - I_mix)", d, mixed.rank(), "random", f.name(),
                               shortfall(cmp.min_eigenvalue, 0.0), cmp.witness));
        }
    }
    for (auto* c : {&bounds, &pure, &commuting, &convex}) c->finalize();
    return combine("luo-matrix", options.seed, {bounds, pure, commuting, convex});
}

VerificationReport verify_resource_measure(const GeneratorSet& gens, const StandardOperatorFunction& f,
                                           const SuiteOptions& options, const MonotonicityOptions& mono) {
    VerificationReport pos = leaf("positivity[" + gens.label() + "]", options, 100, 1e-9);
    for (std::size_t t = 0; t < pos.trials; ++t) {
        Rng rng = derive_rng(options.seed ^ 0x9e3779b9ULL, t);
        const DensityMatrix rho = random_state_for(gens.dim(), f, rng);
        const FisherMatrix fm = fisher_matrix(rho, gens, f);
        pos.record(diag(t, "min eig F / max(1, |F|)", gens.dim(), rho.rank(), gens.label(), f.name(),
                        shortfall(fm.min_eigenvalue(), 0.0) / std::max(1.0, fm.frobenius_norm()),
                        fm.min_eigenvector()));
    }
    pos.finalize();
    return combine("resource-measure[" + gens.label() + "]", options.seed,
                   {pos, verify_faithfulness(gens, f, options), verify_monotonicity(gens, f, options, mono)});
}

VerificationReport verify_min_cov_suite(const SuiteOptions& options, const MinCovOptions& min_cov) {
    VerificationReport eq = leaf("min-cov-equality", options, 50, min_cov.equality_tol);
    VerificationReport alt = leaf("min-cov-alternatives", options, eq.trials * min_cov.alternatives, 1e-9);
    alt.trials = eq.trials * min_cov.alternatives;
    VerificationReport herm = leaf("min-cov-hermiticity", options, eq.trials, 1e-6);
    herm.trials = eq.trials;

    for (std::size_t t = 0; t < eq.trials; ++t) {
        Rng rng = derive_rng(options.seed, t);
        const std::size_t d = uniform_index(2, 4, rng);
        const std::size_t n = uniform_index(1, 3, rng);
        const GeneratorSet gens(random_generators(d, n, rng));
        const DensityMatrix rho = random_density(d, d, rng);
        const MinCovResult res = verify_min_cov_matrix(rho, gens, rng, min_cov);
        eq.record(diag(t, "max |F - 4V|", d, d, "random", "sld", res.residual));
        const auto& alt_report = res.report.components[1];
        for (const auto& dg : alt_report.diagnostics) {
            TrialDiagnostic copy = dg;
            copy.trial = t * min_cov.alternatives + dg.trial;
            alt.record(std::move(copy));
        }
        herm.record(res.report.components[2].diagnostics.front());
        herm.diagnostics.back().trial = t;
    }

    // Central differences: the error in X^R should shrink about 4x when h halves. The equality
    // residual itself is second order in that error, so it is not the quantity tested here.
    VerificationReport order = leaf("min-cov-convergence-order", options, 10, 0.0);
    order.trials = std::min<std::size_t>(10, eq.trials);
    double worst_ratio_low = std::numeric_limits<double>::infinity();
    double worst_ratio_high = 0.0;
    for (std::size_t t = 0; t < order.trials; ++t) {
        Rng rng = derive_rng(options.seed ^ 0x51ed270bULL, t);
        const std::size_t d = uniform_index(2, 4, rng);
        const HermitianOperator x = random_hermitian(d, rng);
        const DensityMatrix rho = regularize(random_density(d, d, rng), 0.5);
        const HermitianOperator exact = optimal_XR_closed_form(rho, x);
        const double e1 = (extract_optimal_XR(rho, x, min_cov.h).XR.matrix() - exact.matrix()).frobenius_norm();
        const double e2 = (extract_optimal_XR(rho, x, 0.5 * min_cov.h).XR.matrix() - exact.matrix()).frobenius_norm();
        const double ratio = e1 / e2;
        worst_ratio_low = std::min(worst_ratio_low, ratio);
        worst_ratio_high = std::max(worst_ratio_high, ratio);
        const double band = std::isnan(ratio) ? 1.0 : (ratio < 3.0 ? 3.0 - ratio : (ratio > 5.0 ? ratio - 5.0 : 0.0));
        order.record(diag(t, "|X^R(h) - X^R| / |X^R(h/2) - X^R| in [3, 5]", d, d, "random", "sld", band, {e1, e2}));
    }
    order.metrics = {{"min-ratio", worst_ratio_low}, {"max-ratio", worst_ratio_high}};

    for (auto* c : {&eq, &alt, &herm, &order}) c->finalize();
    VerificationReport r = combine("min-cov", options.seed, {eq, alt, herm, order});
    r.metrics = {{"h", min_cov.h}, {"richardson", min_cov.richardson ? 1.0 : 0.0}};
    return r;
}

VerificationReport counterexample_yu(const SuiteOptions& options, std::size_t max_ensemble_size) {
    if (max_ensemble_size < 2) throw std::invalid_argument("counterexample: ensemble size must be at least 2");
    const ComplexMatrix sx{{0.0, 1.0}, {1.0, 0.0}};
    const ComplexMatrix sy{{0.0, cplx{0.0, -1.0}}, {cplx{0.0, 1.0}, 0.0}};
    const std::vector<HermitianOperator> gens{HermitianOperator(sx), HermitianOperator(sy)};
    const DensityMatrix rho = DensityMatrix::maximally_mixed(2);

    VerificationReport fisher = leaf("counterexample-fisher", options, 1, 1e-12);
    fisher.trials = 1;
    const double f_norm = fisher_matrix(rho, gens, builtin_f("sld")).max_abs();
    fisher.record(diag(0, "max |F(I/2; sx, sy)|", 2, 2, "custom", "sld", f_norm));
    fisher.finalize();

    VerificationReport ens = leaf("counterexample-ensembles", options, 10000, 1e-9);
    double min_trace = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < ens.trials; ++t) {
        Rng rng = derive_rng(options.seed, t);
        const std::size_t m = uniform_index(2, max_ensemble_size, rng);
        const Ensemble e = random_ensemble(rho, m, rng);
        SymmetricRealMatrix avg(2);
        for (std::size_t i = 0; i < e.size(); ++i) avg = avg + e.weights()[i] * covariance_matrix(e.states()[i], gens);
        const double tr = avg(0, 0) + avg(1, 1);
        min_trace = std::min(min_trace, tr);
        ens.record(diag(t, "1 - tr(sum p_i V_i), ensemble size " + std::to_string(m), 2, 2, "custom", "sld",
                        shortfall(tr, 1.0)));
    }
    ens.metrics = {{"min-trace", min_trace}};
    if (!(min_trace > 0.9)) ens.max_violation = std::max(ens.max_violation, 1.0);
    ens.finalize();

    VerificationReport r = combine("counterexample", options.seed, {fisher, ens});
    r.metrics = {{"fisher-max-abs", f_norm}, {"min-trace", min_trace}};
    return r;
}

VerificationReport verify_contraction(const SuiteOptions& options) {
    VerificationReport r = leaf("scalar-matrix-consistency", options, 100, 1e-10);
    VerificationReport single = leaf("single-generator-reduction", options, 100, 0.0);
    const StandardOperatorFunction fs[] = {builtin_f("sld"), builtin_f("wy"), builtin_f("km")};
    for (std::size_t t = 0; t < r.trials; ++t) {
        Rng rng = derive_rng(options.seed, t);
        const std::size_t d = uniform_index(2, 6, rng);
        const std::size_t n = uniform_index(1, 4, rng);
        const auto& f = fs[t % 3];
        const GeneratorSet gens(random_generators(d, n, rng));
        const DensityMatrix rho = random_state_for(d, f, rng);
        const FisherMatrix fm = fisher_matrix(rho, gens, f);
        double worst = 0.0;
        std::vector<double> worst_lambda;
        for (int l = 0; l < 100; ++l) {
            const std::vector<double> lambda = random_direction(n, rng);
            const double lhs = fm.quadratic_form(lambda);
            const double rhs = fisher_scalar(rho, gens.combination(lambda), f);
            const double rel = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
            if (rel > worst) {
                worst = rel;
                worst_lambda = lambda;
            }
        }
        r.record(diag(t, "relative |l^T F l - F(sum l_k X_k)|", d, rho.rank(), "random", f.name(), worst,
                      worst_lambda));
        const double exact = std::abs(fisher_matrix(rho, std::span<const HermitianOperator>(&gens[0], 1), f)(0, 0) -
                                      fisher_scalar(rho, gens[0], f));
        single.record(diag(t, "1x1 matrix vs scalar", d, rho.rank(), "random", f.name(), exact));
    }
    r.finalize();
    single.finalize();
    return combine("contraction", options.seed, {r, single});
}

}  // namespace qfim
