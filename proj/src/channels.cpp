#include "qfim/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qfim {

namespace {

ComplexMatrix kraus_sum(const std::vector<ComplexMatrix>& kraus, std::size_t dim_in) {
    ComplexMatrix s(dim_in, dim_in);
    for (const auto& k : kraus) s += k.adjoint() * k;
    return s;
}

ComplexMatrix matrix_unit(std::size_t d, std::size_t a, std::size_t b) {
    ComplexMatrix e(d, d);
    e(a, b) = 1.0;
    return e;
}

std::string format_point(std::span<const double> t) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? ", " : "") << t[i];
    os << ")";
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// KrausChannel

KrausChannel::KrausChannel(std::vector<ComplexMatrix> kraus, Completeness completeness)
    : kraus_(std::move(kraus)), completeness_(completeness) {
    if (kraus_.empty()) throw std::invalid_argument("KrausChannel: at least one Kraus operator is required");
    dim_out_ = kraus_.front().rows();
    dim_in_ = kraus_.front().cols();
    for (const auto& k : kraus_)
        if (k.rows() != dim_out_ || k.cols() != dim_in_) throw DimensionError("KrausChannel: inconsistent Kraus shapes");
    const ComplexMatrix s = kraus_sum(kraus_, dim_in_);
    if (completeness_ == Completeness::trace_preserving) {
        if ((s - ComplexMatrix::identity(dim_in_)).max_abs() > 1e-9)
            throw std::invalid_argument("KrausChannel: sum K^dagger K differs from I");
    } else {
        const EigenSystem es = eig_hermitian(HermitianOperator::hermitized(ComplexMatrix::identity(dim_in_) - s));
        if (es.values.front() < -1e-9) throw std::invalid_argument("KrausChannel: sum K^dagger K exceeds I");
    }
}

KrausChannel KrausChannel::identity(std::size_t dim) {
    return KrausChannel({ComplexMatrix::identity(dim)}, Completeness::trace_preserving);
}

KrausChannel KrausChannel::from_choi(const ComplexMatrix& choi, std::size_t dim_in, std::size_t dim_out,
                                     Completeness completeness) {
    if (choi.rows() != dim_in * dim_out || !choi.is_square()) throw DimensionError("from_choi: Choi matrix shape");
    const EigenSystem es = eig_hermitian(HermitianOperator::hermitized(choi));
    if (es.values.front() < -1e-9 * std::max(1.0, choi.frobenius_norm()))
        throw std::invalid_argument("from_choi: Choi matrix is not positive semidefinite");
    std::vector<ComplexMatrix> kraus;
    for (std::size_t i = es.values.size(); i-- > 0;) {
        if (es.values[i] < 1e-12) break;
        // Column |K^T>> of the Choi matrix, indexed (in, out).
        ComplexMatrix kt = devectorize(es.vector(i), dim_in, dim_out);
        kt *= std::sqrt(es.values[i]);
        kraus.push_back(kt.transpose());
    }
    if (kraus.empty()) kraus.emplace_back(dim_out, dim_in);
    return KrausChannel(std::move(kraus), completeness);
}

KrausChannel KrausChannel::with_metadata(CovarianceMetadata meta) const {
    KrausChannel copy = *this;
    copy.metadata_ = std::move(meta);
    return copy;
}

ComplexMatrix KrausChannel::apply_operator(const ComplexMatrix& x) const {
    if (x.rows() != dim_in_ || x.cols() != dim_in_) throw DimensionError("KrausChannel: input dimension mismatch");
    ComplexMatrix out(dim_out_, dim_out_);
    for (const auto& k : kraus_) out += k * x * k.adjoint();
    return out;
}

ComplexMatrix KrausChannel::choi() const {
    const std::size_t total = dim_in_ * dim_out_;
    ComplexMatrix j(total, total);
    for (std::size_t a = 0; a < dim_in_; ++a)
        for (std::size_t b = 0; b < dim_in_; ++b) {
            const ComplexMatrix out = apply_operator(matrix_unit(dim_in_, a, b));
            for (std::size_t c = 0; c < dim_out_; ++c)
                for (std::size_t d = 0; d < dim_out_; ++d) j(a * dim_out_ + c, b * dim_out_ + d) = out(c, d);
        }
    return j;
}

DensityMatrix apply(const KrausChannel& channel, const DensityMatrix& rho) {
    if (channel.completeness() != Completeness::trace_preserving)
        throw std::invalid_argument("apply: channel is not trace-preserving; use apply_branch");
    return DensityMatrix(HermitianOperator::hermitized(channel.apply_operator(rho.matrix())).matrix());
}

std::optional<BranchOutcome> apply_branch(const KrausChannel& branch, const DensityMatrix& rho) {
    ComplexMatrix out = HermitianOperator::hermitized(branch.apply_operator(rho.matrix())).matrix();
    const double weight = out.trace().real();
    if (weight < 1e-12) return std::nullopt;
    out *= 1.0 / weight;
    return BranchOutcome{std::min(weight, 1.0), DensityMatrix(out)};
}

// ---------------------------------------------------------------------------
// Covariance

ParameterGrid default_covariance_grid(const GeneratorSet& gens) {
    const std::size_t n = gens.size();
    ParameterGrid grid;
    for (std::size_t k = 0; k < n; ++k)
        for (double s : {0.3, 0.7, 1.3, 2.9, -1.1}) {
            std::vector<double> t(n, 0.0);
            t[k] = s;
            grid.push_back(std::move(t));
        }
    Rng rng = derive_rng(0x5eedc0ffeeULL, n);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    for (int i = 0; i < 4; ++i) {
        std::vector<double> t(n);
        for (auto& x : t) x = angle(rng);
        grid.push_back(std::move(t));
    }
    return grid;
}

CovarianceCheck check_covariance(const KrausChannel& channel, const GeneratorSet& gens, const ParameterGrid& grid,
                                 double tol) {
    const std::size_t d = gens.dim();
    if (channel.dim_in() != d || channel.dim_out() != d) throw DimensionError("check_covariance: dimension mismatch");
    const UnitaryRep rep(gens);
    CovarianceCheck out;
    for (const auto& t : grid) {
        const ComplexMatrix u = rep.at(t);
        const ComplexMatrix u_adj = u.adjoint();
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                const ComplexMatrix e = matrix_unit(d, a, b);
                const ComplexMatrix lhs = channel.apply_operator(u * e * u_adj);
                const ComplexMatrix rhs = u * channel.apply_operator(e) * u_adj;
                out.max_deviation = std::max(out.max_deviation, (lhs - rhs).frobenius_norm());
            }
    }
    out.covariant = out.max_deviation <= tol;
    return out;
}

CovarianceCheck check_covariance(const KrausChannel& channel, const GeneratorSet& gens, double tol) {
    return check_covariance(channel, gens, default_covariance_grid(gens), tol);
}

// ---------------------------------------------------------------------------
// Twirling

namespace {

bool is_su2_triple(const GeneratorSet& gens) {
    if (gens.size() != 3) return false;
    const auto& g = gens.generators();
    for (std::size_t k = 0; k < 3; ++k) {
        const ComplexMatrix lhs = commutator(g[k].matrix(), g[(k + 1) % 3].matrix());
        const ComplexMatrix rhs = kI * g[(k + 2) % 3].matrix();
        if ((lhs - rhs).max_abs() > 1e-10) return false;
    }
    return true;
}

std::vector<ComplexMatrix> grid_unitaries(const GeneratorSet& gens, std::size_t requested) {
    std::vector<std::vector<double>> axes;
    for (const auto& x : gens.generators()) {
        const auto periodicity = fundamental_frequency(x);
        if (!periodicity)
            throw std::invalid_argument(
                "twirl: generator spectrum is incommensurate; an explicit period is required for a grid twirl");
        if (periodicity->frequency == 0.0) {
            axes.push_back({0.0});
            continue;
        }
        const auto exact = static_cast<std::size_t>(2 * periodicity->max_harmonic + 1);
        const std::size_t points = requested == 0 ? exact : requested;
        if (points < exact)
            throw std::invalid_argument("twirl: grid of " + std::to_string(points) +
                                        " points cannot resolve the spectrum; at least " + std::to_string(exact) +
                                        " are needed");
        const double period = 2.0 * std::numbers::pi / periodicity->frequency;
        std::vector<double> axis(points);
        for (std::size_t m = 0; m < points; ++m) axis[m] = period * static_cast<double>(m) / static_cast<double>(points);
        axes.push_back(std::move(axis));
    }
    // Product grid; generators commute, so U_t factorizes.
    std::vector<ComplexMatrix> unitaries{ComplexMatrix::identity(gens.dim())};
    for (std::size_t k = 0; k < axes.size(); ++k) {
        std::vector<ComplexMatrix> next;
        next.reserve(unitaries.size() * axes[k].size());
        for (const auto& u : unitaries)
            for (double t : axes[k]) next.push_back(u * unitary_exp(gens[k], t));
        unitaries = std::move(next);
    }
    return unitaries;
}

KrausChannel twirl_over(const KrausChannel& channel, const std::vector<ComplexMatrix>& unitaries) {
    const std::size_t d = channel.dim_in();
    const double weight = 1.0 / static_cast<double>(unitaries.size());
    ComplexMatrix choi(d * d, d * d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            const ComplexMatrix e = matrix_unit(d, a, b);
            ComplexMatrix avg(d, d);
            for (const auto& u : unitaries) {
                const ComplexMatrix u_adj = u.adjoint();
                avg += u_adj * channel.apply_operator(u * e * u_adj) * u;
            }
            for (std::size_t c = 0; c < d; ++c)
                for (std::size_t dd = 0; dd < d; ++dd) choi(a * d + c, b * d + dd) = weight * avg(c, dd);
        }
    return KrausChannel::from_choi(choi, d, d, channel.completeness());
}

}  // namespace

ComplexMatrix random_su2_element(const GeneratorSet& gens, Rng& rng) {
    ComplexMatrix u = random_unitary(2, rng);
    const cplx det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
    u *= 1.0 / std::sqrt(det);
    // u = a0 I - i (a . sigma)
    const double a0 = 0.5 * (u(0, 0) + u(1, 1)).real();
    const double a1 = -0.5 * (u(0, 1) + u(1, 0)).imag();
    const double a2 = 0.5 * (u(1, 0) - u(0, 1)).real();
    const double a3 = 0.5 * (u(1, 1) - u(0, 0)).imag();
    const double s = std::sqrt(a1 * a1 + a2 * a2 + a3 * a3);
    if (s == 0.0) return ComplexMatrix::identity(gens.dim());
    const double theta = 2.0 * std::atan2(s, a0);
    const std::vector<double> t{theta * a1 / s, theta * a2 / s, theta * a3 / s};
    return unitary_exp(gens.combination(t), 1.0);
}

KrausChannel twirl(const KrausChannel& channel, const GeneratorSet& gens, const TwirlScheme& scheme) {
    if (channel.dim_in() != gens.dim() || channel.dim_out() != gens.dim())
        throw DimensionError("twirl: channel and generators act on different spaces");
    switch (scheme.kind) {
        case TwirlScheme::Kind::u1_grid:
        case TwirlScheme::Kind::rn_grid: {
            if (scheme.kind == TwirlScheme::Kind::u1_grid && gens.size() != 1)
                throw std::invalid_argument("twirl: u1-grid needs exactly one generator");
            if (!generators_commute(gens))
                throw std::invalid_argument("twirl: grid twirl needs commuting generators");
            const auto unitaries = grid_unitaries(gens, scheme.samples);
            const std::string name = scheme.kind == TwirlScheme::Kind::u1_grid ? "u1-grid" : "rN-grid";
            return twirl_over(channel, unitaries).with_metadata({name, unitaries.size(), 1e-9});
        }
        case TwirlScheme::Kind::su2_haar: {
            if (!is_su2_triple(gens)) throw std::invalid_argument("twirl: su2-haar needs an su(2) generator triple");
            if (scheme.samples == 0) throw std::invalid_argument("twirl: su2-haar needs a positive sample count");
            Rng rng = derive_rng(scheme.seed, 0);
            std::vector<ComplexMatrix> unitaries;
            unitaries.reserve(scheme.samples);
            for (std::size_t m = 0; m < scheme.samples; ++m) unitaries.push_back(random_su2_element(gens, rng));
            const double tol = std::sqrt(5.0 / static_cast<double>(scheme.samples));
            return twirl_over(channel, unitaries).with_metadata({"su2-haar", scheme.samples, tol});
        }
    }
    throw std::invalid_argument("twirl: unknown scheme");
}

// ---------------------------------------------------------------------------
// Dilation

KrausChannel dilation_covariant(const ComplexMatrix& v, const PureState& eta, const GeneratorSet& gens_s,
                                const GeneratorSet& gens_r) {
    const std::size_t ds = gens_s.dim();
    const std::size_t dr = gens_r.dim();
    if (gens_s.size() != gens_r.size())
        throw std::invalid_argument("dilation_covariant: system and ancilla generator counts differ");
    if (v.rows() != ds * dr || !v.is_square()) throw DimensionError("dilation_covariant: V must act on S (x) R");
    if (eta.dim() != dr) throw DimensionError("dilation_covariant: ancilla state dimension mismatch");

    const SymmetryCheck sym = is_symmetric(eta.projector(), gens_r, 1e-9);
    if (!sym.symmetric)
        throw std::invalid_argument("dilation_covariant: ancilla state is not symmetric (commutator norm " +
                                    std::to_string(sym.witness) + ")");
    const UnitaryRep rep_s(gens_s);
    const UnitaryRep rep_r(gens_r);
    const double tol = 1e-9 * std::max(1.0, v.frobenius_norm());
    for (const auto& t : default_covariance_grid(gens_s)) {
        const ComplexMatrix u = kron(rep_s.at(t), rep_r.at(t));
        const double dev = commutator(v, u).frobenius_norm();
        if (dev > tol)
            throw std::invalid_argument("dilation_covariant: V is not covariant at t = " + format_point(t) +
                                        " (commutator norm " + std::to_string(dev) + ")");
    }
    // K_k = (I (x) <k|) V (I (x) |eta>)
    std::vector<ComplexMatrix> kraus;
    kraus.reserve(dr);
    const auto& amp = eta.amplitudes();
    for (std::size_t k = 0; k < dr; ++k) {
        ComplexMatrix op(ds, ds);
        for (std::size_t s = 0; s < ds; ++s)
            for (std::size_t sp = 0; sp < ds; ++sp) {
                cplx acc{0.0, 0.0};
                for (std::size_t r = 0; r < dr; ++r) acc += v(s * dr + k, sp * dr + r) * amp[r];
                op(s, sp) = acc;
            }
        if (op.frobenius_norm() > 0.0) kraus.push_back(std::move(op));
    }
    if (kraus.empty()) kraus.emplace_back(ds, ds);
    return KrausChannel(std::move(kraus), Completeness::trace_preserving).with_metadata({"dilation", 0, 1e-9});
}

// ---------------------------------------------------------------------------
// Instruments

CovariantInstrument::CovariantInstrument(std::vector<KrausChannel> branches, const GeneratorSet& gens)
    : branches_(std::move(branches)) {
    if (branches_.empty()) throw std::invalid_argument("CovariantInstrument: no branches");
    const std::size_t d = gens.dim();
    ComplexMatrix total(d, d);
    for (const auto& b : branches_) {
        if (b.dim_in() != d || b.dim_out() != d) throw DimensionError("CovariantInstrument: branch dimension mismatch");
        const CovarianceCheck cov = check_covariance(b, gens);
        if (!cov.covariant)
            throw std::invalid_argument("CovariantInstrument: branch is not covariant (deviation " +
                                        std::to_string(cov.max_deviation) + ")");
        total += kraus_sum(b.kraus(), d);
    }
    if ((total - ComplexMatrix::identity(d)).max_abs() > 1e-9)
        throw std::invalid_argument("CovariantInstrument: branches do not sum to a trace-preserving map");
}

CovariantInstrument projective_instrument(const HermitianOperator& b, const GeneratorSet& gens) {
    if (b.dim() != gens.dim()) throw DimensionError("projective_instrument: dimension mismatch");
    for (std::size_t k = 0; k < gens.size(); ++k) {
        const double c = commutator(b.matrix(), gens[k].matrix()).frobenius_norm();
        if (c > 1e-10 * std::max(1.0, b.matrix().frobenius_norm() * gens[k].matrix().frobenius_norm()))
            throw std::invalid_argument("projective_instrument: B does not commute with generator " +
                                        std::to_string(k) + " (commutator norm " + std::to_string(c) + ")");
    }
    const EigenSystem es = eig_hermitian(b);
    const double cluster = 1e-9 * std::max(1.0, b.matrix().frobenius_norm());
    std::vector<KrausChannel> branches;
    const std::size_t d = b.dim();
    std::size_t start = 0;
    while (start < d) {
        std::size_t end = start + 1;
        while (end < d && es.values[end] - es.values[end - 1] <= cluster) ++end;
        ComplexMatrix proj(d, d);
        for (std::size_t i = start; i < end; ++i) {
            const ComplexVector v = es.vector(i);
            proj += ComplexMatrix::outer(v, v);
        }
        branches.push_back(KrausChannel({HermitianOperator::hermitized(proj).matrix()},
                                        Completeness::trace_non_increasing)
                               .with_metadata({"projective", 0, 1e-8}));
        start = end;
    }
    return CovariantInstrument(std::move(branches), gens);
}

// ---------------------------------------------------------------------------
// Constructors

KrausChannel unitary_channel(const ComplexMatrix& u) {
    return KrausChannel({u}, Completeness::trace_preserving);
}

KrausChannel depolarizing_channel(std::size_t dim, double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("depolarizing_channel: p must lie in [0, 1]");
    const ComplexVector phi = vectorize(ComplexMatrix::identity(dim));
    ComplexMatrix choi = cplx{1.0 - p, 0.0} * ComplexMatrix::outer(phi, phi);
    choi += cplx{p / static_cast<double>(dim), 0.0} * ComplexMatrix::identity(dim * dim);
    return KrausChannel::from_choi(choi, dim, dim, Completeness::trace_preserving);
}

KrausChannel dephasing_channel(std::size_t dim) {
    std::vector<ComplexMatrix> kraus;
    for (std::size_t i = 0; i < dim; ++i) kraus.push_back(matrix_unit(dim, i, i));
    return KrausChannel(std::move(kraus), Completeness::trace_preserving);
}

KrausChannel random_channel(std::size_t dim_in, std::size_t dim_out, std::size_t kraus_count, Rng& rng) {
    const ComplexMatrix g = random_ginibre(dim_out * kraus_count, dim_in, rng);
    const HermitianOperator gram = HermitianOperator::hermitized(g.adjoint() * g);
    const ComplexMatrix isometry = g * apply_spectral(gram, [](double x) { return 1.0 / std::sqrt(x); }).matrix();
    std::vector<ComplexMatrix> kraus;
    for (std::size_t k = 0; k < kraus_count; ++k) {
        ComplexMatrix op(dim_out, dim_in);
        for (std::size_t r = 0; r < dim_out; ++r)
            for (std::size_t c = 0; c < dim_in; ++c) op(r, c) = isometry(k * dim_out + r, c);
        kraus.push_back(std::move(op));
    }
    return KrausChannel(std::move(kraus), Completeness::trace_preserving);
}

}  // namespace qfim
