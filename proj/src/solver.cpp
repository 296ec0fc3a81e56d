#include "swrrst/solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <deque>
#include <limits>

namespace swrrst {

FermionOperator truncate_rank(const FermionOperator& a, int cap) {
    if (cap <= 0) return a;
    FermionOperator out;
    for (const auto& [key, c] : a.terms())
        if (key.body_rank() <= cap) out.add_term(key, c);
    return out;
}

namespace {

double re_inner(const FermionOperator& a, const FermionOperator& b) {
    double s = 0;
    for (const auto& [key, c] : a.terms()) {
        cplx other = b.coefficient(key);
        if (other != cplx{}) s += std::real(std::conj(c) * other);
    }
    return s;
}

// Pulay mixing over the trial window: minimize the norm of the combined
// error vector subject to weights summing to 1; falls back to the plain
// update when the augmented system is ill-conditioned.
FermionOperator diis_extrapolate(const std::deque<FermionOperator>& trials,
                                 const std::deque<FermionOperator>& errors) {
    const int m = static_cast<int>(trials.size());
    if (m < 2) return trials.back();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, m + 1);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) a(i, j) = a(j, i) = re_inner(errors[i], errors[j]);
    for (int i = 0; i < m; ++i) a(i, m) = a(m, i) = 1.0;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    rhs(m) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) return trials.back();
    Eigen::VectorXd w = lu.solve(rhs);
    if (!w.allFinite() || (a * w - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm()))
        return trials.back();
    FermionOperator out;
    for (int i = 0; i < m; ++i) out += w(i) * trials[i];
    return out;
}

FermionOperator antihermitize(const FermionOperator& a) {
    FermionOperator out = a;
    out -= a.adjoint();
    out *= 0.5;
    return out;
}

} // namespace

FermionOperator bch_transform(const FermionOperator& h, const FermionOperator& b, int l,
                              int body_rank_cap, std::size_t term_cap, double series_tol,
                              int* ranks_used) {
    if (l < 0) throw ValidationError("commutator rank l must be >= 0, got " + std::to_string(l));
    constexpr int kAdaptiveRankCap = 64;
    const int max_rank = (l == 0) ? kAdaptiveRankCap : l;
    FermionOperator g = h;
    FermionOperator t = h;
    int used = 0;
    for (int i = 1; i <= max_rank; ++i) {
        t = commutator(b, t, term_cap);
        t *= 1.0 / i;
        if (body_rank_cap > 0) t = truncate_rank(t, body_rank_cap);
        g += t;
        g.check_term_cap(term_cap);
        used = i;
        if (l == 0 && t.norm2() < series_tol) break;
        if (l == 0 && i == max_rank)
            throw CapacityError("commutator series still above tolerance at rank " +
                                std::to_string(max_rank));
    }
    if (ranks_used) *ranks_used = used;
    return g;
}

FermionOperator residual(const FermionOperator& h, const GeneratorB& b, int l,
                         const OrbitalPartition& part) {
    return project(bch_transform(h, b.op, l), b.domain, part);
}

std::pair<GeneratorB, SolveReport> solve_swrrst(const FermionOperator& h,
                                                const OrbitalPartition& part,
                                                const SolverOptions& opts) {
    if (h.max_index() > part.n_spin_orbitals())
        throw ValidationError("Hamiltonian touches spin-orbital " +
                              std::to_string(h.max_index()) + " beyond the partition's " +
                              std::to_string(part.n_spin_orbitals()));
    if (!approx_equal(h.adjoint(), h, 1e-10 * std::max(1.0, h.norm2())))
        throw ValidationError("Hamiltonian is not Hermitian");
    if (opts.l < 0 || opts.max_iter < 1 || opts.tol <= 0 || opts.diis_window < 2)
        throw ValidationError("invalid solver options");

    SolveReport report;
    report.commutator_rank = opts.l;
    report.smallest_denominator = std::numeric_limits<double>::infinity();
    GeneratorB b{FermionOperator{}, opts.domain, opts.body_rank};

    auto denominator = [&](const TermKey& key) {
        double d = part.energy_sum(key.creators) - part.energy_sum(key.annihilators);
        double ad = std::abs(d);
        if (ad < report.smallest_denominator) {
            report.smallest_denominator = ad;
            report.smallest_denominator_term = term_str(key, 1.0);
        }
        if (ad < opts.denom_floor) {
            if (opts.level_shift <= 0.0)
                throw SingularityError("vanishing energy denominator |D|=" + std::to_string(ad) +
                                           " for amplitude " + term_str(key, 1.0) +
                                           " in domain " + to_string(opts.domain),
                                       term_str(key, 1.0), ad);
            // Shift away from zero. An exactly degenerate pair carries no
            // sign of its own, so orient by the key ordering: the adjoint
            // key then receives the opposite shift, keeping the update
            // anti-Hermitian.
            double s = (d > 0.0) ? 1.0 : (d < 0.0 ? -1.0 : (key.adjoint() < key ? 1.0 : -1.0));
            d += s * opts.level_shift;
        }
        return d;
    };

    std::deque<FermionOperator> trials, errors;
    double res0 = -1;

    for (int iter = 0;; ++iter) {
        FermionOperator g = bch_transform(h, b.op, opts.l, opts.bch_body_rank, opts.term_cap,
                                          opts.series_tol);
        FermionOperator r = project(g, opts.domain, part);
        if (opts.body_rank > 0) r = truncate_rank(r, opts.body_rank);
        double res = r.norm2();
        report.residual_history.push_back(res);
        report.final_residual = res;
        if (res <= opts.tol) {
            report.converged = true;
            break;
        }
        if (iter == opts.max_iter) break;
        if (res0 < 0) res0 = res;
        if (!std::isfinite(res) || res > 1e4 * std::max(res0, 1.0))
            throw DivergenceError("solver diverged at sweep " + std::to_string(iter) +
                                      ", residual " + std::to_string(res),
                                  res);

        FermionOperator step;
        for (const auto& [key, c] : r.terms()) step.add_term(key, c / denominator(key));
        step.prune();
        FermionOperator plain = b.op;
        plain += step;

        FermionOperator next;
        if (opts.acceleration) {
            trials.push_back(plain);
            errors.push_back(step);
            while (static_cast<int>(trials.size()) > opts.diis_window) {
                trials.pop_front();
                errors.pop_front();
            }
            next = diis_extrapolate(trials, errors);
        } else {
            next = plain;
        }

        b.op = antihermitize(project(next, opts.domain, part));
        report.iterations = iter + 1;

        // per-sweep structural invariants
        FermionOperator sym = b.op;
        sym += b.op.adjoint();
        if (sym.norm2() > 1e-12 * std::max(1.0, b.op.norm2()))
            throw StructureError("anti-Hermiticity drift in solver iteration");
        FermionOperator outside = b.op;
        outside -= project(b.op, opts.domain, part);
        if (!outside.empty())
            throw StructureError("generator escaped its domain during iteration");
    }

    report.amplitude_norm = b.op.norm2();
    if (!report.converged)
        throw DivergenceError("no convergence after " + std::to_string(report.iterations) +
                                  " sweeps, residual " + std::to_string(report.final_residual) +
                                  " > tol " + std::to_string(opts.tol),
                              report.final_residual);
    return {std::move(b), std::move(report)};
}

BuildGResult build_G(const FermionOperator& h, const GeneratorB& bstar,
                     const OrbitalPartition& part, std::size_t term_cap) {
    BuildGResult out;
    FermionOperator gfull =
        bch_transform(h, bstar.op, 0, 0, term_cap, 1e-12, &out.series_rank);
    FermionOperator discarded = project(gfull, bstar.domain, part);
    out.discarded_norm1 = discarded.norm1();
    out.discarded_norm2 = discarded.norm2();
    out.discarded_terms = discarded.size();
    out.g = std::move(gfull);
    out.g -= discarded;
    return out;
}

NoncommutationCheck check_noncommutation(const FermionOperator& h, const GeneratorB& bstar) {
    NoncommutationCheck c;
    c.applicable = !bstar.op.empty();
    c.threshold = 1e-8 * h.norm2() * bstar.op.norm2();
    if (c.applicable) {
        c.commutator_norm = commutator(bstar.op, h).norm2();
        c.nonzero = c.commutator_norm > c.threshold;
    }
    return c;
}

FermionOperator apply_auxiliary(const FermionOperator& h, const FermionOperator& c, int rank) {
    FermionOperator defect = c;
    defect += c.adjoint();
    if (defect.norm2() > 1e-12 * std::max(1.0, c.norm2()))
        throw ValidationError("auxiliary operator C is not anti-Hermitian");
    return bch_transform(h, c, rank);
}

H0Split split_h0_w(const FermionOperator& h, const std::vector<double>& epsilons) {
    H0Split out;
    out.epsilons = epsilons;
    for (std::size_t p = 1; p <= epsilons.size(); ++p)
        if (epsilons[p - 1] != 0.0)
            out.h0.add_term({bit_of(static_cast<int>(p)), bit_of(static_cast<int>(p))},
                            epsilons[p - 1]);
    out.w = h;
    out.w -= out.h0;
    return out;
}

std::vector<double> diagonal_epsilons(const FermionOperator& h, int n_spin_orbitals) {
    std::vector<double> eps(n_spin_orbitals, 0.0);
    for (int p = 1; p <= n_spin_orbitals; ++p) {
        cplx c = h.coefficient({bit_of(p), bit_of(p)});
        if (std::abs(c.imag()) > 1e-12 * std::max(1.0, std::abs(c)))
            throw ValidationError("complex one-body diagonal entry at spin-orbital " +
                                  std::to_string(p));
        eps[p - 1] = c.real();
    }
    return eps;
}

GeneratorB perturbative_B(const FermionOperator& h, const OrbitalPartition& part, int order,
                          Domain domain) {
    if (order < 0 || order > 2)
        throw ValidationError("perturbative order must be 0, 1, or 2, got " +
                              std::to_string(order));
    GeneratorB b{FermionOperator{}, domain, 0};
    if (order == 0) return b;

    H0Split split = split_h0_w(h, part.energies());
    auto invert = [&](const FermionOperator& src) {
        FermionOperator out;
        const FermionOperator projected = project(src, domain, part);
        for (const auto& [key, c] : projected.terms()) {
            double d = part.energy_sum(key.creators) - part.energy_sum(key.annihilators);
            if (std::abs(d) < 1e-8)
                throw SingularityError("vanishing denominator |D|=" + std::to_string(std::abs(d)) +
                                           " for perturbative amplitude " + term_str(key, c),
                                       term_str(key, c), std::abs(d));
            out.add_term(key, c / d);
        }
        out.prune();
        return out;
    };

    FermionOperator b1 = invert(split.w);
    if (order == 1) {
        b.op = std::move(b1);
        return b;
    }
    FermionOperator source = 0.5 * commutator(commutator(split.h0, b1), b1);
    source -= commutator(split.w, b1);
    b.op = invert(source);
    return b;
}

} // namespace swrrst
