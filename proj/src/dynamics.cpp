#include "swrrst/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "swrrst/errors.hpp"
#include "swrrst/jw.hpp"

namespace swrrst {

namespace {

void check_state(const FockStateVector& psi, int dense_cap) {
    if (psi.n_spin_orbitals < 1 || psi.n_spin_orbitals > dense_cap)
        throw CapacityError("statevector over " + std::to_string(psi.n_spin_orbitals) +
                            " spin-orbitals exceeds the dense cap of " + std::to_string(dense_cap));
    if (psi.dim() != (std::size_t{1} << psi.n_spin_orbitals))
        throw ValidationError("statevector length " + std::to_string(psi.dim()) +
                              " does not match 2^" + std::to_string(psi.n_spin_orbitals));
}

void require_hermitian_dense(const DenseMatrix& m, const std::string& what) {
    const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (defect > 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff()))
        throw ValidationError(what + " is not Hermitian (defect " + std::to_string(defect) + ")");
}

bool conserves_particle_number(const DenseMatrix& u) {
    for (Eigen::Index c = 0; c < u.cols(); ++c)
        for (Eigen::Index r = 0; r < u.rows(); ++r)
            if (std::abs(u(r, c)) > 1e-12 &&
                std::popcount(static_cast<std::uint64_t>(r)) !=
                    std::popcount(static_cast<std::uint64_t>(c)))
                return false;
    return true;
}

FockStateVector apply_matrix(const DenseMatrix& u, const FockStateVector& psi,
                             bool keeps_sector) {
    FockStateVector out = psi;
    out.amplitudes = u * psi.amplitudes;
    if (!keeps_sector) out.sector.reset();
    return out;
}

/// real diagonal of a Hermitian diagonal operator
Eigen::VectorXd real_diagonal(const FermionOperator& a, int n, int dense_cap,
                              const std::string& what) {
    const DenseMatrix m = to_dense(a, n, dense_cap).matrix;
    double off = 0.0;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (r != c) off = std::max(off, std::abs(m(r, c)));
    if (off > 1e-12)
        throw StructureError(what + " is not diagonal in the occupation basis (off-diagonal " +
                             std::to_string(off) + ")");
    const double imag = m.diagonal().imag().cwiseAbs().maxCoeff();
    if (imag > 1e-10)
        throw StructureError(what + " has a non-real diagonal (imaginary part " +
                             std::to_string(imag) + ")");
    return m.diagonal().real();
}

Eigen::VectorXcd phase_diagonal(const Eigen::VectorXd& energies, double t) {
    Eigen::VectorXcd out(energies.size());
    for (Eigen::Index i = 0; i < energies.size(); ++i)
        out(i) = std::exp(cplx(0.0, -t * energies(i)));
    return out;
}

/// X(r): ordered product of per-string exponentials exp(-i theta_i P_i)
/// over the internal part, theta_i = (t/r) * weight_i.
DenseMatrix internal_stepper(const GParts& parts, double theta_scale, int dense_cap) {
    const int n = parts.n_spin_orbitals;
    const PauliOperator mapped = jw_map(parts.internal, n);
    if (mapped.max_imag_weight() > 1e-10 * (1.0 + mapped.norm2()))
        throw StructureError("internal part is not Hermitian: complex Pauli weights");
    std::vector<std::pair<PauliString, double>> strings;
    strings.reserve(mapped.size());
    for (const auto& [s, w] : mapped.weights()) strings.emplace_back(s, w.real());
    std::sort(strings.begin(), strings.end(), [&](const auto& a, const auto& b) {
        const double wa = std::abs(a.second);
        const double wb = std::abs(b.second);
        if (wa != wb) return wa > wb;
        return a.first.letters(n) < b.first.letters(n);
    });
    const Eigen::Index dim = Eigen::Index{1} << n;
    DenseMatrix u = DenseMatrix::Identity(dim, dim);
    for (const auto& [s, w] : strings) {
        const double theta = theta_scale * w;
        const DenseMatrix pd = PauliOperator::single(s).to_dense(n, dense_cap);
        // P^2 = I, so exp(-i theta P) = cos(theta) I - i sin(theta) P
        u = u * (std::cos(theta) * DenseMatrix::Identity(dim, dim) -
                 cplx(0.0, std::sin(theta)) * pd);
    }
    return u;
}

DenseMatrix trotter_body(const GParts& parts, double t, int r, bool symmetrized, int dense_cap) {
    if (r < 2 || r % 2 != 0)
        throw ValidationError("Trotter step count must be even and at least 2, got " +
                              std::to_string(r));
    const int n = parts.n_spin_orbitals;
    const Eigen::VectorXd mixed = real_diagonal(parts.mixed, n, dense_cap, "mixed diagonal part");
    const DenseMatrix x = internal_stepper(parts, t / r, dense_cap);
    DenseMatrix step;
    int reps = 0;
    if (symmetrized) {
        step = x * DenseMatrix(phase_diagonal(mixed, 2.0 * t / r).asDiagonal()) * x;
        reps = r / 2;
    } else {
        step = x * DenseMatrix(phase_diagonal(mixed, t / r).asDiagonal());
        reps = r;
    }
    const Eigen::Index dim = Eigen::Index{1} << n;
    DenseMatrix u = DenseMatrix::Identity(dim, dim);
    for (int i = 0; i < reps; ++i) u = u * step;
    return u;
}

} // namespace

FockStateVector FockStateVector::basis_state(int n, std::uint64_t occupied) {
    if (n < 1 || n > static_cast<int>(kMaxSpinOrbitals))
        throw ValidationError("spin-orbital count " + std::to_string(n) + " outside 1..64");
    if (n > 30) throw CapacityError("statevector over " + std::to_string(n) + " spin-orbitals");
    if (occupied >> n)
        throw ValidationError("occupation mask touches spin-orbitals beyond " + std::to_string(n));
    FockStateVector out;
    out.n_spin_orbitals = n;
    out.amplitudes = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
    out.amplitudes(static_cast<Eigen::Index>(occupied)) = 1.0;
    out.sector = std::popcount(occupied);
    return out;
}

double FockStateVector::out_of_sector_weight() const {
    if (!sector) return 0.0;
    double acc = 0.0;
    for (Eigen::Index b = 0; b < amplitudes.size(); ++b)
        if (std::popcount(static_cast<std::uint64_t>(b)) != *sector)
            acc += std::norm(amplitudes(b));
    return std::sqrt(acc);
}

GParts split_G(const FermionOperator& g, const OrbitalPartition& part) {
    const FermionOperator offdiag = project(g, Domain::od, part);
    if (!offdiag.empty())
        throw StructureError("operator has an off-diagonal external part of norm " +
                             std::to_string(offdiag.norm2()) +
                             "; not of the diagonal-external form");
    GParts parts;
    parts.n_spin_orbitals = part.n_spin_orbitals();
    parts.internal = project(g, SectorLabel::internal, part);
    const FermionOperator diagonal = project(g, SectorLabel::external_diagonal, part);
    for (const auto& [key, coeff] : diagonal.terms()) {
        if (key.creators & part.active_mask())
            parts.mixed.add_term(key, coeff);
        else
            parts.external.add_term(key, coeff);
    }
    const FermionOperator c1 = commutator(parts.internal, parts.external);
    if (!c1.empty())
        throw StructureError("internal and external parts fail to commute (norm " +
                             std::to_string(c1.norm2()) + ")");
    const FermionOperator c2 = commutator(parts.mixed, parts.external);
    if (!c2.empty())
        throw StructureError("mixed and external parts fail to commute (norm " +
                             std::to_string(c2.norm2()) + ")");
    return parts;
}

FockStateVector exact_evolve(const FermionOperator& a, double t, const FockStateVector& psi,
                             int dense_cap) {
    check_state(psi, dense_cap);
    const DenseMatrix h = to_dense(a, psi.n_spin_orbitals, dense_cap).matrix;
    require_hermitian_dense(h, "evolution generator");
    return apply_matrix(expm_propagator(h, t), psi, a.is_particle_conserving());
}

FockStateVector exact_evolve(const PauliOperator& a, double t, const FockStateVector& psi,
                             int dense_cap) {
    check_state(psi, dense_cap);
    const DenseMatrix h = a.to_dense(psi.n_spin_orbitals, dense_cap);
    require_hermitian_dense(h, "evolution generator");
    const DenseMatrix u = expm_propagator(h, t);
    return apply_matrix(u, psi, !psi.sector || conserves_particle_number(u));
}

DenseMatrix trotter_unitary(const GParts& parts, double t, int r, bool symmetrized,
                            int dense_cap) {
    const int n = parts.n_spin_orbitals;
    const Eigen::VectorXd external =
        real_diagonal(parts.external, n, dense_cap, "external diagonal part");
    return trotter_body(parts, t, r, symmetrized, dense_cap) *
           DenseMatrix(phase_diagonal(external, t).asDiagonal());
}

FockStateVector trotter_evolve(const GParts& parts, double t, int r, const FockStateVector& psi,
                               bool symmetrized, int dense_cap) {
    check_state(psi, dense_cap);
    if (psi.n_spin_orbitals != parts.n_spin_orbitals)
        throw ValidationError("statevector register does not match the operator partition");
    const bool conserving = parts.internal.is_particle_conserving() &&
                            parts.mixed.is_particle_conserving() &&
                            parts.external.is_particle_conserving();
    return apply_matrix(trotter_unitary(parts, t, r, symmetrized, dense_cap), psi, conserving);
}

DenseMatrix power_unitary(const FermionOperator& b, const GParts& parts, double t, int r, int j,
                          int dense_cap) {
    if (j < 0 || j > 20)
        throw ValidationError("power exponent j=" + std::to_string(j) + " outside 0..20");
    const int n = parts.n_spin_orbitals;
    FermionOperator minus_b = b;
    minus_b *= -1.0;
    if (!approx_equal(b.adjoint(), minus_b, 1e-10 * std::max(1.0, b.norm2())))
        throw ValidationError("generator of the dressing transformation is not anti-Hermitian");
    const DenseMatrix eb = expm_antihermitian(to_dense(b, n, dense_cap).matrix);
    DenseMatrix body = trotter_body(parts, t, r, true, dense_cap);
    for (int step = 0; step < j; ++step) body = body * body;
    const Eigen::VectorXd external =
        real_diagonal(parts.external, n, dense_cap, "external diagonal part");
    const double scaled_t = std::ldexp(t, j);
    return eb.adjoint() * body * DenseMatrix(phase_diagonal(external, scaled_t).asDiagonal()) * eb;
}

FockStateVector power_evolution(const FermionOperator& b, const GParts& parts, double t, int r,
                                int j, const FockStateVector& psi, int dense_cap) {
    check_state(psi, dense_cap);
    if (psi.n_spin_orbitals != parts.n_spin_orbitals)
        throw ValidationError("statevector register does not match the operator partition");
    const bool conserving = b.is_particle_conserving() &&
                            parts.internal.is_particle_conserving() &&
                            parts.mixed.is_particle_conserving() &&
                            parts.external.is_particle_conserving();
    return apply_matrix(power_unitary(b, parts, t, r, j, dense_cap), psi, conserving);
}

FockStateVector sector_prepare(int n_e, const OrbitalPartition& part) {
    const int n = part.n_spin_orbitals();
    if (n_e < 0 || n_e > n)
        throw ValidationError("particle number " + std::to_string(n_e) +
                              " outside the 0.." + std::to_string(n) + " sector range");
    if (n > 30) throw CapacityError("statevector over " + std::to_string(n) + " spin-orbitals");
    std::uint64_t best = 0;
    double best_energy = 0.0;
    bool found = false;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        if (std::popcount(mask) != n_e) continue;
        const double e = part.energy_sum(mask);
        if (!found || e < best_energy) {
            found = true;
            best = mask;
            best_energy = e;
        }
    }
    return FockStateVector::basis_state(n, best);
}

FockStateVector sector_prepare(int n_e, int n_spin_orbitals,
                               const std::vector<std::pair<std::uint64_t, cplx>>& amplitudes) {
    if (amplitudes.empty()) throw ValidationError("empty sector preparation");
    if (n_spin_orbitals < 1 || n_spin_orbitals > 30)
        throw CapacityError("statevector over " + std::to_string(n_spin_orbitals) +
                            " spin-orbitals");
    FockStateVector out;
    out.n_spin_orbitals = n_spin_orbitals;
    out.amplitudes = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_spin_orbitals);
    for (const auto& [mask, amp] : amplitudes) {
        if (mask >> n_spin_orbitals)
            throw ValidationError("occupation mask touches spin-orbitals beyond " +
                                  std::to_string(n_spin_orbitals));
        if (std::popcount(mask) != n_e)
            throw ValidationError("occupation mask with " + std::to_string(std::popcount(mask)) +
                                  " particles in an n_e=" + std::to_string(n_e) + " preparation");
        out.amplitudes(static_cast<Eigen::Index>(mask)) += amp;
    }
    const double norm = out.amplitudes.norm();
    if (norm == 0.0) throw ValidationError("sector preparation has zero norm");
    out.amplitudes /= norm;
    out.sector = n_e;
    return out;
}

} // namespace swrrst
