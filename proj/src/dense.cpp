#include "swrrst/dense.hpp"

#include <bit>
#include <string>

namespace swrrst {

bool apply_term_to_basis(const TermKey& key, std::uint64_t b, std::uint64_t& b_out, int& parity) {
    // The term acts as [creators asc][annihilators desc]; on a ket the
    // rightmost operator acts first, i.e. annihilators in ascending index
    // order, then creators in descending order.
    if ((b & key.annihilators) != key.annihilators) return false;
    int sign = 0;
    std::uint64_t cur = b;
    std::uint64_t am = key.annihilators;
    while (am) {
        std::uint64_t bit = am & (~am + 1);
        sign ^= std::popcount(cur & (bit - 1)) & 1;
        cur ^= bit;
        am ^= bit;
    }
    std::uint64_t cm = key.creators;
    while (cm) {
        int hi = 63 - std::countl_zero(cm);
        std::uint64_t bit = std::uint64_t{1} << hi;
        if (cur & bit) return false;
        sign ^= std::popcount(cur & (bit - 1)) & 1;
        cur |= bit;
        cm ^= bit;
    }
    b_out = cur;
    parity = sign;
    return true;
}

DenseOperator to_dense(const FermionOperator& op, int n_spin_orbitals, int cap) {
    if (n_spin_orbitals < 0 || n_spin_orbitals > cap)
        throw CapacityError("dense oracle limited to " + std::to_string(cap) +
                            " spin-orbitals, got " + std::to_string(n_spin_orbitals));
    if (op.max_index() > n_spin_orbitals)
        throw ValidationError("operator touches spin-orbital " +
                              std::to_string(op.max_index()) + " beyond N=" +
                              std::to_string(n_spin_orbitals));
    const std::uint64_t dim = std::uint64_t{1} << n_spin_orbitals;
    DenseOperator out;
    out.n_spin_orbitals = n_spin_orbitals;
    out.matrix = DenseMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& [key, c] : op.terms()) {
        for (std::uint64_t b = 0; b < dim; ++b) {
            std::uint64_t target;
            int parity;
            if (!apply_term_to_basis(key, b, target, parity)) continue;
            out.matrix(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(b)) +=
                parity ? -c : c;
        }
    }
    return out;
}

DenseVector apply_to_state(const FermionOperator& op, const DenseVector& state,
                           int n_spin_orbitals) {
    const std::uint64_t dim = std::uint64_t{1} << n_spin_orbitals;
    if (state.size() != static_cast<Eigen::Index>(dim))
        throw ValidationError("state dimension " + std::to_string(state.size()) +
                              " does not match 2^" + std::to_string(n_spin_orbitals));
    if (op.max_index() > n_spin_orbitals)
        throw ValidationError("operator touches spin-orbital " +
                              std::to_string(op.max_index()) + " beyond N=" +
                              std::to_string(n_spin_orbitals));
    DenseVector out = DenseVector::Zero(state.size());
    for (const auto& [key, c] : op.terms()) {
        for (std::uint64_t b = 0; b < dim; ++b) {
            cplx amp = state(static_cast<Eigen::Index>(b));
            if (amp == cplx{}) continue;
            std::uint64_t target;
            int parity;
            if (!apply_term_to_basis(key, b, target, parity)) continue;
            out(static_cast<Eigen::Index>(target)) += (parity ? -c : c) * amp;
        }
    }
    return out;
}

double hermiticity_defect(const DenseMatrix& m) {
    return (m - m.adjoint().eval()).cwiseAbs().maxCoeff();
}

DenseMatrix expm_antihermitian(const DenseMatrix& b) {
    DenseMatrix h = cplx(0, -1) * b;
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
    if (es.info() != Eigen::Success)
        throw StructureError("eigendecomposition failed in expm_antihermitian");
    DenseVector phases = (cplx(0, 1) * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

DenseMatrix expm_propagator(const DenseMatrix& h, double t) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
    if (es.info() != Eigen::Success)
        throw StructureError("eigendecomposition failed in expm_propagator");
    DenseVector phases = (cplx(0, -t) * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace swrrst
