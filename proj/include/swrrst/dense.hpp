#pragma once

#include <Eigen/Dense>

#include "swrrst/fermion_operator.hpp"

namespace swrrst {

using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

/// Dense image of an operator in the occupation-number basis.  Basis states
/// are integers with bit i giving the occupation of spin-orbital i+1
/// (little-endian), so the Jordan-Wigner parity of a_p on |b> is
/// (-1)^{#occupied below p}.
struct DenseOperator {
    int n_spin_orbitals = 0;
    DenseMatrix matrix;

    Eigen::Index dim() const { return matrix.rows(); }
};

DenseOperator to_dense(const FermionOperator& op, int n_spin_orbitals,
                       int cap = limits::kDenseOracleCap);

/// Applies the operator to a dense state without materializing the matrix.
DenseVector apply_to_state(const FermionOperator& op, const DenseVector& state,
                           int n_spin_orbitals);

/// Amplitude-and-target action of a single canonical term on basis state b;
/// returns false when the term annihilates the state.
bool apply_term_to_basis(const TermKey& key, std::uint64_t b, std::uint64_t& b_out, int& parity);

double hermiticity_defect(const DenseMatrix& m);

/// e^{B} for anti-Hermitian B via the spectral decomposition of -iB.
DenseMatrix expm_antihermitian(const DenseMatrix& b);

/// e^{-i t H} for Hermitian H.
DenseMatrix expm_propagator(const DenseMatrix& h, double t);

} // namespace swrrst
