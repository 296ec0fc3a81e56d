#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swrrst/dense.hpp"
#include "swrrst/partition.hpp"

namespace swrrst {

/// One commuting rotation: the unitary exp(-i*(angle/2) * Z_S) where Z_S is
/// the product of Pauli Z over the qubits in `qubits`.  The empty set is a
/// global phase exp(-i*angle/2).  On hardware a |S| >= 2 entry is realized
/// by a CX parity ladder onto one qubit, Rz(angle) there, and the inverse
/// ladder; this simulator keeps the entries at the rotation level.
struct RotationEntry {
    std::uint64_t qubits = 0;
    double angle = 0.0;
};

/// Ordered list of commuting Z-rotations realizing the exponential of a
/// number polynomial; the composed unitary is diagonal in the computational
/// basis.
struct RotationSchedule {
    int n_qubits = 0;
    std::vector<RotationEntry> entries;

    bool empty() const { return entries.empty(); }

    /// one entry per line: "angle  z:<qubits>" (17 significant digits)
    std::string to_text() const;
    static RotationSchedule from_text(const std::string& text);
};

/// Exact schedule for exp(-i*t*f): each number monomial expands through
/// n_p = ½(1 - Z_p) into Z-products; like Z-products accumulate a single
/// angle, so the schedule length is at most the number of distinct index
/// subsets and every entry commutes with every other.  Passing n_qubits = 0
/// sizes the register to the highest index appearing in f.
RotationSchedule schedule_number_exponential(const NumberPolynomial& f, double t,
                                             int n_qubits = 0);

/// Diagonal of the composed unitary (length 2^n_qubits).
Eigen::VectorXcd schedule_phases(const RotationSchedule& schedule,
                                 int dense_cap = limits::kDenseOracleCap);

/// Composed unitary as a dense matrix (diagonal).
DenseMatrix schedule_unitary(const RotationSchedule& schedule,
                             int dense_cap = limits::kDenseOracleCap);

} // namespace swrrst
