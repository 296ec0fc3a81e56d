#pragma once

#include <array>
#include <map>
#include <string>

#include "swrrst/partition.hpp"
#include "swrrst/pauli.hpp"

namespace swrrst {

/// Jordan-Wigner encoding of a fermionic operator over n_qubits qubits
/// (qubit q represents spin-orbital position q):
///   a_p† -> ½(X_p - iY_p) ⊗ Z_{p-1} ⊗ ... ⊗ Z_1
///   a_p  -> ½(X_p + iY_p) ⊗ Z_{p-1} ⊗ ... ⊗ Z_1
/// The dense expansion of the result agrees entry-for-entry with the dense
/// matrix of the fermionic operator in the occupation-number basis.
PauliOperator jw_map(const FermionOperator& a, int n_qubits);

struct SupportInfo {
    int width = 0;          // span between lowest and highest non-I qubit
    int max_qubit = 0;      // highest non-I qubit (0 for the identity string)
    bool touches_external = false;
};

/// Support geometry of a single string relative to the partition layout
/// (active block first, external positions above it).
SupportInfo support_width(const PauliString& s, const OrbitalPartition& part);

/// Aggregate support statistics of a Pauli operator under a partition.
struct PauliCensus {
    int strings = 0;
    int max_qubit = 0;
    int max_width = 0;
    int touching_external = 0; // strings with any non-I letter on an external qubit
    int z_only = 0;            // strings built from I/Z letters only
    std::map<int, int> width_histogram;
};

PauliCensus pauli_census(const PauliOperator& p, const OrbitalPartition& part);

/// Sector-resolved qubit-locality analysis of a fermionic operator: the
/// operator is decomposed under the partition, each sector part is
/// JW-mapped, and the structural claims satisfied by a rank-reduced
/// transformed Hamiltonian are evaluated:
///   - internal strings act only on the first 2(n-k) qubits,
///   - external-diagonal strings consist of I/Z letters only,
///   - isoenergetic strings act on external qubits only within unbroken
///     adjacent pairs, flipping each pair's occupation parity evenly.
struct LocalityReport {
    std::array<PauliCensus, 4> census{}; // indexed by SectorLabel
    bool internal_active_only = true;
    bool diagonal_z_only = true;
    bool ie_pair_confined = true;

    const PauliCensus& sector(SectorLabel s) const {
        return census[static_cast<std::size_t>(s)];
    }
    std::string to_text() const;
};

LocalityReport locality_report(const FermionOperator& g, const OrbitalPartition& part);

} // namespace swrrst
