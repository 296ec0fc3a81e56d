#include "swrrst/jw.hpp"

#include <algorithm>
#include <sstream>

#include "swrrst/errors.hpp"

namespace swrrst {

namespace {

/// Encoding of a single ladder operator: ½(X ∓ iY) on the qubit, Z-chain on
/// all lower qubits.
PauliOperator jw_ladder(int p, bool dagger) {
    const std::uint64_t bit = bit_of(p);
    const std::uint64_t chain = bit - 1;
    PauliOperator out;
    out.add_string({bit, chain}, 0.5);
    out.add_string({bit, chain | bit}, dagger ? cplx(0.0, -0.5) : cplx(0.0, 0.5));
    return out;
}

} // namespace

PauliOperator jw_map(const FermionOperator& a, int n_qubits) {
    if (n_qubits < 0 || n_qubits > static_cast<int>(kMaxSpinOrbitals))
        throw ValidationError("qubit count " + std::to_string(n_qubits) +
                              " outside the supported range [0, 64]");
    if (a.max_index() > n_qubits)
        throw ValidationError("operator touches spin-orbital " + std::to_string(a.max_index()) +
                              " beyond the requested " + std::to_string(n_qubits) + " qubits");
    PauliOperator out;
    for (const auto& [key, coeff] : a.terms()) {
        PauliOperator acc = PauliOperator::identity(coeff);
        for (int p : indices_of(key.creators)) acc *= jw_ladder(p, true);
        const auto ann = indices_of(key.annihilators);
        for (auto it = ann.rbegin(); it != ann.rend(); ++it) acc *= jw_ladder(*it, false);
        out += acc;
    }
    out.prune();
    return out;
}

SupportInfo support_width(const PauliString& s, const OrbitalPartition& part) {
    SupportInfo info;
    info.max_qubit = s.max_qubit();
    info.width = s.is_identity() ? 0 : info.max_qubit - s.min_qubit() + 1;
    info.touches_external = (s.support() & part.external_mask()) != 0;
    return info;
}

PauliCensus pauli_census(const PauliOperator& p, const OrbitalPartition& part) {
    PauliCensus census;
    for (const auto& [s, w] : p.weights()) {
        const SupportInfo info = support_width(s, part);
        ++census.strings;
        census.max_qubit = std::max(census.max_qubit, info.max_qubit);
        census.max_width = std::max(census.max_width, info.width);
        ++census.width_histogram[info.width];
        if (info.touches_external) ++census.touching_external;
        if (s.z_only()) ++census.z_only;
    }
    return census;
}

LocalityReport locality_report(const FermionOperator& g, const OrbitalPartition& part) {
    const int n_qubits = part.n_spin_orbitals();
    const Decomposition dec = decompose_hamiltonian(g, part);
    LocalityReport report;

    const PauliOperator internal = jw_map(dec.part(SectorLabel::internal), n_qubits);
    report.census[0] = pauli_census(internal, part);
    report.internal_active_only = report.census[0].max_qubit <= part.n_active();

    const PauliOperator diagonal = jw_map(dec.part(SectorLabel::external_diagonal), n_qubits);
    report.census[1] = pauli_census(diagonal, part);
    report.diagonal_z_only = report.census[1].z_only == report.census[1].strings;

    const PauliOperator iso = jw_map(dec.part(SectorLabel::external_isoenergetic), n_qubits);
    report.census[2] = pauli_census(iso, part);
    for (const auto& [s, w] : iso.weights()) {
        // every externally supported qubit must belong to an unbroken
        // adjacent pair, and the string may not change any pair's occupation
        // parity (an odd number of X/Y letters on a pair is a transfer out
        // of it)
        for (int q : indices_of(s.support() & part.external_mask()))
            if (part.iso_partner(q) == 0) report.ie_pair_confined = false;
        for (int q = part.n_active() + 1; q + 1 <= part.n_spin_orbitals(); q += 2) {
            if (part.iso_partner(q) != q + 1) continue;
            const std::uint64_t pair = bit_of(q) | bit_of(q + 1);
            if (std::popcount(s.x & pair) % 2 != 0) report.ie_pair_confined = false;
        }
    }

    const PauliOperator eod = jw_map(dec.part(SectorLabel::external_energetically_distinct), n_qubits);
    report.census[3] = pauli_census(eod, part);
    return report;
}

std::string LocalityReport::to_text() const {
    static const char* names[4] = {"internal", "external_diagonal", "external_isoenergetic",
                                   "external_energetically_distinct"};
    std::ostringstream out;
    for (std::size_t i = 0; i < 4; ++i) {
        const PauliCensus& c = census[i];
        out << names[i] << ": strings=" << c.strings << " max_qubit=" << c.max_qubit
            << " max_width=" << c.max_width << " touching_external=" << c.touching_external
            << " z_only=" << c.z_only << " widths={";
        bool first = true;
        for (const auto& [w, n] : c.width_histogram) {
            if (!first) out << ",";
            out << w << ":" << n;
            first = false;
        }
        out << "}\n";
    }
    out << "internal_active_only=" << (internal_active_only ? "true" : "false") << "\n";
    out << "diagonal_z_only=" << (diagonal_z_only ? "true" : "false") << "\n";
    out << "ie_pair_confined=" << (ie_pair_confined ? "true" : "false") << "\n";
    return out.str();
}

} // namespace swrrst
