#include "swrrst/schedule.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "swrrst/errors.hpp"
#include "swrrst/fermion_operator.hpp"

namespace swrrst {

namespace {
/// highest set bit as a 1-based qubit index; 0 for the empty mask
int mask_top(std::uint64_t mask) { return mask == 0 ? 0 : 64 - std::countl_zero(mask); }
} // namespace

std::string RotationSchedule::to_text() const {
    std::string out;
    char buf[48];
    for (const RotationEntry& e : entries) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.angle);
        out += buf;
        out += "  z:";
        bool first = true;
        for (int q : indices_of(e.qubits)) {
            if (!first) out += ',';
            out += std::to_string(q);
            first = false;
        }
        out += '\n';
    }
    return out;
}

RotationSchedule RotationSchedule::from_text(const std::string& text) {
    RotationSchedule out;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto fail = [&](const std::string& what) {
            throw ValidationError("schedule text line " + std::to_string(line_no) + ": " + what);
        };
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        if (head[0] == '#') continue;
        double angle = 0.0;
        {
            std::istringstream hs(head);
            if (!(hs >> angle) || !hs.eof()) fail("cannot parse angle '" + head + "'");
        }
        std::string qubits;
        if (!(ls >> qubits) || qubits.rfind("z:", 0) != 0) fail("missing 'z:' qubit list");
        std::string trailing;
        if (ls >> trailing) fail("unexpected trailing content '" + trailing + "'");
        RotationEntry entry;
        entry.angle = angle;
        std::istringstream qs(qubits.substr(2));
        std::string tok;
        while (std::getline(qs, tok, ',')) {
            int q = 0;
            std::istringstream ts(tok);
            if (!(ts >> q) || !ts.eof() || q < 1 || q > static_cast<int>(kMaxSpinOrbitals))
                fail("invalid qubit index '" + tok + "'");
            if (entry.qubits & bit_of(q)) fail("repeated qubit index " + tok);
            entry.qubits |= bit_of(q);
        }
        out.entries.push_back(entry);
        out.n_qubits = std::max(out.n_qubits, mask_top(entry.qubits));
    }
    return out;
}

RotationSchedule schedule_number_exponential(const NumberPolynomial& f, double t, int n_qubits) {
    int needed = 0;
    for (const auto& [mask, coeff] : f.monomials())
        needed = std::max(needed, mask == 0 ? 0 : 64 - std::countl_zero(mask));
    if (n_qubits == 0) n_qubits = needed;
    if (needed > n_qubits)
        throw ValidationError("polynomial touches qubit " + std::to_string(needed) +
                              " beyond the requested " + std::to_string(n_qubits) + " qubits");

    // n_S = prod_{p in S} ½(1 - Z_p) = 2^{-|S|} sum_{T ⊆ S} (-1)^{|T|} Z_T,
    // so every index subset T accumulates one commuting angle.
    std::map<std::uint64_t, double> amplitude;
    for (const auto& [mask, coeff] : f.monomials()) {
        const double scale = std::ldexp(coeff, -std::popcount(mask));
        std::uint64_t sub = mask;
        while (true) {
            const double sign = (std::popcount(sub) % 2 == 0) ? 1.0 : -1.0;
            amplitude[sub] += sign * scale;
            if (sub == 0) break;
            sub = (sub - 1) & mask;
        }
    }

    RotationSchedule schedule;
    schedule.n_qubits = n_qubits;
    for (const auto& [mask, a] : amplitude) {
        const double angle = 2.0 * t * a;
        if (angle == 0.0) continue;
        schedule.entries.push_back({mask, angle});
    }
    return schedule;
}

Eigen::VectorXcd schedule_phases(const RotationSchedule& schedule, int dense_cap) {
    if (schedule.n_qubits < 0 || schedule.n_qubits > dense_cap)
        throw CapacityError("schedule over " + std::to_string(schedule.n_qubits) +
                            " qubits exceeds the dense cap of " + std::to_string(dense_cap));
    const std::size_t dim = std::size_t{1} << schedule.n_qubits;
    Eigen::VectorXcd diag = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(dim));
    for (const RotationEntry& e : schedule.entries) {
        if (mask_top(e.qubits) > schedule.n_qubits)
            throw ValidationError("schedule entry touches qubit " +
                                  std::to_string(mask_top(e.qubits)) + " beyond the register of " +
                                  std::to_string(schedule.n_qubits) + " qubits");
        const cplx minus = std::exp(cplx(0.0, -0.5 * e.angle));
        const cplx plus = std::exp(cplx(0.0, 0.5 * e.angle));
        for (std::uint64_t b = 0; b < dim; ++b)
            diag(static_cast<Eigen::Index>(b)) *=
                (std::popcount(b & e.qubits) % 2 == 0) ? minus : plus;
    }
    return diag;
}

DenseMatrix schedule_unitary(const RotationSchedule& schedule, int dense_cap) {
    return schedule_phases(schedule, dense_cap).asDiagonal();
}

} // namespace swrrst
