#include "swrrst/pauli.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "swrrst/errors.hpp"

namespace swrrst {

namespace {

std::string format_weight(cplx w) {
    char buf[64];
    if (w.imag() == 0.0) {
        std::snprintf(buf, sizeof(buf), "%.17g", w.real());
        return buf;
    }
    std::snprintf(buf, sizeof(buf), "(%.17g,%.17g)", w.real(), w.imag());
    return buf;
}

constexpr cplx kPhase[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};

} // namespace

int PauliString::max_qubit() const {
    std::uint64_t s = support();
    return s == 0 ? 0 : 64 - std::countl_zero(s);
}

int PauliString::min_qubit() const {
    std::uint64_t s = support();
    return s == 0 ? 0 : 1 + std::countr_zero(s);
}

char PauliString::letter(int q) const {
    const std::uint64_t bit = std::uint64_t{1} << (q - 1);
    const bool bx = (x & bit) != 0;
    const bool bz = (z & bit) != 0;
    if (bx && bz) return 'Y';
    if (bx) return 'X';
    if (bz) return 'Z';
    return 'I';
}

std::string PauliString::letters(int n_qubits) const {
    std::string out(static_cast<std::size_t>(n_qubits), 'I');
    for (int q = 1; q <= n_qubits; ++q) out[static_cast<std::size_t>(n_qubits - q)] = letter(q);
    return out;
}

int pauli_product_phase(const PauliString& a, const PauliString& b) {
    const int ca = std::popcount(a.x & a.z);
    const int cb = std::popcount(b.x & b.z);
    const int cc = std::popcount((a.x ^ b.x) & (a.z ^ b.z));
    const int swaps = std::popcount(a.z & b.x);
    int e = (ca + cb - cc + 2 * swaps) % 4;
    return (e + 4) % 4;
}

PauliOperator PauliOperator::identity(cplx weight) { return single({0, 0}, weight); }

PauliOperator PauliOperator::single(const PauliString& s, cplx weight) {
    PauliOperator p;
    p.add_string(s, weight);
    return p;
}

void PauliOperator::add_string(const PauliString& s, cplx w) {
    auto [it, inserted] = weights_.try_emplace(s, w);
    if (!inserted) {
        it->second += w;
        if (std::abs(it->second) == 0.0) weights_.erase(it);
    }
}

PauliOperator& PauliOperator::operator+=(const PauliOperator& o) {
    for (const auto& [s, w] : o.weights_) add_string(s, w);
    prune();
    return *this;
}

PauliOperator& PauliOperator::operator-=(const PauliOperator& o) {
    for (const auto& [s, w] : o.weights_) add_string(s, -w);
    prune();
    return *this;
}

PauliOperator& PauliOperator::operator*=(cplx scale) {
    if (scale == cplx(0.0)) {
        weights_.clear();
        return *this;
    }
    for (auto& [s, w] : weights_) w *= scale;
    return *this;
}

PauliOperator operator*(const PauliOperator& a, const PauliOperator& b) {
    PauliOperator out;
    for (const auto& [sa, wa] : a.weights()) {
        for (const auto& [sb, wb] : b.weights()) {
            PauliString sc{sa.x ^ sb.x, sa.z ^ sb.z};
            out.add_string(sc, wa * wb * kPhase[pauli_product_phase(sa, sb)]);
        }
    }
    out.prune();
    return out;
}

PauliOperator& PauliOperator::operator*=(const PauliOperator& o) {
    *this = *this * o;
    return *this;
}

cplx PauliOperator::weight(const PauliString& s) const {
    auto it = weights_.find(s);
    return it == weights_.end() ? cplx(0.0) : it->second;
}

PauliOperator PauliOperator::adjoint() const {
    PauliOperator out;
    for (const auto& [s, w] : weights_) out.weights_.emplace(s, std::conj(w));
    return out;
}

double PauliOperator::norm2() const {
    double acc = 0.0;
    for (const auto& [s, w] : weights_) acc += std::norm(w);
    return std::sqrt(acc);
}

double PauliOperator::max_imag_weight() const {
    double m = 0.0;
    for (const auto& [s, w] : weights_) m = std::max(m, std::abs(w.imag()));
    return m;
}

int PauliOperator::max_qubit() const {
    int m = 0;
    for (const auto& [s, w] : weights_) m = std::max(m, s.max_qubit());
    return m;
}

void PauliOperator::prune(double threshold) {
    for (auto it = weights_.begin(); it != weights_.end();) {
        if (std::abs(it->second) < threshold)
            it = weights_.erase(it);
        else
            ++it;
    }
}

DenseMatrix PauliOperator::to_dense(int n_qubits, int dense_cap) const {
    if (n_qubits < 1) throw ValidationError("to_dense requires at least one qubit");
    if (n_qubits > dense_cap)
        throw CapacityError("dense Pauli expansion over " + std::to_string(n_qubits) +
                            " qubits exceeds the cap of " + std::to_string(dense_cap));
    if (max_qubit() > n_qubits)
        throw ValidationError("Pauli operator touches qubit " + std::to_string(max_qubit()) +
                              " beyond the requested " + std::to_string(n_qubits) + " qubits");
    const std::size_t dim = std::size_t{1} << n_qubits;
    DenseMatrix m = DenseMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& [s, w] : weights_) {
        const cplx head = w * kPhase[std::popcount(s.x & s.z) % 4];
        for (std::uint64_t col = 0; col < dim; ++col) {
            const std::uint64_t row = col ^ s.x;
            const double sign = (std::popcount(s.z & col) % 2 == 0) ? 1.0 : -1.0;
            m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += head * sign;
        }
    }
    return m;
}

std::string PauliOperator::to_text(int n_qubits) const {
    if (max_qubit() > n_qubits)
        throw ValidationError("Pauli operator touches qubit " + std::to_string(max_qubit()) +
                              " beyond the requested " + std::to_string(n_qubits) + " qubits");
    std::string out;
    for (const auto& [s, w] : weights_) {
        out += format_weight(w);
        out += "  ";
        out += s.letters(n_qubits);
        out += '\n';
    }
    return out;
}

PauliOperator PauliOperator::from_text(const std::string& text) {
    PauliOperator out;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    int n_qubits = -1;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto fail = [&](const std::string& what) {
            throw ValidationError("Pauli text line " + std::to_string(line_no) + ": " + what);
        };
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        cplx w;
        if (!(ls >> w)) fail("cannot parse weight");
        std::string letters;
        if (!(ls >> letters)) fail("missing Pauli letters");
        std::string trailing;
        if (ls >> trailing) fail("unexpected trailing content '" + trailing + "'");
        if (n_qubits < 0)
            n_qubits = static_cast<int>(letters.size());
        else if (static_cast<int>(letters.size()) != n_qubits)
            fail("inconsistent string length " + std::to_string(letters.size()) + " (expected " +
                 std::to_string(n_qubits) + ")");
        if (n_qubits > 64) fail("more than 64 qubits");
        PauliString s;
        for (int i = 0; i < n_qubits; ++i) {
            const int q = n_qubits - i; // leftmost letter is the highest qubit
            const std::uint64_t bit = std::uint64_t{1} << (q - 1);
            switch (letters[static_cast<std::size_t>(i)]) {
            case 'I': break;
            case 'X': s.x |= bit; break;
            case 'Y': s.x |= bit; s.z |= bit; break;
            case 'Z': s.z |= bit; break;
            default: fail(std::string("invalid Pauli letter '") + letters[static_cast<std::size_t>(i)] + "'");
            }
        }
        out.add_string(s, w);
    }
    return out;
}

} // namespace swrrst
