#include "swrrst/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace swrrst {

std::string to_string(SectorLabel s) {
    switch (s) {
        case SectorLabel::internal: return "internal";
        case SectorLabel::external_diagonal: return "external_diagonal";
        case SectorLabel::external_isoenergetic: return "external_isoenergetic";
        case SectorLabel::external_energetically_distinct:
            return "external_energetically_distinct";
    }
    return "?";
}

std::string to_string(Domain d) { return d == Domain::eod ? "eod" : "od"; }

OrbitalPartition OrbitalPartition::make(int n, int k, std::vector<double> energies,
                                        double iso_tol_rel) {
    if (n < 1) throw ValidationError("partition needs n >= 1, got " + std::to_string(n));
    if (k < 0 || k > n)
        throw ValidationError("external orbital count k=" + std::to_string(k) +
                              " outside 0..n=" + std::to_string(n));
    if (2 * n > kMaxSpinOrbitals)
        throw CapacityError("partition with " + std::to_string(2 * n) +
                            " spin-orbitals exceeds limit " + std::to_string(kMaxSpinOrbitals));
    if (static_cast<int>(energies.size()) != 2 * n)
        throw ValidationError("expected " + std::to_string(2 * n) + " spin-orbital energies, got " +
                              std::to_string(energies.size()));
    OrbitalPartition p;
    p.n_ = n;
    p.k_ = k;
    p.energies_ = std::move(energies);
    double max_abs = 0;
    for (double e : p.energies_) max_abs = std::max(max_abs, std::abs(e));
    p.iso_tol_ = iso_tol_rel * std::max(max_abs, 1.0);
    p.iso_map_.assign(2 * n + 1, 0);
    for (int q = 1; q <= n; ++q) {
        int up = 2 * q - 1, dn = 2 * q;
        if (std::abs(p.energies_[up - 1] - p.energies_[dn - 1]) <= p.iso_tol_) {
            p.iso_map_[up] = dn;
            p.iso_map_[dn] = up;
        } else {
            p.broken_pairs_.push_back(up);
            p.broken_pairs_.push_back(dn);
        }
    }
    for (int i = 1; i <= 2 * (n - k); ++i) p.active_mask_ |= bit_of(i);
    p.full_mask_ = (2 * n == 64) ? ~std::uint64_t{0} : (bit_of(2 * n + 1) - 1);
    return p;
}

double OrbitalPartition::energy(int p) const {
    if (p < 1 || p > 2 * n_)
        throw ValidationError("spin-orbital " + std::to_string(p) + " outside partition 1.." +
                              std::to_string(2 * n_));
    return energies_[p - 1];
}

bool OrbitalPartition::is_active(int p) const {
    if (p < 1 || p > 2 * n_)
        throw ValidationError("spin-orbital " + std::to_string(p) + " outside partition 1.." +
                              std::to_string(2 * n_));
    return p <= 2 * (n_ - k_);
}

int OrbitalPartition::iso_partner(int p) const {
    if (p < 1 || p > 2 * n_)
        throw ValidationError("spin-orbital " + std::to_string(p) + " outside partition 1.." +
                              std::to_string(2 * n_));
    return iso_map_[p];
}

FermionOperator OrbitalPartition::h0_operator() const {
    FermionOperator h0;
    for (int p = 1; p <= 2 * n_; ++p)
        if (energies_[p - 1] != 0.0) h0.add_term({bit_of(p), bit_of(p)}, energies_[p - 1]);
    return h0;
}

double OrbitalPartition::energy_sum(std::uint64_t mask) const {
    double s = 0;
    for (int p : indices_of(mask)) s += energy(p);
    return s;
}

SectorLabel classify_term(const TermKey& key, const OrbitalPartition& part) {
    std::uint64_t touched = key.creators | key.annihilators;
    if (touched & ~part.active_mask() & ~part.external_mask())
        throw ValidationError("term " + term_str(key, 1.0) + " touches spin-orbitals outside 1.." +
                              std::to_string(part.n_spin_orbitals()));
    if ((touched & part.external_mask()) == 0) return SectorLabel::internal;
    if (key.is_diagonal()) return SectorLabel::external_diagonal;
    double gap = part.energy_sum(key.creators) - part.energy_sum(key.annihilators);
    return std::abs(gap) <= part.iso_tol() ? SectorLabel::external_isoenergetic
                                           : SectorLabel::external_energetically_distinct;
}

bool in_domain(SectorLabel s, Domain d) {
    if (s == SectorLabel::external_energetically_distinct) return true;
    return d == Domain::od && s == SectorLabel::external_isoenergetic;
}

FermionOperator project(const FermionOperator& a, SectorLabel sector,
                        const OrbitalPartition& part) {
    FermionOperator out;
    for (const auto& [key, c] : a.terms())
        if (classify_term(key, part) == sector) out.add_term(key, c);
    return out;
}

FermionOperator project(const FermionOperator& a, Domain domain, const OrbitalPartition& part) {
    FermionOperator out;
    for (const auto& [key, c] : a.terms())
        if (in_domain(classify_term(key, part), domain)) out.add_term(key, c);
    return out;
}

Decomposition decompose_hamiltonian(const FermionOperator& h, const OrbitalPartition& part) {
    Decomposition d;
    for (const auto& [key, c] : h.terms())
        d.parts[static_cast<int>(classify_term(key, part))].add_term(key, c);
    for (int s = 0; s < 4; ++s) {
        d.census[s].term_count = d.parts[s].size();
        d.census[s].norm2 = d.parts[s].norm2();
    }
    return d;
}

void NumberPolynomial::add(std::uint64_t mask, double coeff) {
    double& slot = monomials_[mask];
    slot += coeff;
    if (std::abs(slot) < limits::kPruneThreshold) monomials_.erase(mask);
}

int NumberPolynomial::max_degree() const {
    int d = 0;
    for (const auto& [mask, c] : monomials_) d = std::max(d, std::popcount(mask));
    return d;
}

double NumberPolynomial::evaluate(std::uint64_t occ) const {
    double v = 0;
    for (const auto& [mask, c] : monomials_)
        if ((occ & mask) == mask) v += c;
    return v;
}

FermionOperator NumberPolynomial::expand() const {
    FermionOperator out;
    for (const auto& [mask, c] : monomials_) out.add_term({mask, mask}, c);
    out.prune();
    return out;
}

std::string NumberPolynomial::to_text() const {
    std::string out;
    for (const auto& [mask, c] : monomials_) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", c);
        out += buf;
        out += "  n:";
        bool first = true;
        for (int p : indices_of(mask)) {
            if (!first) out += ',';
            out += std::to_string(p);
            first = false;
        }
        out += '\n';
    }
    return out;
}

NumberPolynomial to_number_polynomial(const FermionOperator& d, const OrbitalPartition& part) {
    NumberPolynomial out;
    for (const auto& [key, c] : d.terms()) {
        if (!key.is_diagonal())
            throw StructureError("non-diagonal term in number-polynomial conversion: " +
                                 term_str(key, c));
        if (key.max_index() > part.n_spin_orbitals())
            throw ValidationError("term " + term_str(key, c) + " outside partition");
        if (std::abs(c.imag()) > 1e-12 * std::max(1.0, std::abs(c)))
            throw StructureError("non-real diagonal coefficient in " + term_str(key, c));
        // E^S_S equals the product of number operators over S with sign +1:
        // creators descending against annihilators ascending pair up without
        // crossing any like-species operator.
        out.add(key.creators, c.real());
    }
    return out;
}

} // namespace swrrst
