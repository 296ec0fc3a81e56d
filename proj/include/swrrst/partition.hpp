#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "swrrst/fermion_operator.hpp"

namespace swrrst {

enum class SectorLabel : int {
    internal = 0,
    external_diagonal = 1,
    external_isoenergetic = 2,
    external_energetically_distinct = 3,
};

std::string to_string(SectorLabel s);

/// Off-diagonal external domains the generator B can live on.
enum class Domain { eod, od };

std::string to_string(Domain d);

/// Active/external split of 2n spin-orbitals in the canonical ordering
/// ...[Q up][Q down]...: orbital Q occupies positions 2Q-1, 2Q; the first
/// 2(n-k) positions are active, the last 2k external.  The isoenergetic
/// pairing e(p) links positions 2Q-1 and 2Q when their energies agree to
/// iso_tol, and is derived from the energies so a deliberately
/// degeneracy-broken spectrum simply dissolves the affected pairs.
class OrbitalPartition {
  public:
    OrbitalPartition() = default;
    static OrbitalPartition make(int n, int k, std::vector<double> energies,
                                 double iso_tol_rel = 1e-9);

    int n() const { return n_; }
    int k() const { return k_; }
    int n_spin_orbitals() const { return 2 * n_; }
    int n_active() const { return 2 * (n_ - k_); }

    double energy(int p) const;
    const std::vector<double>& energies() const { return energies_; }

    bool is_active(int p) const;
    bool is_external(int p) const { return !is_active(p); }
    /// Isoenergetic partner, 0 when p is unpaired.
    int iso_partner(int p) const;
    /// Absolute tolerance of the energy-sum test.
    double iso_tol() const { return iso_tol_; }

    /// Spin-orbital positions whose pair energy split exceeds iso_tol
    /// (accidentally or deliberately broken pairs).
    const std::vector<int>& broken_pairs() const { return broken_pairs_; }

    std::uint64_t active_mask() const { return active_mask_; }
    std::uint64_t external_mask() const { return ~active_mask_ & full_mask_; }

    /// H0 of the partition energies: Σ ε_p n_p.
    FermionOperator h0_operator() const;

    double energy_sum(std::uint64_t mask) const;

  private:
    int n_ = 0;
    int k_ = 0;
    std::vector<double> energies_;
    std::vector<int> iso_map_; // 1-based partner, 0 = none
    std::vector<int> broken_pairs_;
    double iso_tol_ = 0;
    std::uint64_t active_mask_ = 0;
    std::uint64_t full_mask_ = 0;
};

SectorLabel classify_term(const TermKey& key, const OrbitalPartition& part);

bool in_domain(SectorLabel s, Domain d);

FermionOperator project(const FermionOperator& a, SectorLabel sector,
                        const OrbitalPartition& part);
FermionOperator project(const FermionOperator& a, Domain domain, const OrbitalPartition& part);

struct SectorCensus {
    std::size_t term_count = 0;
    double norm2 = 0;
};

struct Decomposition {
    std::array<FermionOperator, 4> parts; // indexed by SectorLabel
    std::array<SectorCensus, 4> census;

    const FermionOperator& part(SectorLabel s) const {
        return parts[static_cast<int>(s)];
    }
};

Decomposition decompose_hamiltonian(const FermionOperator& h, const OrbitalPartition& part);

/// f(n) = Σ_S coeff_S · Π_{p in S} n_p, S a set of spin-orbital positions.
/// Coefficients are real: the source is a diagonal (Hermitian) operator.
class NumberPolynomial {
  public:
    using MonomialMap = std::map<std::uint64_t, double>;

    void add(std::uint64_t mask, double coeff);
    const MonomialMap& monomials() const { return monomials_; }
    bool empty() const { return monomials_.empty(); }
    int max_degree() const;

    /// Value on the occupation-basis state with occupied set `occ`.
    double evaluate(std::uint64_t occ) const;

    FermionOperator expand() const;

    std::string to_text() const;

  private:
    MonomialMap monomials_;
};

/// Rewrites a diagonal operator Σ c·E^S_S as Σ c·Π n_p (the two agree with
/// sign +1 in the canonical ordering).  Non-diagonal or non-real terms are
/// structure errors naming the term.
NumberPolynomial to_number_polynomial(const FermionOperator& d, const OrbitalPartition& part);

} // namespace swrrst
