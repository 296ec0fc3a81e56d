#pragma once

#include <optional>

#include "swrrst/dense.hpp"
#include "swrrst/partition.hpp"
#include "swrrst/pauli.hpp"

namespace swrrst {

/// Dense statevector over the occupation-number basis of n spin-orbitals
/// (bit p-1 of the basis index is the occupation of spin-orbital p).  The
/// optional sector tag records that the state lives in a fixed
/// particle-number sector; evolution under particle-conserving operators
/// keeps the tag.
struct FockStateVector {
    int n_spin_orbitals = 0;
    Eigen::VectorXcd amplitudes;
    std::optional<int> sector;

    static FockStateVector basis_state(int n, std::uint64_t occupied);

    std::size_t dim() const { return static_cast<std::size_t>(amplitudes.size()); }
    double norm() const { return amplitudes.norm(); }
    /// weight outside the tagged particle-number sector (0 when untagged)
    double out_of_sector_weight() const;
};

/// The three mutually commuting-by-construction pieces of a transformed
/// Hamiltonian whose external part is diagonal: the internal part (active
/// indices only), the diagonal part mixing active and external number
/// operators, and the diagonal part on external number operators only.
struct GParts {
    FermionOperator internal;
    FermionOperator mixed;
    FermionOperator external;
    int n_spin_orbitals = 0;
};

/// Splits G under the partition and verifies the split symbolically:
/// the off-diagonal external sector must be empty and both
/// [internal, external] and [mixed, external] must vanish identically.
GParts split_G(const FermionOperator& g, const OrbitalPartition& part);

/// psi -> exp(-i t A) psi through the dense matrix of A.
FockStateVector exact_evolve(const FermionOperator& a, double t, const FockStateVector& psi,
                             int dense_cap = limits::kDenseOracleCap);
FockStateVector exact_evolve(const PauliOperator& a, double t, const FockStateVector& psi,
                             int dense_cap = limits::kDenseOracleCap);

/// Dense unitary of one Trotterized evolution exp(-i t G) with the exact
/// external factor:
///   symmetrized (default): (X(r) · exp(-i(2t/r) M) · X(r))^{r/2} · E(t)
///   plain:                 (X(r) · exp(-i(t/r) M))^{r} · E(t)
/// where X(r) is the ordered product of per-string exponentials of the
/// internal part (strings ordered by descending |weight|, ties broken by
/// lexicographic letters), M is the mixed diagonal part (exponentiated in
/// one shot: all its strings are Z-only and commute) and E(t) is the exact
/// diagonal external factor.  r must be even and at least 2.
DenseMatrix trotter_unitary(const GParts& parts, double t, int r, bool symmetrized = true,
                            int dense_cap = limits::kDenseOracleCap);

FockStateVector trotter_evolve(const GParts& parts, double t, int r, const FockStateVector& psi,
                               bool symmetrized = true, int dense_cap = limits::kDenseOracleCap);

/// Dense unitary approximating Omega(t)^{2^j} = e^{-B} (e^{-itG})^{2^j} e^{B}:
/// the Trotter body is raised to the 2^j-th power while the external factor
/// is raised exactly by scaling its angles t -> 2^j t.
DenseMatrix power_unitary(const FermionOperator& b, const GParts& parts, double t, int r, int j,
                          int dense_cap = limits::kDenseOracleCap);

FockStateVector power_evolution(const FermionOperator& b, const GParts& parts, double t, int r,
                                int j, const FockStateVector& psi,
                                int dense_cap = limits::kDenseOracleCap);

/// Lowest-H0 determinant of the n_e-particle sector under the partition
/// energies (ties resolved toward the lexicographically smallest mask).
FockStateVector sector_prepare(int n_e, const OrbitalPartition& part);

/// Explicit superposition over basis states of the n_e-particle sector.
FockStateVector sector_prepare(int n_e, int n_spin_orbitals,
                               const std::vector<std::pair<std::uint64_t, cplx>>& amplitudes);

} // namespace swrrst
