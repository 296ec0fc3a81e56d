#pragma once

#include <array>
#include <vector>

#include "swrrst/fermion_operator.hpp"

namespace swrrst {

/// Antisymmetrized one-/two-(/three-)body coefficient tensors over N
/// spin-orbitals, 1-based accessors.  Two-body entries are physicists'
/// antisymmetrized v^{pq}_{rs}; the optional three-body block w^{pqr}_{stu}
/// is fully antisymmetric in each index triple.
class ManyBodyTensors {
  public:
    static constexpr int kMaxTensorOrbitals = 32;

    ManyBodyTensors() = default;
    explicit ManyBodyTensors(int n_spin_orbitals);

    int n_spin_orbitals() const { return n_; }
    double core_energy = 0.0;

    cplx h(int p, int q) const { return one_[i2(p, q)]; }
    void set_h(int p, int q, cplx v) { one_[i2(p, q)] = v; }

    cplx v(int p, int q, int r, int s) const { return two_[i4(p, q, r, s)]; }
    void set_v(int p, int q, int r, int s, cplx val) { two_[i4(p, q, r, s)] = val; }
    /// Writes val into all eight antisymmetry/Hermiticity images of (pq|rs)
    /// slots: v^{pq}_{rs} with upper/lower swaps and the conjugate block.
    void set_v_antisym(int p, int q, int r, int s, cplx val);

    bool has_three_body() const { return !three_.empty(); }
    void enable_three_body();
    cplx w(int p, int q, int r, int s, int t, int u) const;
    void set_w_antisym(const std::array<int, 3>& upper, const std::array<int, 3>& lower, cplx val);

    /// Throws ValidationError naming the violated symmetry.
    void validate(double tol = 1e-12) const;

  private:
    int n_ = 0;
    std::vector<cplx> one_;
    std::vector<cplx> two_;
    std::vector<cplx> three_;

    void check_index(int p) const;
    std::size_t i2(int p, int q) const;
    std::size_t i4(int p, int q, int r, int s) const;
    std::size_t i6(int p, int q, int r, int s, int t, int u) const;
};

/// H = core + Σ h^p_q E^p_q + ¼ Σ v^{pq}_{rs} E^{pq}_{rs} (+ 1/36 Σ w·E),
/// in canonical form; Hermitian by the tensor symmetries.
FermionOperator hamiltonian_from_tensors(const ManyBodyTensors& t);

} // namespace swrrst
