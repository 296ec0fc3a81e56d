#pragma once

#include <functional>
#include <string>

#include "swrrst/dynamics.hpp"

namespace swrrst {

/// Exact outcome distribution of an m-bit phase-estimation read-out.
///
/// The register convention fixes the kernel to exp(+2*pi*i*a*y/2^m), so for
/// an eigenstate of U = exp(-i*t*H) with energy E the histogram peaks at the
/// outcome y whose phase y/2^m is closest to t*E/(2*pi) modulo 1.
struct PhaseHistogram {
    int m = 0;                      ///< read-out register width in bits
    double t = 0.0;                 ///< evolution time entering U = exp(-i*t*H)
    Eigen::VectorXd probabilities;  ///< outcome probabilities, indexed by y

    /// outcome with the largest probability (smallest y wins ties)
    Eigen::Index peak() const;

    /// phase estimate y / 2^m in [0, 1)
    double phase(Eigen::Index y) const;

    /// Energy estimate for outcome y, folded into the aliasing window
    /// [e_min, e_min + 2*pi/t).
    double energy(Eigen::Index y, double e_min) const;

    /// one "y  phase  probability" line per outcome, after a header comment
    std::string to_text() const;
};

/// Gershgorin bounds on the spectrum of a Hermitian matrix.
struct SpectralWindow {
    double e_min = 0.0;
    double e_max = 0.0;
    double range() const { return e_max - e_min; }
};

SpectralWindow gershgorin_window(const DenseMatrix& h);

/// Evolution time that maps the window onto a fraction 1/(1+pad) of the
/// phase circle, so no two energies in the window alias to the same phase.
double auto_evolution_time(const SpectralWindow& window, double pad = 0.1);

/// Runs the textbook phase-estimation circuit with an exact statevector and
/// returns the full outcome distribution (no sampling).  `apply_power` must
/// apply U^(2^j) to the given state.  The circuit needs one branch state per
/// control-register basis value; the total register is capped at
/// n_spin_orbitals + m <= 22 qubits.
PhaseHistogram qpe_run(const std::function<FockStateVector(int, const FockStateVector&)>& apply_power,
                       const FockStateVector& psi0, int m, double t);

/// Phase estimation of U = exp(-i*t*H) with dense matrix powers.
PhaseHistogram qpe_exact(const FermionOperator& h, double t, const FockStateVector& psi0, int m,
                         int dense_cap = limits::kDenseOracleCap);

/// Phase estimation of the dressed product-formula propagator
/// exp(-B) * bracket(t, r)^(2^j) * exp(-i*2^j*t*external) * exp(B),
/// precomputing the matrix squarings once per bit.
PhaseHistogram qpe_pipeline(const FermionOperator& b, const GParts& parts, double t, int r,
                            const FockStateVector& psi0, int m,
                            int dense_cap = limits::kDenseOracleCap);

} // namespace swrrst
