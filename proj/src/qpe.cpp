#include "swrrst/qpe.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "swrrst/errors.hpp"

namespace swrrst {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void check_register_width(int m) {
    if (m < 1 || m > 20)
        throw ValidationError("read-out register width m=" + std::to_string(m) +
                              " outside 1..20");
}

} // namespace

Eigen::Index PhaseHistogram::peak() const {
    Eigen::Index best = 0;
    probabilities.maxCoeff(&best);
    return best;
}

double PhaseHistogram::phase(Eigen::Index y) const {
    return static_cast<double>(y) / std::ldexp(1.0, m);
}

double PhaseHistogram::energy(Eigen::Index y, double e_min) const {
    if (t == 0.0) throw ValidationError("cannot decode an energy at evolution time zero");
    const double period = kTwoPi / t;
    const double e = kTwoPi * phase(y) / t;
    return e - std::floor((e - e_min) / period) * period;
}

std::string PhaseHistogram::to_text() const {
    std::string out = "# phase histogram  m=" + std::to_string(m) + "  t=" + format17(t) + "\n";
    for (Eigen::Index y = 0; y < probabilities.size(); ++y) {
        out += std::to_string(y);
        out += "  ";
        out += format17(phase(y));
        out += "  ";
        out += format17(probabilities(y));
        out += "\n";
    }
    return out;
}

SpectralWindow gershgorin_window(const DenseMatrix& h) {
    if (h.rows() == 0) throw ValidationError("empty matrix has no spectral window");
    SpectralWindow w;
    bool first = true;
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const double center = h(i, i).real();
        double radius = 0.0;
        for (Eigen::Index j = 0; j < h.cols(); ++j)
            if (j != i) radius += std::abs(h(i, j));
        if (first || center - radius < w.e_min) w.e_min = center - radius;
        if (first || center + radius > w.e_max) w.e_max = center + radius;
        first = false;
    }
    return w;
}

double auto_evolution_time(const SpectralWindow& window, double pad) {
    if (pad < 0.0) throw ValidationError("negative spectral padding");
    const double range = std::max(window.range(), 1e-12);
    return kTwoPi / (range * (1.0 + pad));
}

PhaseHistogram qpe_run(
    const std::function<FockStateVector(int, const FockStateVector&)>& apply_power,
    const FockStateVector& psi0, int m, double t) {
    check_register_width(m);
    if (psi0.n_spin_orbitals + m > 22)
        throw CapacityError("phase estimation register of " +
                            std::to_string(psi0.n_spin_orbitals + m) + " qubits exceeds 22");
    if (std::abs(psi0.norm() - 1.0) > 1e-8)
        throw ValidationError("initial state is not normalized");

    // One statevector per control-register value a, built along the binary
    // tree a -> a & (a-1) so each branch applies a single power U^(2^j).
    const std::size_t branches = std::size_t{1} << m;
    std::vector<Eigen::VectorXcd> states(branches);
    states[0] = psi0.amplitudes;
    for (std::size_t a = 1; a < branches; ++a) {
        const std::size_t parent = a & (a - 1);
        const int j = std::countr_zero(a);
        FockStateVector branch = psi0;
        branch.amplitudes = states[parent];
        states[a] = apply_power(j, branch).amplitudes;
        if (states[a].size() != psi0.amplitudes.size())
            throw ValidationError("controlled power changed the register size");
    }

    PhaseHistogram hist;
    hist.m = m;
    hist.t = t;
    hist.probabilities = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(branches));
    const double scale = std::ldexp(1.0, -m);
    for (std::size_t y = 0; y < branches; ++y) {
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(psi0.amplitudes.size());
        for (std::size_t a = 0; a < branches; ++a) {
            const double angle = kTwoPi * scale * static_cast<double>(a * y % branches);
            acc += std::exp(cplx(0.0, angle)) * states[a];
        }
        hist.probabilities(static_cast<Eigen::Index>(y)) = scale * scale * acc.squaredNorm();
    }
    return hist;
}

PhaseHistogram qpe_exact(const FermionOperator& h, double t, const FockStateVector& psi0, int m,
                         int dense_cap) {
    check_register_width(m);
    const DenseMatrix hd = to_dense(h, psi0.n_spin_orbitals, dense_cap).matrix;
    const double defect = (hd - hd.adjoint()).cwiseAbs().maxCoeff();
    if (defect > 1e-10 * std::max(1.0, hd.cwiseAbs().maxCoeff()))
        throw ValidationError("phase estimation needs a Hermitian generator (defect " +
                              std::to_string(defect) + ")");
    std::vector<DenseMatrix> powers(static_cast<std::size_t>(m));
    powers[0] = expm_propagator(hd, t);
    for (int j = 1; j < m; ++j) powers[j] = powers[j - 1] * powers[j - 1];
    return qpe_run(
        [&](int j, const FockStateVector& psi) {
            FockStateVector out = psi;
            out.amplitudes = powers[static_cast<std::size_t>(j)] * psi.amplitudes;
            return out;
        },
        psi0, m, t);
}

PhaseHistogram qpe_pipeline(const FermionOperator& b, const GParts& parts, double t, int r,
                            const FockStateVector& psi0, int m, int dense_cap) {
    check_register_width(m);
    if (psi0.n_spin_orbitals != parts.n_spin_orbitals)
        throw ValidationError("statevector register does not match the operator partition");
    std::vector<DenseMatrix> powers(static_cast<std::size_t>(m));
    // The external factor commutes with the product-formula bracket, so the
    // j-th power of the dressed propagator is an exact matrix squaring.
    powers[0] = power_unitary(b, parts, t, r, 0, dense_cap);
    for (int j = 1; j < m; ++j) powers[j] = powers[j - 1] * powers[j - 1];
    return qpe_run(
        [&](int j, const FockStateVector& psi) {
            FockStateVector out = psi;
            out.amplitudes = powers[static_cast<std::size_t>(j)] * psi.amplitudes;
            return out;
        },
        psi0, m, t);
}

} // namespace swrrst
