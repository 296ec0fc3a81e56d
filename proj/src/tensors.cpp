#include "swrrst/tensors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace swrrst {

namespace {

std::string idx2_str(int p, int q) { return "(" + std::to_string(p) + "," + std::to_string(q) + ")"; }

std::string idx4_str(int p, int q, int r, int s) {
    return "(" + std::to_string(p) + "," + std::to_string(q) + ";" + std::to_string(r) + "," +
           std::to_string(s) + ")";
}

// Sorts a triple in place, returns permutation parity (0 even, 1 odd);
// repeated entries signal an identically-zero antisymmetric slot.
int sort3(std::array<int, 3>& a, bool& repeated) {
    int parity = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2 - i; ++j)
            if (a[j] > a[j + 1]) {
                std::swap(a[j], a[j + 1]);
                parity ^= 1;
            }
    repeated = a[0] == a[1] || a[1] == a[2];
    return parity;
}

} // namespace

ManyBodyTensors::ManyBodyTensors(int n_spin_orbitals) : n_(n_spin_orbitals) {
    if (n_ < 1)
        throw ValidationError("tensor spin-orbital count must be >= 1, got " + std::to_string(n_));
    if (n_ > kMaxTensorOrbitals)
        throw CapacityError("dense tensors limited to " + std::to_string(kMaxTensorOrbitals) +
                            " spin-orbitals, got " + std::to_string(n_));
    one_.assign(static_cast<std::size_t>(n_) * n_, cplx{});
    two_.assign(static_cast<std::size_t>(n_) * n_ * n_ * n_, cplx{});
}

void ManyBodyTensors::check_index(int p) const {
    if (p < 1 || p > n_)
        throw ValidationError("tensor index " + std::to_string(p) + " outside 1.." +
                              std::to_string(n_));
}

std::size_t ManyBodyTensors::i2(int p, int q) const {
    check_index(p);
    check_index(q);
    return static_cast<std::size_t>(p - 1) * n_ + (q - 1);
}

std::size_t ManyBodyTensors::i4(int p, int q, int r, int s) const {
    check_index(p);
    check_index(q);
    check_index(r);
    check_index(s);
    return ((static_cast<std::size_t>(p - 1) * n_ + (q - 1)) * n_ + (r - 1)) * n_ + (s - 1);
}

std::size_t ManyBodyTensors::i6(int p, int q, int r, int s, int t, int u) const {
    return ((((static_cast<std::size_t>(p - 1) * n_ + (q - 1)) * n_ + (r - 1)) * n_ + (s - 1)) *
                n_ +
            (t - 1)) *
               n_ +
           (u - 1);
}

void ManyBodyTensors::set_v_antisym(int p, int q, int r, int s, cplx val) {
    if (p == q || r == s) {
        if (val != cplx{})
            throw ValidationError("antisymmetric slot v" + idx4_str(p, q, r, s) +
                                  " with repeated index must be zero");
        return;
    }
    set_v(p, q, r, s, val);
    set_v(q, p, r, s, -val);
    set_v(p, q, s, r, -val);
    set_v(q, p, s, r, val);
    cplx cv = std::conj(val);
    set_v(r, s, p, q, cv);
    set_v(s, r, p, q, -cv);
    set_v(r, s, q, p, -cv);
    set_v(s, r, q, p, cv);
}

void ManyBodyTensors::enable_three_body() {
    if (n_ > 12)
        throw CapacityError("dense three-body tensor limited to 12 spin-orbitals, got " +
                            std::to_string(n_));
    if (three_.empty())
        three_.assign(static_cast<std::size_t>(n_) * n_ * n_ * n_ * n_ * n_, cplx{});
}

cplx ManyBodyTensors::w(int p, int q, int r, int s, int t, int u) const {
    if (three_.empty()) return {};
    check_index(p);
    check_index(q);
    check_index(r);
    check_index(s);
    check_index(t);
    check_index(u);
    return three_[i6(p, q, r, s, t, u)];
}

void ManyBodyTensors::set_w_antisym(const std::array<int, 3>& upper,
                                    const std::array<int, 3>& lower, cplx val) {
    enable_three_body();
    for (int i : upper) check_index(i);
    for (int i : lower) check_index(i);
    static constexpr std::array<std::array<int, 3>, 6> perms = {
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    static constexpr std::array<int, 6> parity = {0, 1, 1, 0, 0, 1};
    std::array<int, 3> us = upper, ls = lower;
    bool rep_u = false, rep_l = false;
    sort3(us, rep_u);
    sort3(ls, rep_l);
    if (rep_u || rep_l) {
        if (val != cplx{})
            throw ValidationError("antisymmetric three-body slot with repeated index must be zero");
        return;
    }
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
            int sign = (parity[a] ^ parity[b]) ? -1 : 1;
            std::array<int, 3> up = {upper[perms[a][0]], upper[perms[a][1]], upper[perms[a][2]]};
            std::array<int, 3> lo = {lower[perms[b][0]], lower[perms[b][1]], lower[perms[b][2]]};
            three_[i6(up[0], up[1], up[2], lo[0], lo[1], lo[2])] = double(sign) * val;
            three_[i6(lo[0], lo[1], lo[2], up[0], up[1], up[2])] =
                double(sign) * std::conj(val);
        }
    }
}

void ManyBodyTensors::validate(double tol) const {
    for (int p = 1; p <= n_; ++p)
        for (int q = 1; q <= n_; ++q)
            if (std::abs(h(p, q) - std::conj(h(q, p))) > tol)
                throw ValidationError("one-body Hermiticity violated at h" + idx2_str(p, q));
    for (int p = 1; p <= n_; ++p)
        for (int q = 1; q <= n_; ++q)
            for (int r = 1; r <= n_; ++r)
                for (int s = 1; s <= n_; ++s) {
                    cplx val = v(p, q, r, s);
                    if (std::abs(val + v(q, p, r, s)) > tol)
                        throw ValidationError("two-body antisymmetry (upper swap) violated at v" +
                                              idx4_str(p, q, r, s));
                    if (std::abs(val + v(p, q, s, r)) > tol)
                        throw ValidationError("two-body antisymmetry (lower swap) violated at v" +
                                              idx4_str(p, q, r, s));
                    if (std::abs(val - std::conj(v(r, s, p, q))) > tol)
                        throw ValidationError("two-body Hermiticity violated at v" +
                                              idx4_str(p, q, r, s));
                }
}

FermionOperator hamiltonian_from_tensors(const ManyBodyTensors& t) {
    t.validate();
    const int n = t.n_spin_orbitals();
    FermionOperator out;
    if (t.core_energy != 0.0) out.add_term({0, 0}, t.core_energy);
    for (int p = 1; p <= n; ++p)
        for (int q = 1; q <= n; ++q) {
            cplx c = t.h(p, q);
            if (c != cplx{}) out.add_term({bit_of(p), bit_of(q)}, c);
        }
    // E^{pq}_{rs} = a_p^+ a_q^+ a_s a_r; over the canonical key
    // ({p<q},{r<s}) the four antisymmetric images add up to v^{pq}_{rs}.
    for (int p = 1; p <= n; ++p)
        for (int q = 1; q <= n; ++q) {
            if (p == q) continue;
            for (int r = 1; r <= n; ++r)
                for (int s = 1; s <= n; ++s) {
                    if (r == s) continue;
                    cplx c = t.v(p, q, r, s);
                    if (c == cplx{}) continue;
                    int sign = (p > q ? -1 : 1) * (r > s ? -1 : 1);
                    TermKey key{bit_of(p) | bit_of(q), bit_of(r) | bit_of(s)};
                    out.add_term(key, 0.25 * double(sign) * c);
                }
        }
    if (t.has_three_body()) {
        for (int p = 1; p <= n; ++p)
            for (int q = 1; q <= n; ++q)
                for (int r = 1; r <= n; ++r) {
                    if (p == q || p == r || q == r) continue;
                    for (int s = 1; s <= n; ++s)
                        for (int u = 1; u <= n; ++u)
                            for (int x = 1; x <= n; ++x) {
                                if (s == u || s == x || u == x) continue;
                                cplx c = t.w(p, q, r, s, u, x);
                                if (c == cplx{}) continue;
                                std::array<int, 3> up{p, q, r}, lo{s, u, x};
                                bool rep_u = false, rep_l = false;
                                int sign = sort3(up, rep_u) ^ sort3(lo, rep_l);
                                TermKey key{bit_of(p) | bit_of(q) | bit_of(r),
                                            bit_of(s) | bit_of(u) | bit_of(x)};
                                out.add_term(key, (sign ? -1.0 : 1.0) * c / 36.0);
                            }
                }
    }
    out.prune();
    return out;
}

} // namespace swrrst
