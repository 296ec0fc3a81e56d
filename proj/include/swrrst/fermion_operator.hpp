#pragma once

#include <bit>
#include <compare>
#include <complex>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "swrrst/errors.hpp"

namespace swrrst {

using cplx = std::complex<double>;

/// Spin-orbital indices are 1-based; index sets are stored as bitmasks
/// (bit p-1 set means spin-orbital p is present), which is also the
/// occupation-number convention used by the dense oracle.
inline constexpr int kMaxSpinOrbitals = 64;

namespace limits {
inline constexpr double kPruneThreshold = 1e-14;
inline constexpr std::size_t kTermCap = 10'000'000;
inline constexpr int kMaxElementaryOps = 16;
inline constexpr int kDenseOracleCap = 14; // spin-orbitals
} // namespace limits

inline std::uint64_t bit_of(int p) { return std::uint64_t{1} << (p - 1); }

inline std::vector<int> indices_of(std::uint64_t mask) {
    std::vector<int> out;
    while (mask) {
        int b = std::countr_zero(mask);
        out.push_back(b + 1);
        mask &= mask - 1;
    }
    return out;
}

std::uint64_t mask_of(const std::vector<int>& indices);

/// Canonical key of a normal-ordered operator string.  The represented
/// product is a_{c1}^+ ... a_{ck}^+ a_{am} ... a_{a1} with c1<...<ck and
/// a1<...<am, i.e. creators ascending and annihilators descending left to
/// right.  With that order the Hermitian conjugate of a key is the key
/// with creators and annihilators swapped, sign-free.
struct TermKey {
    std::uint64_t creators = 0;
    std::uint64_t annihilators = 0;

    friend auto operator<=>(const TermKey&, const TermKey&) = default;

    TermKey adjoint() const { return {annihilators, creators}; }
    bool is_identity() const { return creators == 0 && annihilators == 0; }
    bool is_diagonal() const { return creators == annihilators; }
    int body_rank() const {
        return std::max(std::popcount(creators), std::popcount(annihilators));
    }
    bool particle_conserving() const {
        return std::popcount(creators) == std::popcount(annihilators);
    }
    int max_index() const {
        std::uint64_t all = creators | annihilators;
        return all ? 64 - std::countl_zero(all) : 0;
    }
};

struct TermKeyHash {
    std::size_t operator()(const TermKey& k) const {
        std::uint64_t h = k.creators * 0x9e3779b97f4a7c15ull;
        h ^= h >> 32;
        h += k.annihilators * 0xbf58476d1ce4e5b9ull;
        h ^= h >> 29;
        return static_cast<std::size_t>(h * 0x94d049bb133111ebull);
    }
};

/// One elementary ladder operator in an unnormalized product.
struct LadderOp {
    int index = 1;
    bool dagger = false;
};

/// A single canonical term in friendly (index-list) form.
struct CaosTerm {
    std::vector<int> creators;
    std::vector<int> annihilators;
    cplx coefficient{};

    TermKey key() const { return {mask_of(creators), mask_of(annihilators)}; }
    std::string str() const;
};

std::string term_str(const TermKey& key, cplx coeff);

/// Finite sum of canonical normal-ordered fermionic operator strings with
/// complex coefficients, keyed by (creators, annihilators).  Values are
/// immutable in spirit: composite operations return new operators and
/// prune only after full accumulation so results are deterministic.
class FermionOperator {
  public:
    using TermMap = std::unordered_map<TermKey, cplx, TermKeyHash>;

    FermionOperator() = default;

    static FermionOperator identity(cplx c = 1.0);
    static FermionOperator single(cplx c, const TermKey& key);
    static FermionOperator single(const CaosTerm& term);
    static FermionOperator ladder(int p, bool dagger);
    static FermionOperator number(int p);

    /// Accumulates without pruning; callers prune once a sum is complete.
    void add_term(const TermKey& key, cplx c);

    FermionOperator& operator+=(const FermionOperator& other);
    FermionOperator& operator-=(const FermionOperator& other);
    FermionOperator& operator*=(cplx scale);

    friend FermionOperator operator+(FermionOperator a, const FermionOperator& b) {
        a += b;
        return a;
    }
    friend FermionOperator operator-(FermionOperator a, const FermionOperator& b) {
        a -= b;
        return a;
    }
    friend FermionOperator operator*(cplx s, FermionOperator a) {
        a *= s;
        return a;
    }

    FermionOperator adjoint() const;

    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }
    cplx coefficient(const TermKey& key) const;

    /// sqrt(sum |c|^2) over coefficients.
    double norm2() const;
    /// sum |c|; an upper bound on the spectral norm of the dense image,
    /// since every canonical string has unit operator norm.
    double norm1() const;

    int max_body_rank() const;
    int max_index() const;
    bool is_particle_conserving() const;

    void prune(double threshold = limits::kPruneThreshold);
    void check_term_cap(std::size_t cap = limits::kTermCap) const;

    /// Deterministic (creators, annihilators)-sorted view for serialization
    /// and term-for-term comparisons.
    std::vector<std::pair<TermKey, cplx>> sorted_terms() const;

    /// Line-oriented text format, one term per line:
    ///   <re> <im>  c:p,q,...  a:r,s,...
    std::string to_text() const;
    static FermionOperator from_text(const std::string& text);

  private:
    TermMap terms_;
};

/// Exact normal ordering of an arbitrary elementary-operator product via
/// a_p a_q^+ = delta_pq - a_q^+ a_p; no truncation.
FermionOperator normal_order(const std::vector<LadderOp>& raw_product, cplx coefficient,
                             int max_ops = limits::kMaxElementaryOps);

FermionOperator multiply(const FermionOperator& a, const FermionOperator& b,
                         std::size_t term_cap = limits::kTermCap);
FermionOperator commutator(const FermionOperator& a, const FermionOperator& b,
                           std::size_t term_cap = limits::kTermCap);

bool approx_equal(const FermionOperator& a, const FermionOperator& b, double tol = 1e-12);

} // namespace swrrst
