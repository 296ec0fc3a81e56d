#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <map>
#include <string>

#include "swrrst/dense.hpp"
#include "swrrst/fermion_operator.hpp"

namespace swrrst {

namespace limits {
/// Pauli weights with magnitude below this are dropped after merges.
inline constexpr double kPauliPruneThreshold = 1e-12;
} // namespace limits

/// A single Pauli string over up to 64 qubits in the symplectic (x, z)
/// representation: qubit q (1-based) carries X iff bit q-1 of `x` is set,
/// Z iff bit q-1 of `z` is set, and Y (= iXZ) iff both are set.  Strings in
/// this canonical form are Hermitian; phases produced by products are
/// absorbed into operator weights.
struct PauliString {
    std::uint64_t x = 0;
    std::uint64_t z = 0;

    auto operator<=>(const PauliString&) const = default;

    std::uint64_t support() const { return x | z; }
    bool is_identity() const { return support() == 0; }
    /// true when the string contains only I and Z letters
    bool z_only() const { return x == 0; }
    /// number of non-identity letters
    int weight() const { return std::popcount(support()); }
    /// highest qubit with a non-identity letter; 0 for the identity string
    int max_qubit() const;
    /// lowest qubit with a non-identity letter; 0 for the identity string
    int min_qubit() const;
    /// letter of qubit q in {'I','X','Y','Z'}
    char letter(int q) const;
    /// letters written highest qubit first (qubit 1 is the rightmost letter)
    std::string letters(int n_qubits) const;
};

/// Phase exponent e (mod 4) in the product rule  a * b = i^e * c  where all
/// three strings are in canonical form and c = (a.x^b.x, a.z^b.z).
int pauli_product_phase(const PauliString& a, const PauliString& b);

/// Weighted sum of canonical Pauli strings with complex weights; weights of
/// a Hermitian operator are real.  Like strings are merged on insertion and
/// weights below kPauliPruneThreshold are pruned after arithmetic.
class PauliOperator {
  public:
    using WeightMap = std::map<PauliString, cplx>;

    PauliOperator() = default;

    static PauliOperator identity(cplx weight = 1.0);
    static PauliOperator single(const PauliString& s, cplx weight = 1.0);

    /// accumulate w * s (merging with an existing like string; no pruning)
    void add_string(const PauliString& s, cplx w);

    PauliOperator& operator+=(const PauliOperator& o);
    PauliOperator& operator-=(const PauliOperator& o);
    PauliOperator& operator*=(cplx scale);
    PauliOperator& operator*=(const PauliOperator& o);

    friend PauliOperator operator+(PauliOperator a, const PauliOperator& b) { return a += b; }
    friend PauliOperator operator-(PauliOperator a, const PauliOperator& b) { return a -= b; }
    friend PauliOperator operator*(PauliOperator a, cplx s) { return a *= s; }
    friend PauliOperator operator*(cplx s, PauliOperator a) { return a *= s; }
    friend PauliOperator operator*(const PauliOperator& a, const PauliOperator& b);

    const WeightMap& weights() const { return weights_; }
    std::size_t size() const { return weights_.size(); }
    bool empty() const { return weights_.empty(); }
    cplx weight(const PauliString& s) const;

    /// P† (equal to conjugating all weights: canonical strings are Hermitian)
    PauliOperator adjoint() const;

    double norm2() const;
    /// largest |Im w| over all weights; 0 for an exactly Hermitian operator
    double max_imag_weight() const;
    /// highest qubit touched by any string; 0 for scalar operators
    int max_qubit() const;

    void prune(double threshold = limits::kPauliPruneThreshold);

    /// Dense matrix over n_qubits qubits in the little-endian computational
    /// basis (bit q-1 of the basis index is the state of qubit q).
    DenseMatrix to_dense(int n_qubits, int dense_cap = limits::kDenseOracleCap) const;

    /// One line per string: "weight  letters", highest qubit leftmost,
    /// weights printed with 17 significant digits (complex as "(re,im)").
    std::string to_text(int n_qubits) const;
    static PauliOperator from_text(const std::string& text);

  private:
    WeightMap weights_;
};

} // namespace swrrst
