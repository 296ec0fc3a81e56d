#include "swrrst/fermion_operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace swrrst {

std::uint64_t mask_of(const std::vector<int>& indices) {
    std::uint64_t mask = 0;
    for (int p : indices) {
        if (p < 1 || p > kMaxSpinOrbitals)
            throw ValidationError("spin-orbital index " + std::to_string(p) + " outside 1.." +
                                  std::to_string(kMaxSpinOrbitals));
        if (mask & bit_of(p))
            throw ValidationError("repeated spin-orbital index " + std::to_string(p));
        mask |= bit_of(p);
    }
    return mask;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_coeff(cplx c) {
    if (c.imag() == 0.0) return format_double(c.real());
    return "(" + format_double(c.real()) + "," + format_double(c.imag()) + ")";
}

std::string format_index_list(std::uint64_t mask) {
    std::string out;
    bool first = true;
    for (int p : indices_of(mask)) {
        if (!first) out += ',';
        out += std::to_string(p);
        first = false;
    }
    return out;
}

} // namespace

std::string term_str(const TermKey& key, cplx coeff) {
    return format_coeff(coeff) + "  c:" + format_index_list(key.creators) +
           "  a:" + format_index_list(key.annihilators);
}

std::string CaosTerm::str() const { return term_str(key(), coefficient); }

FermionOperator FermionOperator::identity(cplx c) {
    FermionOperator out;
    out.add_term({0, 0}, c);
    return out;
}

FermionOperator FermionOperator::single(cplx c, const TermKey& key) {
    FermionOperator out;
    out.add_term(key, c);
    return out;
}

FermionOperator FermionOperator::single(const CaosTerm& term) {
    return single(term.coefficient, term.key());
}

FermionOperator FermionOperator::ladder(int p, bool dagger) {
    TermKey key;
    (dagger ? key.creators : key.annihilators) = mask_of({p});
    return single(1.0, key);
}

FermionOperator FermionOperator::number(int p) {
    std::uint64_t m = mask_of({p});
    return single(1.0, {m, m});
}

void FermionOperator::add_term(const TermKey& key, cplx c) {
    auto [it, inserted] = terms_.try_emplace(key, c);
    if (!inserted) it->second += c;
}

FermionOperator& FermionOperator::operator+=(const FermionOperator& other) {
    for (const auto& [key, c] : other.terms_) add_term(key, c);
    prune();
    return *this;
}

FermionOperator& FermionOperator::operator-=(const FermionOperator& other) {
    for (const auto& [key, c] : other.terms_) add_term(key, -c);
    prune();
    return *this;
}

FermionOperator& FermionOperator::operator*=(cplx scale) {
    for (auto& [key, c] : terms_) c *= scale;
    prune();
    return *this;
}

FermionOperator FermionOperator::adjoint() const {
    FermionOperator out;
    for (const auto& [key, c] : terms_) out.add_term(key.adjoint(), std::conj(c));
    return out;
}

cplx FermionOperator::coefficient(const TermKey& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? cplx{} : it->second;
}

double FermionOperator::norm2() const {
    double s = 0;
    for (const auto& [key, c] : terms_) s += std::norm(c);
    return std::sqrt(s);
}

double FermionOperator::norm1() const {
    double s = 0;
    for (const auto& [key, c] : terms_) s += std::abs(c);
    return s;
}

int FermionOperator::max_body_rank() const {
    int r = 0;
    for (const auto& [key, c] : terms_) r = std::max(r, key.body_rank());
    return r;
}

int FermionOperator::max_index() const {
    int n = 0;
    for (const auto& [key, c] : terms_) n = std::max(n, key.max_index());
    return n;
}

bool FermionOperator::is_particle_conserving() const {
    for (const auto& [key, c] : terms_)
        if (!key.particle_conserving()) return false;
    return true;
}

void FermionOperator::prune(double threshold) {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) < threshold)
            it = terms_.erase(it);
        else
            ++it;
    }
}

void FermionOperator::check_term_cap(std::size_t cap) const {
    if (terms_.size() > cap)
        throw CapacityError("operator exceeds term cap: " + std::to_string(terms_.size()) + " > " +
                            std::to_string(cap));
}

std::vector<std::pair<TermKey, cplx>> FermionOperator::sorted_terms() const {
    std::vector<std::pair<TermKey, cplx>> out(terms_.begin(), terms_.end());
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

std::string FermionOperator::to_text() const {
    std::string out;
    for (const auto& [key, c] : sorted_terms()) {
        out += term_str(key, c);
        out += '\n';
    }
    return out;
}

FermionOperator FermionOperator::from_text(const std::string& text) {
    FermionOperator out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto parse_indices = [&](const std::string& tok, char tag) {
        if (tok.size() < 2 || tok[0] != tag || tok[1] != ':')
            throw ValidationError("line " + std::to_string(lineno) + ": expected '" +
                                  std::string(1, tag) + ":...' token, got '" + tok + "'");
        std::vector<int> idx;
        std::string body = tok.substr(2);
        std::istringstream bs(body);
        std::string field;
        while (std::getline(bs, field, ',')) {
            if (field.empty()) continue;
            std::size_t pos = 0;
            int v = std::stoi(field, &pos);
            if (pos != field.size())
                throw ValidationError("line " + std::to_string(lineno) + ": bad index '" + field +
                                      "'");
            idx.push_back(v);
        }
        return idx;
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        cplx coeff;
        if (!(ls >> coeff))
            throw ValidationError("line " + std::to_string(lineno) + ": unparsable coefficient");
        std::string ctok, atok;
        if (!(ls >> ctok >> atok))
            throw ValidationError("line " + std::to_string(lineno) +
                                  ": expected 'c:...' and 'a:...' tokens");
        std::string extra;
        if (ls >> extra)
            throw ValidationError("line " + std::to_string(lineno) + ": trailing content '" +
                                  extra + "'");
        CaosTerm term{parse_indices(ctok, 'c'), parse_indices(atok, 'a'), coeff};
        out.add_term(term.key(), coeff);
    }
    out.prune();
    return out;
}

// ---------------------------------------------------------------------------
// Normal ordering (generic kernel)

FermionOperator normal_order(const std::vector<LadderOp>& raw_product, cplx coefficient,
                             int max_ops) {
    if (static_cast<int>(raw_product.size()) > max_ops)
        throw CapacityError("elementary product of length " + std::to_string(raw_product.size()) +
                            " exceeds limit " + std::to_string(max_ops));
    for (const auto& op : raw_product)
        if (op.index < 1 || op.index > kMaxSpinOrbitals)
            throw ValidationError("spin-orbital index " + std::to_string(op.index) +
                                  " outside 1.." + std::to_string(kMaxSpinOrbitals));

    FermionOperator out;
    std::vector<std::pair<std::vector<LadderOp>, cplx>> work;
    work.emplace_back(raw_product, coefficient);
    while (!work.empty()) {
        auto [ops, c] = std::move(work.back());
        work.pop_back();
        bool dead = false;
        bool changed = true;
        // Repeatedly fix the leftmost violation of the canonical order
        // (creators ascending, then annihilators descending).  Each swap
        // strictly reduces the inversion count, so this terminates.
        while (changed && !dead) {
            changed = false;
            for (std::size_t i = 0; i + 1 < ops.size(); ++i) {
                const LadderOp l = ops[i];
                const LadderOp r = ops[i + 1];
                if (l.dagger == r.dagger && l.index == r.index) {
                    dead = true; // nilpotency: a_p a_p = a_p^+ a_p^+ = 0
                    break;
                }
                bool violation;
                if (l.dagger && r.dagger)
                    violation = l.index > r.index;
                else if (!l.dagger && !r.dagger)
                    violation = l.index < r.index;
                else
                    violation = !l.dagger && r.dagger;
                if (!violation) continue;
                if (!l.dagger && r.dagger && l.index == r.index) {
                    // a_p a_p^+ = 1 - a_p^+ a_p: branch on the contraction
                    std::vector<LadderOp> contracted;
                    contracted.reserve(ops.size() - 2);
                    contracted.insert(contracted.end(), ops.begin(), ops.begin() + i);
                    contracted.insert(contracted.end(), ops.begin() + i + 2, ops.end());
                    work.emplace_back(std::move(contracted), c);
                }
                std::swap(ops[i], ops[i + 1]);
                c = -c;
                changed = true;
                break;
            }
        }
        if (dead) continue;
        TermKey key;
        for (const auto& op : ops)
            (op.dagger ? key.creators : key.annihilators) |= bit_of(op.index);
        out.add_term(key, c);
    }
    out.prune();
    return out;
}

// ---------------------------------------------------------------------------
// Products.  A canonical term is [creators asc][annihilators desc]; the
// product of two such terms only needs the middle segment
// [annihilators(a) desc][creators(b) asc] normal-ordered, after which the
// outer creator/annihilator sets merge with pure inversion-count signs.
// Middle-segment expansions depend only on the two masks and are memoized.

namespace {

struct SignedKey {
    TermKey key;
    double sign;
};

const std::vector<SignedKey>& middle_segment(std::uint64_t annih_a, std::uint64_t create_b) {
    static std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<SignedKey>> cache;
    auto [it, inserted] = cache.try_emplace({annih_a, create_b});
    if (!inserted) return it->second;
    std::vector<LadderOp> ops;
    auto annih = indices_of(annih_a);
    for (auto p = annih.rbegin(); p != annih.rend(); ++p) ops.push_back({*p, false});
    for (int p : indices_of(create_b)) ops.push_back({p, true});
    FermionOperator ordered = normal_order(ops, 1.0, 128);
    for (const auto& [key, c] : ordered.sorted_terms())
        it->second.push_back({key, c.real()});
    return it->second;
}

inline std::uint64_t below_mask(int p) { return bit_of(p) - 1; }
inline std::uint64_t above_mask(int p) { return ~(below_mask(p) | bit_of(p)); }

// Parity of inversions when prepending fixed ascending set `left` to
// ascending set `right` and re-sorting ascending (creators), or the
// descending analog (annihilators).
inline int merge_parity_ascending(std::uint64_t left, std::uint64_t right) {
    int parity = 0;
    std::uint64_t m = right;
    while (m) {
        int p = std::countr_zero(m) + 1;
        parity ^= std::popcount(left & above_mask(p)) & 1;
        m &= m - 1;
    }
    return parity;
}

inline int merge_parity_descending(std::uint64_t left, std::uint64_t right) {
    int parity = 0;
    std::uint64_t m = right;
    while (m) {
        int p = std::countr_zero(m) + 1;
        parity ^= std::popcount(left & below_mask(p)) & 1;
        m &= m - 1;
    }
    return parity;
}

void accumulate_product(FermionOperator& out, const FermionOperator& a, const FermionOperator& b,
                        double overall_sign, std::size_t term_cap) {
    for (const auto& [ka, ca] : a.terms()) {
        for (const auto& [kb, cb] : b.terms()) {
            cplx c0 = overall_sign * ca * cb;
            for (const auto& mid : middle_segment(ka.annihilators, kb.creators)) {
                std::uint64_t cm = mid.key.creators;
                std::uint64_t am = mid.key.annihilators;
                if (ka.creators & cm) continue;     // repeated creator
                if (kb.annihilators & am) continue; // repeated annihilator
                int parity = merge_parity_ascending(ka.creators, cm) ^
                             merge_parity_descending(am, kb.annihilators);
                double s = parity ? -mid.sign : mid.sign;
                out.add_term({ka.creators | cm, am | kb.annihilators}, s * c0);
            }
        }
        out.check_term_cap(term_cap);
    }
}

} // namespace

FermionOperator multiply(const FermionOperator& a, const FermionOperator& b,
                         std::size_t term_cap) {
    FermionOperator out;
    accumulate_product(out, a, b, 1.0, term_cap);
    out.prune();
    return out;
}

FermionOperator commutator(const FermionOperator& a, const FermionOperator& b,
                           std::size_t term_cap) {
    FermionOperator out;
    accumulate_product(out, a, b, 1.0, term_cap);
    accumulate_product(out, b, a, -1.0, term_cap);
    out.prune();
    return out;
}

bool approx_equal(const FermionOperator& a, const FermionOperator& b, double tol) {
    FermionOperator diff = a;
    diff -= b;
    return diff.norm2() <= tol;
}

} // namespace swrrst
