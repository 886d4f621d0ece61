#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpg {

/// Case parameter for the qubit-qudit system C^2 (x) C^d with d = 2^k, k >= 2.
struct CaseParameter {
    int k = 0;
    int d = 0;  // 2^k

    explicit CaseParameter(int k_) : k(k_) {
        if (k_ < 2) throw std::invalid_argument("k must be >= 2");
        if (k_ > 14) throw std::invalid_argument("k too large for 32-bit element indices");
        d = 1 << k_;
    }

    /// Non-identity elements of the group modulo phase: 4d^2 - 1.
    int element_count() const { return 4 * d * d - 1; }
    /// Cardinality of every maximal commuting set: 2^(k+1) - 1.
    int set_size() const { return 2 * d - 1; }
    /// Shared-element count that makes two points collinear: 2^k - 1.
    int core_size() const { return d - 1; }
};

/// Group element modulo phase, in normal-form exponents:
/// (X^b1 Z^c1) (x) (X^b2 Z^c2), with b1,c1 in Z_2 and b2,c2 in Z_d.
/// Phases are deliberately not represented; they do not affect commutation.
struct PauliElement {
    int b1 = 0, c1 = 0;  // qubit shift/clock exponents (Z_2)
    int b2 = 0, c2 = 0;  // qudit shift/clock exponents (Z_d)

    bool is_identity() const { return b1 == 0 && c1 == 0 && b2 == 0 && c2 == 0; }
    friend bool operator==(const PauliElement&, const PauliElement&) = default;
};

inline PauliElement identity_element() { return {}; }

/// Mod-phase product: componentwise exponent addition mod (2,2,d,d).
inline PauliElement product(const PauliElement& e, const PauliElement& f, const CaseParameter& p) {
    return {(e.b1 + f.b1) & 1, (e.c1 + f.c1) & 1, (e.b2 + f.b2) % p.d, (e.c2 + f.c2) % p.d};
}

/// 1-based listing index of a non-identity element.
///
/// The qubit factor is enumerated as I, X, Z, XZ (q = 2*c1 + b1) and the
/// qudit factor in the order X^b Z^c with c outer and b inner, giving
///     index = d^2*q + d*c2 + b2.
/// This reproduces the published listings for k = 2 and k = 3 and is
/// extrapolated unchanged for k >= 4.
inline int element_index(const PauliElement& e, const CaseParameter& p) {
    if (e.is_identity()) throw std::invalid_argument("identity has no index");
    const int q = 2 * e.c1 + e.b1;
    return p.d * p.d * q + p.d * e.c2 + e.b2;
}

/// Inverse of element_index.
inline PauliElement index_to_element(int index, const CaseParameter& p) {
    if (index < 1 || index > p.element_count())
        throw std::out_of_range("element index out of range");
    const int d2 = p.d * p.d;
    const int q = index / d2;
    const int r = index % d2;
    return {q & 1, q >> 1, r % p.d, r / p.d};
}

/// All 4d^2 - 1 non-identity elements in index order 1 .. 4d^2-1.
inline std::vector<PauliElement> all_elements(const CaseParameter& p) {
    std::vector<PauliElement> out;
    out.reserve(static_cast<size_t>(p.element_count()));
    for (int i = 1; i <= p.element_count(); ++i) out.push_back(index_to_element(i, p));
    return out;
}

/// Commutation by exact integer arithmetic.
///
/// The commutator of two normal-form tensor products is the scalar
/// w_2^s1 * w_d^s2 with s1 = c1*b1' - c1'*b1 (mod 2) and
/// s2 = c2*b2' - c2'*b2 (mod d). Since w_2 = w_d^(d/2), the pair commutes
/// iff (d/2)*s1 + s2 = 0 (mod d).
inline bool commutes(const PauliElement& e, const PauliElement& f, const CaseParameter& p) {
    const int s1 = ((e.c1 * f.b1 - f.c1 * e.b1) % 2 + 2) % 2;
    const int s2 = ((e.c2 * f.b2 - f.c2 * e.b2) % p.d + p.d) % p.d;
    return ((p.d / 2) * s1 + s2) % p.d == 0;
}

namespace detail {
inline std::string xz_word(int b, int c) {
    if (b == 0 && c == 0) return "I";
    std::string s;
    if (b > 0) {
        s += "X";
        if (b > 1) s += "^" + std::to_string(b);
    }
    if (c > 0) {
        s += "Z";
        if (c > 1) s += "^" + std::to_string(c);
    }
    return s;
}
}  // namespace detail

/// Human-readable name, e.g. "I⊗X^2" or "Z⊗XZ^2".
inline std::string element_name(const PauliElement& e) {
    return detail::xz_word(e.b1, e.c1) + "⊗" + detail::xz_word(e.b2, e.c2);
}

}  // namespace qpg
