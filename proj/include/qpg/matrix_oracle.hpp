#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qpg/pauli.hpp"

namespace qpg {

// Slow, obviously-correct verification path: the actual complex matrices.
// Everything here is deliberately naive; it exists to cross-check the
// combinatorial commutation predicate, not to be fast.

inline constexpr double kEntryTol = 1e-10;    // per-entry matrix identity tolerance
inline constexpr double kCommuteTol = 1e-9;   // commutator-vs-zero tolerance
inline constexpr int kOracleMaxK = 4;         // matrix dim 2d = 32 at k = 4

struct DenseOperator {
    int dim = 0;
    std::vector<std::complex<double>> a;  // row-major dim x dim

    DenseOperator() = default;
    explicit DenseOperator(int d) : dim(d), a(static_cast<size_t>(d) * d) {}

    std::complex<double>& at(int r, int c) { return a[static_cast<size_t>(r) * dim + c]; }
    const std::complex<double>& at(int r, int c) const { return a[static_cast<size_t>(r) * dim + c]; }
};

inline DenseOperator identity_operator(int d) {
    DenseOperator m(d);
    for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
    return m;
}

/// Cyclic shift: column s carries its single 1 in row (s+1) mod d.
inline DenseOperator shift_matrix(int d) {
    if (d < 2) throw std::invalid_argument("shift_matrix: d must be >= 2");
    DenseOperator m(d);
    for (int s = 0; s < d; ++s) m.at((s + 1) % d, s) = 1.0;
    return m;
}

/// Clock: diag(1, w, w^2, ..., w^(d-1)) with w = exp(2*pi*i/d).
inline DenseOperator clock_matrix(int d) {
    if (d < 2) throw std::invalid_argument("clock_matrix: d must be >= 2");
    DenseOperator m(d);
    for (int s = 0; s < d; ++s) {
        const double ang = 2.0 * std::numbers::pi * s / d;
        m.at(s, s) = {std::cos(ang), std::sin(ang)};
    }
    return m;
}

inline DenseOperator multiply(const DenseOperator& x, const DenseOperator& y) {
    if (x.dim != y.dim) throw std::invalid_argument("multiply: dimension mismatch");
    const int n = x.dim;
    DenseOperator r(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const std::complex<double> v = x.at(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < n; ++j) r.at(i, j) += v * y.at(k, j);
        }
    return r;
}

inline DenseOperator kron(const DenseOperator& x, const DenseOperator& y) {
    DenseOperator r(x.dim * y.dim);
    for (int i = 0; i < x.dim; ++i)
        for (int j = 0; j < x.dim; ++j) {
            const std::complex<double> v = x.at(i, j);
            if (v == 0.0) continue;
            for (int p = 0; p < y.dim; ++p)
                for (int q = 0; q < y.dim; ++q)
                    r.at(i * y.dim + p, j * y.dim + q) = v * y.at(p, q);
        }
    return r;
}

inline DenseOperator adjoint(const DenseOperator& x) {
    DenseOperator r(x.dim);
    for (int i = 0; i < x.dim; ++i)
        for (int j = 0; j < x.dim; ++j) r.at(i, j) = std::conj(x.at(j, i));
    return r;
}

inline DenseOperator matrix_power(const DenseOperator& x, int e) {
    DenseOperator r = identity_operator(x.dim);
    for (int i = 0; i < e; ++i) r = multiply(r, x);
    return r;
}

inline double max_abs_diff(const DenseOperator& x, const DenseOperator& y) {
    double m = 0.0;
    for (size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
    return m;
}

inline bool is_unitary(const DenseOperator& x, double tol = kEntryTol) {
    return max_abs_diff(multiply(adjoint(x), x), identity_operator(x.dim)) < tol;
}

/// (X_2^b1 Z_2^c1) (x) (X_d^b2 Z_d^c2), qubit factor first.
inline DenseOperator normal_form_operator(int b1, int c1, int b2, int c2, int d) {
    const DenseOperator qubit =
        multiply(matrix_power(shift_matrix(2), b1), matrix_power(clock_matrix(2), c1));
    const DenseOperator qudit =
        multiply(matrix_power(shift_matrix(d), b2), matrix_power(clock_matrix(d), c2));
    return kron(qubit, qudit);
}

inline DenseOperator element_matrix(const PauliElement& e, const CaseParameter& p) {
    return normal_form_operator(e.b1, e.c1, e.b2, e.c2, p.d);
}

/// True iff A*B - B*A vanishes within kCommuteTol.
inline bool oracle_commutes(const DenseOperator& x, const DenseOperator& y) {
    if (x.dim != y.dim) throw std::invalid_argument("oracle_commutes: dimension mismatch");
    return max_abs_diff(multiply(x, y), multiply(y, x)) < kCommuteTol;
}

/// Group commutator W W' W^-1 W'^-1 for unitary W, W'.
inline DenseOperator group_commutator(const DenseOperator& x, const DenseOperator& y) {
    return multiply(multiply(x, y), multiply(adjoint(x), adjoint(y)));
}

/// Checks the relation w_d * X_d * Z_d = Z_d * X_d as exact matrices.
inline bool verify_basic_relation(int d) {
    const DenseOperator x = shift_matrix(d), z = clock_matrix(d);
    const double ang = 2.0 * std::numbers::pi / d;
    const std::complex<double> w{std::cos(ang), std::sin(ang)};
    DenseOperator lhs = multiply(x, z);
    for (auto& v : lhs.a) v *= w;
    return max_abs_diff(lhs, multiply(z, x)) < kEntryTol;
}

}  // namespace qpg
