#pragma once

#include <cmath>
#include <complex>

namespace dgoursat {

using cplx = std::complex<double>;

/// 2x2 complex matrix, stored entrywise.
struct C2x2 {
    cplx e00{}, e01{}, e10{}, e11{};

    static constexpr C2x2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr C2x2 zero() { return {}; }

    cplx det() const { return e00 * e11 - e01 * e10; }
    cplx trace() const { return e00 + e11; }
    C2x2 adjoint() const { return {std::conj(e00), std::conj(e10), std::conj(e01), std::conj(e11)}; }

    /// Inverse through the adjugate. Throws NumericalError when det == 0.
    C2x2 inverse() const;

    C2x2& operator+=(const C2x2& o) {
        e00 += o.e00; e01 += o.e01; e10 += o.e10; e11 += o.e11;
        return *this;
    }
    C2x2& operator-=(const C2x2& o) {
        e00 -= o.e00; e01 -= o.e01; e10 -= o.e10; e11 -= o.e11;
        return *this;
    }
    bool operator==(const C2x2&) const = default;

    C2x2& operator*=(cplx s) {
        e00 *= s; e01 *= s; e10 *= s; e11 *= s;
        return *this;
    }
};

inline C2x2 operator+(C2x2 a, const C2x2& b) { return a += b; }
inline C2x2 operator-(C2x2 a, const C2x2& b) { return a -= b; }
inline C2x2 operator*(cplx s, C2x2 a) { return a *= s; }
inline C2x2 operator*(C2x2 a, cplx s) { return a *= s; }

inline C2x2 mat_mul(const C2x2& a, const C2x2& b) {
    return {a.e00 * b.e00 + a.e01 * b.e10, a.e00 * b.e01 + a.e01 * b.e11,
            a.e10 * b.e00 + a.e11 * b.e10, a.e10 * b.e01 + a.e11 * b.e11};
}
inline C2x2 operator*(const C2x2& a, const C2x2& b) { return mat_mul(a, b); }

double frobenius_norm(const C2x2& a);

/// Pauli matrices, k = 1, 2, 3.
C2x2 pauli(int k);

/// Point of R^3; also the coordinate vector of an su(2) element.
struct Su2Vector {
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;

    Su2Vector& operator+=(const Su2Vector& o) { x1 += o.x1; x2 += o.x2; x3 += o.x3; return *this; }
    Su2Vector& operator-=(const Su2Vector& o) { x1 -= o.x1; x2 -= o.x2; x3 -= o.x3; return *this; }
    Su2Vector& operator*=(double s) { x1 *= s; x2 *= s; x3 *= s; return *this; }

    double norm() const { return std::sqrt(x1 * x1 + x2 * x2 + x3 * x3); }
    bool operator==(const Su2Vector&) const = default;
};

inline Su2Vector operator+(Su2Vector a, const Su2Vector& b) { return a += b; }
inline Su2Vector operator-(Su2Vector a, const Su2Vector& b) { return a -= b; }
inline Su2Vector operator*(double s, Su2Vector a) { return a *= s; }
inline double dot(const Su2Vector& a, const Su2Vector& b) { return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3; }
inline Su2Vector cross(const Su2Vector& a, const Su2Vector& b) {
    return {a.x2 * b.x3 - a.x3 * b.x2, a.x3 * b.x1 - a.x1 * b.x3, a.x1 * b.x2 - a.x2 * b.x1};
}
/// det[a, b, c]
inline double triple(const Su2Vector& a, const Su2Vector& b, const Su2Vector& c) { return dot(a, cross(b, c)); }

// su(2) <-> R^3 with X = (i/2)(x1 s1 + x2 s2 + x3 s3).

/// Coordinates of the trace-free anti-Hermitian part of A.
Su2Vector su2_project(const C2x2& a);

/// (i/2)(x1 s1 + x2 s2 + x3 s3)
C2x2 su2_embed(const Su2Vector& x);

/// True iff ||A^dagger A - I||_F <= tol and |det A - 1| <= tol.
bool check_unitary(const C2x2& a, double tol);

}  // namespace dgoursat
