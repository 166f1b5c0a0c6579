#include "dgoursat/linalg2.hpp"

#include "dgoursat/error.hpp"

namespace dgoursat {

C2x2 C2x2::inverse() const {
    const cplx d = det();
    if (d == cplx{0.0, 0.0}) throw NumericalError("C2x2::inverse: singular matrix");
    const cplx s = 1.0 / d;
    return {s * e11, -s * e01, -s * e10, s * e00};
}

double frobenius_norm(const C2x2& a) {
    return std::sqrt(std::norm(a.e00) + std::norm(a.e01) + std::norm(a.e10) + std::norm(a.e11));
}

C2x2 pauli(int k) {
    const cplx i{0.0, 1.0};
    switch (k) {
        case 1: return {0.0, 1.0, 1.0, 0.0};
        case 2: return {0.0, -i, i, 0.0};
        case 3: return {1.0, 0.0, 0.0, -1.0};
        default: throw ValidationError("pauli: index must be 1, 2 or 3");
    }
}

Su2Vector su2_project(const C2x2& a) {
    // X = (A - A^dagger)/2 minus its trace part, then read off
    // X00 = (i/2) x3, X01 = (i/2)(x1 - i x2).
    return {a.e01.imag() + a.e10.imag(), a.e01.real() - a.e10.real(), a.e00.imag() - a.e11.imag()};
}

C2x2 su2_embed(const Su2Vector& x) {
    const cplx h{0.0, 0.5};
    return {h * x.x3, h * cplx{x.x1, -x.x2}, h * cplx{x.x1, x.x2}, -h * x.x3};
}

bool check_unitary(const C2x2& a, double tol) {
    if (!(tol > 0.0)) throw ValidationError("check_unitary: tol must be positive");
    const double unit_err = frobenius_norm(a.adjoint() * a - C2x2::identity());
    const double det_err = std::abs(a.det() - 1.0);
    return unit_err <= tol && det_err <= tol;
}

}  // namespace dgoursat
