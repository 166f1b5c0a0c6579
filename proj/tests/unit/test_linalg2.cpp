#include <doctest.h>

#include <random>

#include "dgoursat/error.hpp"
#include "dgoursat/linalg2.hpp"
#include "helpers.hpp"

using namespace dgoursat;
using testutil::random_matrix;

TEST_SUITE("linalg2") {

TEST_CASE("mat_mul identity, inverse and associativity") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 100; ++t) {
        const C2x2 A = random_matrix(rng), B = random_matrix(rng), C = random_matrix(rng);
        CHECK(frobenius_norm(C2x2::identity() * A - A) == 0.0);
        CHECK(frobenius_norm(A * A.inverse() - C2x2::identity()) <= 1e-12 * (1.0 + frobenius_norm(A) * frobenius_norm(A.inverse())));
        CHECK(frobenius_norm((A * B) * C - A * (B * C)) <= 1e-14 * (1.0 + frobenius_norm(A) * frobenius_norm(B) * frobenius_norm(C)));
    }
}

TEST_CASE("mat_mul matches the textbook sum") {
    std::mt19937_64 rng(8);
    const C2x2 A = random_matrix(rng), B = random_matrix(rng);
    const cplx a[2][2] = {{A.e00, A.e01}, {A.e10, A.e11}};
    const cplx b[2][2] = {{B.e00, B.e01}, {B.e10, B.e11}};
    cplx c[2][2] = {};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) c[i][j] += a[i][k] * b[k][j];
    const C2x2 P = A * B;
    CHECK(std::abs(P.e00 - c[0][0]) < 1e-15);
    CHECK(std::abs(P.e01 - c[0][1]) < 1e-15);
    CHECK(std::abs(P.e10 - c[1][0]) < 1e-15);
    CHECK(std::abs(P.e11 - c[1][1]) < 1e-15);
}

TEST_CASE("singular inverse throws") {
    const C2x2 S{1.0, 2.0, 2.0, 4.0};
    CHECK_THROWS_AS(S.inverse(), NumericalError);
}

TEST_CASE("su2_project basis and trace removal") {
    const cplx h{0.0, 0.5};
    const Su2Vector e3 = su2_project(h * pauli(3));
    CHECK(e3.x1 == doctest::Approx(0.0));
    CHECK(e3.x2 == doctest::Approx(0.0));
    CHECK(e3.x3 == doctest::Approx(1.0));

    const Su2Vector id = su2_project(C2x2::identity());
    CHECK(id == Su2Vector{});

    const C2x2 A = h * (2.0 * pauli(1) + 3.0 * pauli(2)) + 5.0 * C2x2::identity();
    const Su2Vector v = su2_project(A);
    CHECK(v.x1 == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(v.x2 == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(v.x3 == doctest::Approx(0.0));
}

TEST_CASE("su2_embed inverts su2_project on su(2)") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int t = 0; t < 50; ++t) {
        const Su2Vector x{U(rng), U(rng), U(rng)};
        const Su2Vector y = su2_project(su2_embed(x));
        CHECK((x - y).norm() <= 1e-15);
        const C2x2 X = su2_embed(x);
        CHECK(std::abs(X.trace()) <= 1e-15);
        CHECK(frobenius_norm(X + X.adjoint()) <= 1e-15);
    }
}

TEST_CASE("su2_project properties") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int t = 0; t < 100; ++t) {
        const C2x2 A = random_matrix(rng), B = random_matrix(rng);
        const double al = U(rng), be = U(rng);
        const Su2Vector lhs = su2_project(al * A + be * B);
        const Su2Vector rhs = al * su2_project(A) + be * su2_project(B);
        CHECK((lhs - rhs).norm() <= 1e-14 * (1.0 + lhs.norm()));

        // |x| = sqrt(2) ||X||_F for X in su(2)
        const Su2Vector x{U(rng), U(rng), U(rng)};
        const C2x2 X = su2_embed(x);
        CHECK(std::abs(su2_project(X).norm() - std::sqrt(2.0) * frobenius_norm(X)) <= 1e-14);

        // conjugation by a unitary is a rotation
        const C2x2 Uu = testutil::random_su2(rng);
        CHECK(std::abs(su2_project(Uu.inverse() * X * Uu).norm() - x.norm()) <= 1e-12);
    }
}

TEST_CASE("check_unitary") {
    CHECK(check_unitary(C2x2::identity(), 1e-14));
    for (double th : {0.0, 0.3, -2.0, 10.0}) {
        const C2x2 D{std::polar(1.0, th), 0.0, 0.0, std::polar(1.0, -th)};
        CHECK(check_unitary(D, 1e-14));
    }
    CHECK_FALSE(check_unitary(2.0 * C2x2::identity(), 1e-6));
    // unitary with det -1 is rejected
    CHECK_FALSE(check_unitary(pauli(1), 1e-6));
    CHECK_THROWS_AS(check_unitary(C2x2::identity(), 0.0), ValidationError);
}

TEST_CASE("pauli algebra") {
    for (int k = 1; k <= 3; ++k) CHECK(frobenius_norm(pauli(k) * pauli(k) - C2x2::identity()) == 0.0);
    const cplx i{0.0, 1.0};
    CHECK(frobenius_norm(pauli(1) * pauli(2) - i * pauli(3)) == 0.0);
    CHECK_THROWS_AS(pauli(4), ValidationError);
}

TEST_CASE("vector helpers") {
    const Su2Vector a{1, 0, 0}, b{0, 1, 0}, c{0, 0, 1};
    CHECK(cross(a, b) == c);
    CHECK(triple(a, b, c) == 1.0);
    CHECK(dot(a + b, b) == 1.0);
    CHECK((2.0 * c).norm() == 2.0);
}

}
