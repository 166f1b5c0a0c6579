#include <doctest.h>

#include <cmath>
#include <functional>

#include "dgoursat/goursat.hpp"
#include "dgoursat/sinegordon.hpp"
#include "helpers.hpp"

using namespace dgoursat;

namespace {

GridField vertex_grid(const LatticeDomain2& dom, const std::function<double(double, double)>& p) {
    GridField g(dom.n() + 1, dom.n() + 1);
    for (int j = 0; j <= dom.n(); ++j)
        for (int i = 0; i <= dom.n(); ++i) g(i, j) = p(dom.coord(i), dom.coord(j));
    return g;
}

double binom(int n, int k) {
    double c = 1.0;
    for (int t = 1; t <= k; ++t) c = c * (n - k + t) / t;
    return c;
}

// Brute force: every mixed quotient written as an explicit binomial sum of samples.
double ck_oracle(const std::function<double(double, double)>& p, int K, double r, double eps) {
    const int last = static_cast<int>(std::lround(r / eps)) - K;
    double best = 0.0;
    for (int k = 0; k <= K; ++k)
        for (int l = 0; k + l <= K; ++l)
            for (int j = 0; j <= last; ++j)
                for (int i = 0; i <= last; ++i) {
                    double s = 0.0;
                    for (int u = 0; u <= k; ++u)
                        for (int v = 0; v <= l; ++v)
                            s += ((k - u + l - v) % 2 ? -1.0 : 1.0) * binom(k, u) * binom(l, v) *
                                 p((i + u) * eps, (j + v) * eps);
                    best = std::max(best, std::abs(s / std::pow(eps, k + l)));
                }
    return best;
}

double field_sup(const GridField& g) {
    double m = 0.0;
    for (double v : g.data()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST_SUITE("goursat") {

TEST_CASE("domain validation") {
    CHECK(LatticeDomain2(1.0, 0.25).n() == 4);
    CHECK(LatticeDomain2::dyadic(2.0, 3).n() == 16);
    CHECK_THROWS_AS(LatticeDomain2(1.0, 0.3), ValidationError);
    CHECK_THROWS_AS(LatticeDomain2(1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(LatticeDomain2(-1.0, 0.5), ValidationError);
}

TEST_CASE("delta examples") {
    const LatticeDomain2 dom(1.0, 0.25);
    const GridField c = vertex_grid(dom, [](double, double) { return 3.0; });
    const GridField cx = delta_x(c, 0.25), cy = delta_y(c, 0.25);
    for (double v : cx.data()) CHECK(v == 0.0);
    for (double v : cy.data()) CHECK(v == 0.0);

    const GridField lin = vertex_grid(dom, [](double x, double) { return x; });
    const GridField lx = delta_x(lin, 0.25);
    for (double v : lx.data()) CHECK(v == 1.0);

    const GridField sq = vertex_grid(dom, [](double x, double) { return x * x; });
    const GridField d = delta_x(sq, 0.25);
    CHECK(d.nx() == sq.nx() - 1);
    CHECK(d(2, 0) == 1.25);  // at x = 1/2
    CHECK_THROWS_AS(d.at(4, 0), ValidationError);
}

TEST_CASE("discrete_ck_norm examples") {
    const LatticeDomain2 dom(1.0, 0.125);
    CHECK(discrete_ck_norm(vertex_grid(dom, [](double, double) { return 5.0; }), 3, dom) == 5.0);

    auto affine = [](double x, double y) { return x + 2 * y; };
    // largest value on the shrunken domain is at (r - eps, r - eps)
    const double expect = std::max(3.0 * (1.0 - 0.125), 2.0);
    CHECK(discrete_ck_norm(vertex_grid(dom, affine), 1, dom) == doctest::Approx(expect).epsilon(1e-14));

    const LatticeDomain2 half(1.0, 0.5);
    auto xy = [](double x, double y) { return x * y; };
    CHECK(discrete_ck_norm(vertex_grid(half, xy), 2, half) == doctest::Approx(ck_oracle(xy, 2, 1.0, 0.5)));
    CHECK(ck_oracle(xy, 2, 1.0, 0.5) == 1.0);

    auto smooth = [](double x, double y) { return std::sin(x + 2 * y) + x * x * y; };
    for (int K : {0, 1, 2, 3})
        CHECK(discrete_ck_norm(vertex_grid(dom, smooth), K, dom) ==
              doctest::Approx(ck_oracle(smooth, K, 1.0, 0.125)).epsilon(1e-10));

    CHECK_THROWS_AS(discrete_ck_norm(vertex_grid(half, xy), 3, half), ValidationError);
}

TEST_CASE("solver trivial cases") {
    const LatticeDomain2 dom(1.0, 1.0 / 16);
    const EdgeField2 z = solve_goursat_2d(make_rhs(Scheme::Naive), GoursatData2::zero(), dom);
    for (double v : z.a.data()) CHECK(v == 0.0);
    for (double v : z.b.data()) CHECK(v == 0.0);
    CHECK(z.a.nx() == 16);
    CHECK(z.a.ny() == 17);
    CHECK(z.b.nx() == 17);
    CHECK(z.b.ny() == 16);

    Rhs2 none{[](double, double, double) { return 0.0; }, [](double, double, double) { return 0.0; }, 1.0, "none"};
    const GoursatData2 demo = GoursatData2::demo();
    const EdgeField2 t = solve_goursat_2d(none, demo, dom);
    for (int j = 0; j <= 16; ++j)
        for (int i = 0; i < 16; ++i) {
            CHECK(t.a(i, j) == demo.a0(i / 16.0));
            CHECK(t.b(j, i) == demo.b0(i / 16.0));
        }
}

TEST_CASE("solver is the recursion: exact residual and determinism") {
    const LatticeDomain2 dom(1.0, 1.0 / 32);
    const Rhs2 rhs = make_rhs(Scheme::Hirota);
    const EdgeField2 f1 = solve_goursat_2d(rhs, GoursatData2::demo(), dom);
    const EdgeField2 f2 = solve_goursat_2d(rhs, GoursatData2::demo(), dom);
    CHECK(recursion_residual(rhs, f1) == 0.0);
    CHECK(f1.a == f2.a);
    CHECK(f1.b == f2.b);
}

TEST_CASE("restriction consistency") {
    const Rhs2 rhs = make_rhs(Scheme::Hirota);
    const double eps = 1.0 / 32;
    const EdgeField2 big = solve_goursat_2d(rhs, GoursatData2::demo(), LatticeDomain2(1.0, eps));
    const EdgeField2 small = solve_goursat_2d(rhs, GoursatData2::demo(), LatticeDomain2(0.5, eps));
    bool same = true;
    for (int j = 0; j < small.a.ny(); ++j)
        for (int i = 0; i < small.a.nx(); ++i) same = same && small.a(i, j) == big.a(i, j);
    for (int j = 0; j < small.b.ny(); ++j)
        for (int i = 0; i < small.b.nx(); ++i) same = same && small.b(i, j) == big.b(i, j);
    CHECK(same);
}

TEST_CASE("halving eps roughly halves the error") {
    const Rhs2 rhs = make_rhs(Scheme::Hirota);
    const GoursatData2 d = GoursatData2::demo();
    const EdgeField2 ref = solve_goursat_2d(rhs, d, LatticeDomain2::dyadic(1.0, 10));
    const EdgeField2 c5 = solve_goursat_2d(rhs, d, LatticeDomain2::dyadic(1.0, 5));
    const EdgeField2 c6 = solve_goursat_2d(rhs, d, LatticeDomain2::dyadic(1.0, 6));
    const double e5 = sup_error(c5.a, 1.0 / 32, ref.a, 1.0 / 1024);
    const double e6 = sup_error(c6.a, 1.0 / 64, ref.a, 1.0 / 1024);
    CHECK(e5 > 0.0);
    CHECK(std::isfinite(e5));
    CHECK(e5 / e6 > 1.7);
    CHECK(e5 / e6 < 2.4);
}

TEST_CASE("sup_error") {
    const LatticeDomain2 c(1.0, 0.25), f(1.0, 0.125);
    auto p = [](double x, double y) { return x - y * y; };
    CHECK(sup_error(vertex_grid(c, p), 0.25, vertex_grid(f, p), 0.125) == 0.0);
    CHECK(sup_error(vertex_grid(c, [](double, double) { return -2.5; }), 0.25,
                    vertex_grid(f, [](double, double) { return 0.0; }), 0.125) == 2.5);
    CHECK_THROWS_AS(sup_error(vertex_grid(c, p), 0.25, vertex_grid(f, p), 0.1), ValidationError);
    CHECK(nesting_ratio(0.25, 1.0 / 64) == 16);
}

TEST_CASE("solver errors") {
    const LatticeDomain2 dom(1.0, 0.25);
    CHECK_THROWS_AS(solve_goursat_2d(make_rhs(Scheme::Naive), std::vector<double>(3), std::vector<double>(4), dom),
                    ValidationError);
    Rhs2 blow{[](double a, double, double) { return 1e308 * (1.0 + a); }, [](double, double, double) { return 0.0; },
              1.0, "blow"};
    try {
        solve_goursat_2d(blow, GoursatData2::constant(1.0, 0.0), LatticeDomain2(1.0, 1.0 / 1024));
        FAIL("expected blow-up");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("a") != std::string::npos);
    }
}

TEST_CASE("tabulated data must hit lattice sites") {
    const LatticeDomain2 dom(1.0, 0.5);
    const GoursatData2 tab = GoursatData2::tabulated({{0.0, 1.0}, {0.5, 2.0}}, {{0.0, 3.0}, {0.5, 4.0}});
    CHECK(tab.sample_a(dom) == std::vector<double>{1.0, 2.0});
    CHECK(tab.sample_b(dom) == std::vector<double>{3.0, 4.0});
    CHECK_THROWS(tab.sample_a(LatticeDomain2(1.0, 0.25)));
}

TEST_CASE("grid CSV round trip") {
    const auto dir = testutil::scratch_dir("goursat_csv");
    const LatticeDomain2 dom(1.0, 1.0 / 8);
    const EdgeField2 f = solve_goursat_2d(make_rhs(Scheme::Hirota), GoursatData2::demo(), dom);
    const std::string path = (dir / "a.csv").string();
    write_grid_csv(path, f.a, dom);
    const GridCsv back = read_grid_csv(path);
    CHECK(back.grid == f.a);
    CHECK(back.eps == 0.125);
    CHECK(back.r == 1.0);
    CHECK_THROWS_AS(read_grid_csv((dir / "missing.csv").string()), IoError);
}

TEST_CASE("Hirota solutions stay bounded as eps shrinks") {
    const Rhs2 rhs = make_rhs(Scheme::Hirota);
    double lo = 1e300, hi = 0.0;
    for (int k = 5; k <= 11; ++k) {
        const EdgeField2 f = solve_goursat_2d(rhs, GoursatData2::demo(), LatticeDomain2::dyadic(1.0, k));
        const double s = std::max(field_sup(f.a), field_sup(f.b));
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    CHECK((hi - lo) / hi < 0.10);
}

}
