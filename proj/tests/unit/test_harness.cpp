#include <doctest.h>

#include <cmath>
#include <fstream>

#include "dgoursat/harness.hpp"
#include "helpers.hpp"

using namespace dgoursat;

namespace {

std::vector<ConvergenceRow> power_rows(double c, double p) {
    std::vector<ConvergenceRow> rows;
    for (int k = 3; k <= 8; ++k) {
        const double e = std::ldexp(1.0, -k);
        rows.push_back({e, c * std::pow(e, p)});
    }
    return rows;
}

SweepConfig surface_cfg(int kmin, int kmax, int kref) {
    SweepConfig c;
    c.k_min = kmin;
    c.k_max = kmax;
    c.k_ref = kref;
    c.quantity = Quantity::Surface;
    return c;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("fit_slope on exact power laws") {
    const auto [s1, i1] = fit_slope(power_rows(3.0, 1.0));
    CHECK(std::abs(s1 - 1.0) <= 1e-12);
    CHECK(std::abs(i1 - std::log(3.0)) <= 1e-12);
    const auto [s2, i2] = fit_slope(power_rows(0.5, 2.0));
    CHECK(std::abs(s2 - 2.0) <= 1e-12);
    (void)i2;
    auto two = power_rows(1.0, 1.0);
    two.resize(2);
    CHECK_THROWS_AS(fit_slope(two), ValidationError);
}

TEST_CASE("report CSV") {
    const auto dir = testutil::scratch_dir("report");
    ConvergenceReport rep;
    rep.rows = {{0.25, 0.1}, {0.125, 0.05000000000000001}, {0.0625, 0.0249}};
    std::tie(rep.slope, rep.intercept) = fit_slope(rep.rows);
    const std::string path = (dir / "r.csv").string();
    emit_report(rep, path);

    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "epsilon,error");
    CHECK(lines[4].rfind("# slope=", 0) == 0);
    CHECK(lines[5].rfind("# intercept=", 0) == 0);

    const ConvergenceReport back = read_report(path);
    REQUIRE(back.rows.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(back.rows[k].eps == rep.rows[k].eps);
        CHECK(back.rows[k].error == rep.rows[k].error);
    }
    CHECK(back.slope == rep.slope);
    CHECK(back.intercept == rep.intercept);

    CHECK_THROWS_AS(emit_report(ConvergenceReport{}, (dir / "e.csv").string()), ValidationError);
}

TEST_CASE("config validation") {
    SweepConfig c;
    c.validate();
    c.k_ref = c.k_max + 1;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = SweepConfig{};
    c.scheme = Scheme::Naive;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.quantity = Quantity::FieldsAB;
    c.validate();
    c = SweepConfig{};
    c.quantity = Quantity::SurfaceBT;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.bt_chain = {{1.0, 0.5}};
    c.validate();
    c = SweepConfig{};
    c.quantity = Quantity::Quotients;
    c.qx = 2;
    c.qy = 1;
    c.validate();
    c.k_min = 1;  // two cells cannot carry a third-order quotient
    CHECK_THROWS_AS(c.validate(), ValidationError);
    CHECK(parse_quantity("surface_bt") == Quantity::SurfaceBT);
    CHECK(to_string(Quantity::FieldsAB) == "fields_ab");
    CHECK_THROWS_AS(parse_quantity("volume"), ValidationError);
}

TEST_CASE("subsample and difference quotients") {
    GridField p(5, 3);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 5; ++i) p(i, j) = 10 * i + j;
    const GridField s = subsample(p, 2);
    CHECK(s.nx() == 3);
    CHECK(s.ny() == 2);
    CHECK(s(2, 1) == 42.0);
    const GridField q = difference_quotient(p, 1, 1, 0.5);
    CHECK(q.nx() == 4);
    CHECK(q.ny() == 2);
    for (double v : q.data()) CHECK(v == 0.0);
    const GridField qx = difference_quotient(p, 1, 0, 0.5);
    for (double v : qx.data()) CHECK(v == 20.0);
}

TEST_CASE("zero data gives a degenerate fit") {
    SweepConfig c;
    c.quantity = Quantity::FieldsAB;
    c.k_min = 3;
    c.k_max = 6;
    c.k_ref = 8;
    const ConvergenceReport rep = run_sweep(c, GoursatData2::zero());
    CHECK(rep.degenerate);
    for (const auto& r : rep.rows) CHECK(r.error <= 1e-14);
    CHECK(std::isnan(rep.slope));
}

TEST_CASE("fields sweep at k_ref = 13") {
    SweepConfig c;
    c.quantity = Quantity::FieldsAB;
    c.k_min = 5;
    c.k_max = 10;
    c.k_ref = 13;
    const ConvergenceReport rep = run_sweep(c, GoursatData2::demo());
    CHECK(rep.rows.size() == 6);
    CHECK(rep.slope >= 0.8);
    CHECK(rep.slope <= 1.2);
    CHECK(strictly_decreasing(rep));
}

TEST_CASE("larger domains give larger surface errors") {
    SweepConfig c = surface_cfg(3, 6, 8);
    const ConvergenceReport r1 = run_sweep(c, GoursatData2::demo());
    c.r = 4.0;
    const ConvergenceReport r4 = run_sweep(c, GoursatData2::demo());
    REQUIRE(r1.rows.size() == r4.rows.size());
    for (std::size_t k = 0; k < r1.rows.size(); ++k) CHECK(r4.rows[k].error > r1.rows[k].error);
}

TEST_CASE("threaded sweep matches the sequential one") {
    SweepConfig c = surface_cfg(3, 6, 8);
    const ConvergenceReport a = run_sweep(c, GoursatData2::demo());
    c.threads = 3;
    const ConvergenceReport b = run_sweep(c, GoursatData2::demo());
    for (std::size_t k = 0; k < a.rows.size(); ++k) CHECK(a.rows[k].error == b.rows[k].error);
}

TEST_CASE("reference level meta-test") {
    // With e(k, ref) ~ C (eps_k - eps_ref), raising the reference by one level changes e(k)
    // by 1 / (2^(ref + 1 - k) - 1) relative to the new error: 1/7 at ref = k + 2, 1/15 at ref = k + 3.
    const GoursatData2 d = GoursatData2::demo();
    const ConvergenceReport a = run_sweep(surface_cfg(3, 7, 10), d);
    const ConvergenceReport b = run_sweep(surface_cfg(3, 7, 11), d);
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        CHECK(a.rows[k].eps == b.rows[k].eps);
        CHECK(std::abs(b.rows[k].error - a.rows[k].error) / b.rows[k].error <= 0.10);
    }

    const ConvergenceReport c = run_sweep(surface_cfg(5, 8, 10), d);
    const ConvergenceReport e = run_sweep(surface_cfg(5, 8, 11), d);
    const double change = std::abs(e.rows.back().error - c.rows.back().error) / e.rows.back().error;
    CHECK(change == doctest::Approx(1.0 / 7.0).epsilon(0.25));
}

TEST_CASE("quotient sweeps decrease") {
    SweepConfig c;
    c.quantity = Quantity::Quotients;
    c.k_min = 4;
    c.k_max = 8;
    c.k_ref = 10;
    for (char field : {'a', 'b'})
        for (auto [qx, qy] : {std::pair{1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}}) {
            c.quotient_field = field;
            c.qx = qx;
            c.qy = qy;
            CHECK(strictly_decreasing(run_sweep(c, GoursatData2::demo())));
        }
}

}
