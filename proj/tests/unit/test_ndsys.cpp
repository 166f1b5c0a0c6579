#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "dgoursat/ndsys.hpp"
#include "helpers.hpp"

using namespace dgoursat;

namespace {

std::vector<std::vector<double>> samples3(std::size_t count, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-3, 3);
    std::vector<std::vector<double>> s(count);
    for (auto& v : s) v = {U(rng), U(rng), U(rng)};
    return s;
}

EquationND& find(SystemSpecND& s, int k, int i) {
    for (auto& e : s.equations)
        if (e.field == k && e.dir == i) return e;
    throw std::logic_error("no such equation");
}

}  // namespace

TEST_SUITE("ndsys") {

TEST_CASE("dependency check") {
    SystemSpecND one;
    one.N = 1;
    one.d = 1;
    one.E = {{0}};
    one.eps = {0.5};
    one.equations = {{0, 0, [](std::span<const double> v) { return v[0]; }, {0}}};
    one.validate();
    CHECK(check_dependency(one));

    SystemSpecND sg = sine_gordon_bt_system(0.125, 1.0);
    CHECK(check_dependency(sg));
    CHECK(dependency_violations(sg).empty());

    find(sg, 0, 1).deps = {0, 1, 2};  // a in direction y reading theta
    CHECK_FALSE(check_dependency(sg));
    const auto v = dependency_violations(sg);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == 0);
    CHECK(v[0].dir == 1);
    CHECK(v[0].reads == 2);
}

TEST_CASE("spec validation") {
    SystemSpecND s = hirota_system_2d(0.25);
    s.validate();
    CHECK(s.D(0) == std::vector<int>{0});
    CHECK(s.evolves(1, 0));
    CHECK_FALSE(s.evolves(1, 1));
    s.equations.pop_back();
    CHECK_THROWS_AS(s.validate(), ValidationError);
    SystemSpecND t = hirota_system_2d(0.25);
    t.eps[1] = 0.0;
    CHECK_THROWS_AS(t.validate(), ValidationError);
    SystemSpecND u = hirota_system_2d(0.25);
    u.E[0].clear();
    CHECK_THROWS_AS(u.validate(), ValidationError);
}

TEST_CASE("identity check") {
    SystemSpecND lin;
    lin.N = 2;
    lin.d = 3;
    lin.E = {{0, 1, 2}, {0, 2}};
    lin.eps = {0.5, 0.25, 1.0};
    for (int k = 0; k < 2; ++k)
        for (int i : lin.E[k])
            lin.equations.push_back({k, i, [c = 1.0 + k + 0.5 * i](std::span<const double>) { return c; }, {}});
    lin.validate();
    auto two = samples3(100, 1);
    for (auto& v : two) v.pop_back();
    CHECK(check_identity(lin, two) == 0.0);

    const auto samples = samples3(10000, 2);
    for (double al : {0.5, 1.0, 2.0}) {
        for (double e : {0.125, 1.0 / 64}) {
            const double nd = check_identity(sine_gordon_bt_system(e, al), samples);
            std::vector<std::array<double, 3>> s3;
            for (const auto& s : samples) s3.push_back({s[0], s[1], s[2]});
            const double direct = check_compatibility_3d(make_rhs(Scheme::Hirota), discrete_backlund_rhs(al), s3, e);
            CHECK(nd <= 1e-11);
            CHECK(direct <= 1e-11);
        }
    }

    SystemSpecND broken = sine_gordon_bt_system(0.125, 1.0);
    auto& eq = find(broken, 2, 0);
    eq.f = [f = eq.f](std::span<const double> v) { return -f(v); };
    CHECK(check_identity(broken, samples3(1000, 3)) > 1e-3);
}

TEST_CASE("d = 2 reproduces the planar solver bitwise") {
    const LatticeDomain2 dom = LatticeDomain2::dyadic(1.0, 6);
    const GoursatData2 d = GoursatData2::demo();
    const StateND st = solve_goursat_nd(hirota_system_2d(dom.eps()), sine_gordon_bt_data(d, {}), {1.0, 1.0});
    const EdgeField2 f = solve_goursat_2d(make_rhs(Scheme::Hirota), d, dom);
    const EdgeField2 g = edge_field_from_state(st, dom);
    CHECK(g.a == f.a);
    CHECK(g.b == f.b);
    CHECK(st.fields[0].shape == std::vector<int>{64, 65});
    CHECK(st.fields[1].shape == std::vector<int>{65, 64});
}

TEST_CASE("d = 3 reproduces the layered solver") {
    const LatticeDomain2 dom = LatticeDomain2::dyadic(1.0, 5);
    const GoursatData2 d = GoursatData2::demo();
    const std::vector<double> th0{0.5, -0.2};
    const std::vector<BacklundParam> chain{{1.3, 0.5}, {1.3, -0.2}};
    const LayeredField3 ref = solve_goursat_3d(make_rhs(Scheme::Hirota), discrete_backlund_chain(chain), d, dom);
    const SystemSpecND spec = sine_gordon_bt_system(dom.eps(), 1.3);

    for (RouteRule rule : {RouteRule::Smallest, RouteRule::Largest}) {
        SolveOptionsND opts;
        opts.route = rule;
        const StateND st = solve_goursat_nd(spec, sine_gordon_bt_data(d, th0), {1.0, 1.0, 2.0}, opts);
        CHECK(st.route_mismatch <= 1e-12);
        CHECK(st.fields[2].shape == std::vector<int>{33, 33, 2});
        double worst = 0.0;
        bool same = true;
        for (int z = 0; z <= 2; ++z) {
            const EdgeField2 g = edge_field_from_state(st, dom, z);
            for (std::size_t k = 0; k < g.a.data().size(); ++k) {
                worst = std::max(worst, std::abs(g.a.data()[k] - ref.layers[z].a.data()[k]));
                same = same && g.a.data()[k] == ref.layers[z].a.data()[k];
            }
            for (std::size_t k = 0; k < g.b.data().size(); ++k) {
                worst = std::max(worst, std::abs(g.b.data()[k] - ref.layers[z].b.data()[k]));
                same = same && g.b.data()[k] == ref.layers[z].b.data()[k];
            }
        }
        for (int z = 0; z < 2; ++z)
            for (int j = 0; j <= 32; ++j)
                for (int i = 0; i <= 32; ++i) {
                    const int x[3] = {i, j, z};
                    worst = std::max(worst, std::abs(st.fields[2].at(x) - ref.theta[z](i, j)));
                    same = same && st.fields[2].at(x) == ref.theta[z](i, j);
                }
        CHECK(worst <= 1e-13);
        // the layered solver defines every site through its last direction
        if (rule == RouteRule::Largest) CHECK(same);
    }
}

TEST_CASE("sweep orders agree bitwise") {
    const LatticeDomain2 dom = LatticeDomain2::dyadic(1.0, 4);
    const SystemSpecND spec = sine_gordon_bt_system(dom.eps(), 0.8);
    const auto data = sine_gordon_bt_data(GoursatData2::demo(), {0.3, 1.0, -0.5});
    SolveOptionsND o;
    const StateND base = solve_goursat_nd(spec, data, {1.0, 1.0, 3.0}, o);
    CHECK(base.verified_sites > 0);
    for (SweepOrder order : {SweepOrder::Reverse, SweepOrder::Hyperplane}) {
        o.order = order;
        const StateND other = solve_goursat_nd(spec, data, {1.0, 1.0, 3.0}, o);
        for (int k = 0; k < 3; ++k) CHECK(other.fields[k].values == base.fields[k].values);
    }
    o.order = SweepOrder::Hyperplane;
    o.threads = 3;
    const StateND threaded = solve_goursat_nd(spec, data, {1.0, 1.0, 3.0}, o);
    for (int k = 0; k < 3; ++k) CHECK(threaded.fields[k].values == base.fields[k].values);
}

TEST_CASE("constant single field") {
    SystemSpecND s;
    s.N = 1;
    s.d = 3;
    s.E = {{0, 1, 2}};
    s.eps = {0.25, 0.5, 1.0};
    for (int i = 0; i < 3; ++i) s.equations.push_back({0, i, [](std::span<const double>) { return 0.0; }, {}});
    const StateND st = solve_goursat_nd(s, {[](std::span<const double>) { return 4.5; }}, {1.0, 1.0, 2.0});
    CHECK(st.fields[0].shape == std::vector<int>{5, 3, 3});
    for (double v : st.fields[0].values) CHECK(v == 4.5);
}

TEST_CASE("incompatible systems are caught at runtime") {
    SystemSpecND bad = sine_gordon_bt_system(0.125, 1.0);
    auto& eq = find(bad, 2, 0);
    eq.f = [f = eq.f](std::span<const double> v) { return 1.1 * f(v); };
    CHECK_THROWS_AS(solve_goursat_nd(bad, sine_gordon_bt_data(GoursatData2::demo(), {0.5}), {1.0, 1.0, 1.0}),
                    NumericalError);

    SystemSpecND dep = sine_gordon_bt_system(0.125, 1.0);
    find(dep, 0, 1).deps = {0, 1, 2};
    CHECK_THROWS_AS(solve_goursat_nd(dep, sine_gordon_bt_data(GoursatData2::demo(), {0.5}), {1.0, 1.0, 1.0}),
                    ValidationError);
}

TEST_CASE("state CSV") {
    const auto dir = testutil::scratch_dir("ndcsv");
    const SystemSpecND spec = hirota_system_2d(0.5);
    const StateND st = solve_goursat_nd(spec, sine_gordon_bt_data(GoursatData2::demo(), {}), {1.0, 1.0});
    const auto paths = write_state_csv(st, spec, (dir / "st").string());
    REQUIRE(paths.size() == 2);
    std::ifstream in(paths[0]);
    std::string l1, l2;
    std::getline(in, l1);
    std::getline(in, l2);
    CHECK(l1 == "# field=a eps=0.5;0.5 n=2;2");
    CHECK(l2 == "i1,i2,value");
    int rows = 0;
    for (std::string l; std::getline(in, l);) ++rows;
    CHECK(rows == 2 * 3);
}

}
