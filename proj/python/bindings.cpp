#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dgoursat/frames.hpp"
#include "dgoursat/goursat.hpp"
#include "dgoursat/harness.hpp"
#include "dgoursat/linalg2.hpp"
#include "dgoursat/sinegordon.hpp"
#include "dgoursat/surfaces.hpp"

namespace py = pybind11;
using namespace dgoursat;

namespace {

using Mat = std::vector<std::vector<std::complex<double>>>;

Mat to_nested(const C2x2& m) { return {{m.e00, m.e01}, {m.e10, m.e11}}; }

C2x2 from_nested(const Mat& m) {
    if (m.size() != 2 || m[0].size() != 2 || m[1].size() != 2) throw ValidationError("expected a 2x2 matrix");
    return {m[0][0], m[0][1], m[1][0], m[1][1]};
}

std::vector<std::vector<double>> grid_rows(const GridField& g) {
    // rows indexed [i][j]
    std::vector<std::vector<double>> out(g.nx(), std::vector<double>(g.ny()));
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) out[i][j] = g(i, j);
    return out;
}

std::vector<std::vector<std::array<double, 3>>> points_rows(const Grid2<Su2Vector>& g) {
    std::vector<std::vector<std::array<double, 3>>> out(g.nx(), std::vector<std::array<double, 3>>(g.ny()));
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) out[i][j] = {g(i, j).x1, g(i, j).x2, g(i, j).x3};
    return out;
}

GoursatData2 data_by_name(const std::string& name) {
    if (name == "demo") return GoursatData2::demo();
    if (name == "zero") return GoursatData2::zero();
    throw ValidationError("unknown data preset '" + name + "' (expected demo or zero)");
}

py::dict report_dict(const KSurfaceReport& r) {
    py::dict d;
    d["edge"] = r.edge;
    d["planarity"] = r.planarity;
    d["angle"] = r.angle;
    d["angle_sum"] = r.angle_sum;
    d["interior_sites"] = r.interior_sites;
    d["degenerate_sites"] = r.degenerate_sites;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Discrete sine-Gordon Goursat problems and discrete K-surfaces.";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def("hirota_rhs", [](double a, double b, double eps) {
        const RhsPair p = hirota_rhs(a, b, eps);
        return py::make_tuple(p.f, p.g);
    }, py::arg("a"), py::arg("b"), py::arg("eps"), "(f, g) of the Hirota scheme.");

    m.def("naive_rhs", [](double a, double b, double eps) {
        const RhsPair p = naive_rhs(a, b, eps);
        return py::make_tuple(p.f, p.g);
    }, py::arg("a"), py::arg("b"), py::arg("eps"));

    m.def("solve", [](double r, double eps, const std::string& scheme, const std::string& data) {
        const EdgeField2 f = solve_goursat_2d(make_rhs(parse_scheme(scheme)), data_by_name(data), LatticeDomain2(r, eps));
        return py::make_tuple(grid_rows(f.a), grid_rows(f.b));
    }, py::arg("r"), py::arg("eps"), py::arg("scheme") = "hirota", py::arg("data") = "demo",
       "Solve the Goursat problem; returns (a, b) as nested lists indexed [i][j].");

    m.def("build_surface", [](double r, double eps, double lambda, const std::string& data) {
        return points_rows(build_surface(data_by_name(data), LatticeDomain2(r, eps), lambda).points);
    }, py::arg("r"), py::arg("eps"), py::arg("lam") = 1.0, py::arg("data") = "demo");

    m.def("validate", [](double r, double eps, double lambda, const std::string& data) {
        const GoursatData2 d = data_by_name(data);
        const LatticeDomain2 dom(r, eps);
        const EdgeField2 f = solve_goursat_2d(make_rhs(Scheme::Hirota), d, dom);
        const SurfaceMesh mesh = surface_from_fields(f, lambda);
        return report_dict(validate_k_surface(mesh, reconstruct_phi(f, d.b0(0.0), Scheme::Hirota)));
    }, py::arg("r"), py::arg("eps"), py::arg("lam") = 1.0, py::arg("data") = "demo",
       "Build a surface and return its validator residuals.");

    m.def("check_compatibility", [](const std::string& scheme, double alpha, double eps,
                                    const std::vector<std::array<double, 3>>& samples) {
        return check_compatibility_3d(make_rhs(parse_scheme(scheme)), discrete_backlund_rhs(alpha), samples, eps);
    }, py::arg("scheme"), py::arg("alpha"), py::arg("eps"), py::arg("samples"));

    m.def("run_sweep", [](const std::string& quantity, double r, int k_min, int k_max, int k_ref,
                          const std::string& scheme, double lambda, const std::string& data, int threads) {
        SweepConfig cfg;
        cfg.quantity = parse_quantity(quantity);
        cfg.r = r;
        cfg.k_min = k_min;
        cfg.k_max = k_max;
        cfg.k_ref = k_ref;
        cfg.scheme = parse_scheme(scheme);
        cfg.lambda = lambda;
        cfg.threads = threads;
        const ConvergenceReport rep = run_sweep(cfg, data_by_name(data));
        py::list rows;
        for (const auto& row : rep.rows) rows.append(py::make_tuple(row.eps, row.error));
        py::dict d;
        d["rows"] = rows;
        d["slope"] = rep.slope;
        d["intercept"] = rep.intercept;
        d["degenerate"] = rep.degenerate;
        return d;
    }, py::arg("quantity"), py::arg("r") = 1.0, py::arg("k_min") = 3, py::arg("k_max") = 6, py::arg("k_ref") = 8,
       py::arg("scheme") = "hirota", py::arg("lam") = 1.0, py::arg("data") = "demo", py::arg("threads") = 1);

    m.def("fit_slope", [](const std::vector<std::pair<double, double>>& rows) {
        std::vector<ConvergenceRow> rs;
        for (const auto& [e, err] : rows) rs.push_back({e, err});
        return fit_slope(rs);
    }, py::arg("rows"), "Least-squares (slope, intercept) of ln(error) against ln(eps).");

    m.def("su2_project", [](const Mat& a) {
        const Su2Vector v = su2_project(from_nested(a));
        return std::array<double, 3>{v.x1, v.x2, v.x3};
    }, py::arg("matrix"));

    m.def("lax_U", [](double a, double lambda, double eps) {
        return to_nested(eps == 0.0 ? lax_U_cont(a, lambda) : lax_U_disc(a, lambda, eps));
    }, py::arg("a"), py::arg("lam"), py::arg("eps") = 0.0, "U (eps = 0) or its lattice version.");

    m.def("lax_V", [](double b, double lambda, double eps) {
        return to_nested(eps == 0.0 ? lax_V_cont(b, lambda) : lax_V_disc(b, lambda, eps));
    }, py::arg("b"), py::arg("lam"), py::arg("eps") = 0.0, "V (eps = 0) or its lattice version.");
}
