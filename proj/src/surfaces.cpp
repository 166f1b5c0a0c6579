#include "dgoursat/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dgoursat/format.hpp"

namespace dgoursat {

namespace {

double angle_between(const Su2Vector& u, const Su2Vector& v) {
    return std::atan2(cross(u, v).norm(), dot(u, v));
}

bool nearly_parallel(const Su2Vector& u, const Su2Vector& v) {
    const double s = cross(u, v).norm();
    return s <= 1e-8 * u.norm() * v.norm();
}

}  // namespace

SurfaceMesh mesh_from_frame(const FrameField& frame, SurfaceProvenance prov) {
    SurfaceMesh mesh{frame.domain, frame.lambda, Grid2<Su2Vector>(frame.samples.nx(), frame.samples.ny()),
                     std::move(prov)};
    for (std::size_t k = 0; k < frame.samples.data().size(); ++k)
        mesh.points.data()[k] = sym_point(frame.samples.data()[k], frame.lambda);
    return mesh;
}

Grid2<Su2Vector> strided_surface_points(const EdgeField2& fields, double lambda, int stride,
                                        std::span<const GridField> thetas, std::span<const double> alphas) {
    const int n = fields.domain.n();
    if (stride < 1 || n % stride != 0)
        throw ValidationError("strided_surface_points: stride " + std::to_string(stride) + " does not divide n=" +
                              std::to_string(n));
    if (thetas.size() != alphas.size()) throw ValidationError("strided_surface_points: need one alpha per theta");
    for (std::size_t z = 0; z < thetas.size(); ++z) {
        if (thetas[z].nx() != n + 1 || thetas[z].ny() != n + 1)
            throw ValidationError("strided_surface_points: theta shape mismatch");
        if (!(alphas[z] > 0.0)) throw ValidationError("strided_surface_points: alpha must be positive");
    }
    const int m = n / stride;
    Grid2<Su2Vector> out(m + 1, m + 1);
    const C2x2 dW = backlund_W_dlambda();
    FrameRowStepper stepper(fields, lambda);
    while (true) {
        const int j = stepper.row();
        if (j % stride == 0) {
            const auto row = stepper.current();
            for (int i = 0; i <= n; i += stride) {
                FrameSample s = row[i];
                for (std::size_t z = 0; z < thetas.size(); ++z)
                    s = step(backlund_W(thetas[z](i, j), alphas[z], lambda), dW, s);
                out(i / stride, j / stride) = sym_point(s, lambda);
            }
        }
        if (stepper.done()) break;
        stepper.advance();
    }
    return out;
}

SurfaceMesh surface_from_fields(const EdgeField2& fields, double lambda, SurfaceProvenance prov) {
    return {fields.domain, lambda, strided_surface_points(fields, lambda, 1), std::move(prov)};
}

SurfaceMesh build_surface(const GoursatData2& data, const LatticeDomain2& dom, double lambda, Scheme scheme) {
    if (scheme != Scheme::Hirota)
        throw ValidationError("build_surface: the naive scheme has no Lax representation, so its solutions do not "
                              "define a discrete surface; use --scheme hirota");
    const EdgeField2 fields = solve_goursat_2d(make_rhs(Scheme::Hirota), data, dom);
    const CellResidual zcc = zero_curvature_worst_cell(fields, lambda);
    if (!(zcc.value <= kZeroCurvatureTol))
        throw NumericalError("build_surface: zero-curvature residual " + fmt17(zcc.value) + " at cell (" +
                             std::to_string(zcc.i) + "," + std::to_string(zcc.j) + ")");
    return surface_from_fields(fields, lambda, {Scheme::Hirota, data.id(), {}});
}

double expected_edge_x(double eps, double lambda) { return eps * lambda / (1.0 + 0.25 * eps * eps * lambda * lambda); }

double expected_edge_y(double eps, double lambda) {
    const double mu = 1.0 / lambda;
    return eps * mu / (1.0 + 0.25 * eps * eps * mu * mu);
}

double KSurfaceReport::max_residual() const { return std::max({edge, planarity, angle, angle_sum}); }

KSurfaceReport validate_k_surface(const SurfaceMesh& mesh, const PhiField& phi) {
    const int n = mesh.domain.n();
    if (mesh.points.nx() != n + 1 || mesh.points.ny() != n + 1) throw ValidationError("validate_k_surface: bad mesh shape");
    if (phi.phi.nx() != n + 1 || phi.phi.ny() != n + 1)
        throw ValidationError("validate_k_surface: phi and mesh live on different lattices");
    const double eps = mesh.eps();
    const double lx = std::abs(expected_edge_x(eps, mesh.lambda));
    const double ly = std::abs(expected_edge_y(eps, mesh.lambda));
    const auto& F = mesh.points;
    const auto& p = phi.phi;

    KSurfaceReport rep;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            if (i < n) rep.edge = std::max(rep.edge, std::abs((F(i + 1, j) - F(i, j)).norm() - lx) / lx);
            if (j < n) rep.edge = std::max(rep.edge, std::abs((F(i, j + 1) - F(i, j)).norm() - ly) / ly);
        }
    }

    const double two_pi = 2.0 * std::numbers::pi;
    for (int j = 1; j < n; ++j) {
        for (int i = 1; i < n; ++i) {
            ++rep.interior_sites;
            const Su2Vector c = F(i, j);
            const Su2Vector px = F(i + 1, j) - c, py = F(i, j + 1) - c;
            const Su2Vector mx = F(i - 1, j) - c, my = F(i, j - 1) - c;

            rep.planarity = std::max(rep.planarity, std::abs(triple(px, py, mx)) / (lx * ly * lx));
            rep.planarity = std::max(rep.planarity, std::abs(triple(px, py, my)) / (lx * ly * ly));
            if (nearly_parallel(px, py) || nearly_parallel(py, mx) || nearly_parallel(mx, my) || nearly_parallel(my, px))
                ++rep.degenerate_sites;

            const double measured[4] = {angle_between(px, py), angle_between(py, mx), angle_between(mx, my),
                                        angle_between(my, px)};
            const double expected[4] = {
                0.5 * (p(i + 1, j) + p(i, j + 1)),
                std::numbers::pi - 0.5 * (p(i, j + 1) + p(i - 1, j)),
                0.5 * (p(i - 1, j) + p(i, j - 1)),
                std::numbers::pi - 0.5 * (p(i, j - 1) + p(i + 1, j)),
            };
            double sum = 0.0;
            for (int k = 0; k < 4; ++k) {
                rep.angle = std::max(rep.angle, std::abs(std::cos(measured[k]) - std::cos(expected[k])));
                sum += measured[k];
            }
            rep.angle_sum = std::max(rep.angle_sum, std::abs(sum - two_pi));
        }
    }
    return rep;
}

DisplacementStats displacement_stats(const SurfaceMesh& from, const SurfaceMesh& to) {
    if (from.points.nx() != to.points.nx() || from.points.ny() != to.points.ny())
        throw ValidationError("displacement_stats: mesh shapes differ");
    const auto& p = from.points.data();
    const auto& q = to.points.data();
    DisplacementStats st;
    if (p.empty()) return st;
    st.min = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    std::vector<double> d(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        d[k] = (q[k] - p[k]).norm();
        sum += d[k];
        st.min = std::min(st.min, d[k]);
        st.max = std::max(st.max, d[k]);
    }
    st.mean = sum / static_cast<double>(d.size());
    double var = 0.0;
    for (double x : d) var += (x - st.mean) * (x - st.mean);
    st.stddev = std::sqrt(var / static_cast<double>(d.size()));
    st.rel_stddev = st.mean > 0.0 ? st.stddev / st.mean : 0.0;
    return st;
}

BacklundSurfaceResult backlund_surface(const GoursatData2& data, const LatticeDomain2& dom,
                                       const std::vector<BacklundParam>& chain, double lambda) {
    const Rhs2 planar = make_rhs(Scheme::Hirota);
    const auto steps = discrete_backlund_chain(chain);
    BacklundSurfaceResult res{{}, {}, {}, solve_goursat_3d(planar, steps, data, dom)};

    FrameField frame = propagate_frame(res.fields.layers[0], lambda);
    SurfaceProvenance prov{Scheme::Hirota, data.id(), {}};
    res.layers.push_back(mesh_from_frame(frame, prov));

    for (std::size_t z = 0; z < chain.size(); ++z) {
        frame = transform_frame(frame, res.fields.theta[z], chain[z].alpha);
        prov.bt_chain.push_back(chain[z]);
        SurfaceMesh mesh = mesh_from_frame(frame, prov);

        // Plain pipeline on the layer's own fields, normalized at the origin.
        const SurfaceMesh plain = surface_from_fields(res.fields.layers[z + 1], lambda);
        const C2x2 C = frame.samples(0, 0).psi;
        const C2x2 Cinv = C.inverse();
        const Su2Vector origin = mesh.points(0, 0);
        double worst = 0.0;
        for (std::size_t k = 0; k < mesh.points.data().size(); ++k) {
            const Su2Vector moved = su2_project(C * su2_embed(mesh.points.data()[k] - origin) * Cinv);
            worst = std::max(worst, (moved - plain.points.data()[k]).norm());
        }
        res.route_residual.push_back(worst);
        res.displacement.push_back(displacement_stats(res.layers.back(), mesh));
        res.layers.push_back(std::move(mesh));
    }
    return res;
}

std::vector<SurfaceMesh> associated_family(const GoursatData2& data, const LatticeDomain2& dom,
                                           const std::vector<double>& lambdas) {
    const EdgeField2 fields = solve_goursat_2d(make_rhs(Scheme::Hirota), data, dom);
    std::vector<SurfaceMesh> out;
    out.reserve(lambdas.size());
    for (double l : lambdas) {
        const CellResidual zcc = zero_curvature_worst_cell(fields, l);
        if (!(zcc.value <= kZeroCurvatureTol))
            throw NumericalError("associated_family: zero-curvature residual " + fmt17(zcc.value) + " at lambda=" +
                                 fmt17(l));
        out.push_back(surface_from_fields(fields, l, {Scheme::Hirota, data.id(), {}}));
    }
    return out;
}

double sup_distance(const Grid2<Su2Vector>& p, const Grid2<Su2Vector>& q) {
    if (p.nx() != q.nx() || p.ny() != q.ny()) throw ValidationError("sup_distance: shapes differ");
    double worst = 0.0;
    for (std::size_t k = 0; k < p.data().size(); ++k) {
        const double d = (p.data()[k] - q.data()[k]).norm();
        if (!(d <= worst)) worst = d;  // NaN propagates
    }
    return worst;
}

void export_obj(const SurfaceMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    const int nx = mesh.points.nx(), ny = mesh.points.ny();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Su2Vector& v = mesh.points(i, j);
            out << "v " << fmt17(v.x1) << ' ' << fmt17(v.x2) << ' ' << fmt17(v.x3) << '\n';
        }
    }
    auto idx = [nx](int i, int j) { return static_cast<long long>(j) * nx + i + 1; };
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i)
            out << "f " << idx(i, j) << ' ' << idx(i + 1, j) << ' ' << idx(i + 1, j + 1) << ' ' << idx(i, j + 1)
                << '\n';
    if (!out) throw IoError("write failed: " + path);
}

std::vector<Su2Vector> read_obj_vertices(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Su2Vector> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) != 0) continue;
        std::istringstream ss(line.substr(2));
        std::string t[3];
        if (!(ss >> t[0] >> t[1] >> t[2])) throw ValidationError("malformed vertex line in " + path + ": " + line);
        out.push_back({std::stod(t[0]), std::stod(t[1]), std::stod(t[2])});
    }
    return out;
}

void write_meta(const SurfaceMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "eps=" << fmt17(mesh.eps()) << '\n'
        << "lambda=" << fmt17(mesh.lambda) << '\n'
        << "r=" << fmt17(mesh.domain.r()) << '\n'
        << "scheme=" << to_string(mesh.provenance.scheme) << '\n'
        << "bt_chain=" << format_chain(mesh.provenance.bt_chain) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace dgoursat
