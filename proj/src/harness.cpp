#include "dgoursat/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "dgoursat/format.hpp"
#include "dgoursat/surfaces.hpp"

namespace dgoursat {

std::string to_string(Quantity q) {
    switch (q) {
        case Quantity::FieldsAB: return "fields_ab";
        case Quantity::Phi: return "phi";
        case Quantity::Surface: return "surface";
        case Quantity::SurfaceBT: return "surface_bt";
        case Quantity::Quotients: return "quotients";
    }
    return "?";
}

Quantity parse_quantity(const std::string& name) {
    for (Quantity q : {Quantity::FieldsAB, Quantity::Phi, Quantity::Surface, Quantity::SurfaceBT, Quantity::Quotients})
        if (name == to_string(q)) return q;
    throw ValidationError("unknown quantity '" + name + "' (expected fields_ab, phi, surface, surface_bt or quotients)");
}

void SweepConfig::validate() const {
    if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("sweep: r must be positive");
    if (k_min < 0) throw ValidationError("sweep: k_min must be >= 0");
    if (k_max < k_min) throw ValidationError("sweep: k_max must be >= k_min");
    if (k_ref < k_max + 2)
        throw ValidationError("sweep: k_ref=" + std::to_string(k_ref) + " must be at least k_max+2=" +
                              std::to_string(k_max + 2));
    if (k_ref > 14) throw ValidationError("sweep: k_ref above 14 needs more memory than this tool plans for");
    // r must be a multiple of the coarsest mesh size
    const double q = std::ldexp(r, k_min);
    if (std::abs(q - std::round(q)) > 1e-9 * q || std::round(q) < 1.0)
        throw ValidationError("sweep: r=" + fmt17(r) + " is not a multiple of 2^-" + std::to_string(k_min));
    if (threads < 1) throw ValidationError("sweep: threads must be >= 1");
    if (lambda == 0.0 || !std::isfinite(lambda)) throw ValidationError("sweep: lambda must be finite and nonzero");
    const bool surface = quantity == Quantity::Surface || quantity == Quantity::SurfaceBT;
    if (surface && scheme != Scheme::Hirota)
        throw ValidationError("sweep: surfaces need the hirota scheme (the naive scheme defines no surface)");
    if (quantity == Quantity::SurfaceBT) {
        if (bt_chain.empty()) throw ValidationError("sweep: surface_bt needs at least one Backlund parameter pair");
        for (const auto& p : bt_chain) {
            if (!(p.alpha > 0.0)) throw ValidationError("sweep: alpha must be positive");
            const double e = std::ldexp(1.0, -k_min);
            if (!(0.5 * e * p.alpha < 1.0) || !(0.5 * e / p.alpha < 1.0))
                throw ValidationError("sweep: alpha=" + fmt17(p.alpha) + " too extreme for eps=" + fmt17(e));
        }
    } else if (!bt_chain.empty()) {
        throw ValidationError("sweep: a Backlund chain only applies to surface_bt");
    }
    if (quantity == Quantity::Quotients) {
        if (quotient_field != 'a' && quotient_field != 'b') throw ValidationError("sweep: quotient field must be a or b");
        if (qx < 0 || qy < 0) throw ValidationError("sweep: quotient orders must be >= 0");
        const int n_min = static_cast<int>(std::round(q));
        if (qx + qy >= n_min) throw ValidationError("sweep: quotient order too high for the coarsest grid");
    }
}

GridField subsample(const GridField& p, int s) {
    if (s < 1) throw ValidationError("subsample: stride must be >= 1");
    const int nx = p.nx() == 0 ? 0 : (p.nx() - 1) / s + 1;
    const int ny = p.ny() == 0 ? 0 : (p.ny() - 1) / s + 1;
    GridField out(nx, ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) out(i, j) = p(s * i, s * j);
    return out;
}

GridField difference_quotient(const GridField& p, int qx, int qy, double eps) {
    GridField q = p;
    for (int m = 0; m < qx; ++m) q = delta_x(q, eps);
    for (int m = 0; m < qy; ++m) q = delta_y(q, eps);
    return q;
}

namespace {

struct LevelData {
    std::vector<GridField> scalars;
    Grid2<Su2Vector> points;
};

LevelData compute_level(const SweepConfig& cfg, const GoursatData2& data, int k, int stride) {
    const LatticeDomain2 dom = LatticeDomain2::dyadic(cfg.r, k);
    LevelData out;
    if (cfg.quantity == Quantity::SurfaceBT) {
        const auto steps = discrete_backlund_chain(cfg.bt_chain);
        const LayeredField3 f3 = solve_goursat_3d(make_rhs(Scheme::Hirota), steps, data, dom);
        std::vector<double> alphas;
        for (const auto& p : cfg.bt_chain) alphas.push_back(p.alpha);
        out.points = strided_surface_points(f3.layers[0], cfg.lambda, stride, f3.theta, alphas);
        return out;
    }
    const EdgeField2 fields = solve_goursat_2d(make_rhs(cfg.scheme), data, dom);
    switch (cfg.quantity) {
        case Quantity::FieldsAB:
            out.scalars.push_back(subsample(fields.a, stride));
            out.scalars.push_back(subsample(fields.b, stride));
            break;
        case Quantity::Phi:
            out.scalars.push_back(subsample(reconstruct_phi(fields, data.b0(0.0), cfg.scheme).phi, stride));
            break;
        case Quantity::Quotients: {
            const GridField& p = cfg.quotient_field == 'a' ? fields.a : fields.b;
            out.scalars.push_back(subsample(difference_quotient(p, cfg.qx, cfg.qy, dom.eps()), stride));
            break;
        }
        case Quantity::Surface:
            out.points = strided_surface_points(fields, cfg.lambda, stride);
            break;
        case Quantity::SurfaceBT: break;
    }
    return out;
}

// Coarse site (i, j) meets reference site (t i, t j).
double point_error(const Grid2<Su2Vector>& p, const Grid2<Su2Vector>& ref, int t) {
    double worst = 0.0;
    for (int j = 0; j < p.ny(); ++j)
        for (int i = 0; i < p.nx(); ++i) {
            if (!ref.contains(t * i, t * j)) continue;
            const double d = (p(i, j) - ref(t * i, t * j)).norm();
            if (!(d <= worst)) worst = d;
        }
    return worst;
}

}  // namespace

ConvergenceReport run_sweep(const SweepConfig& cfg, const GoursatData2& data) {
    cfg.validate();
    const int levels = cfg.k_max - cfg.k_min + 1;
    const int ref_stride = 1 << (cfg.k_ref - cfg.k_max);

    // task 0 is the reference; it is the largest, so it starts first
    std::vector<LevelData> results(levels + 1);
    std::vector<std::exception_ptr> errors(levels + 1);
    auto task = [&](int t) {
        try {
            results[t] = t == 0 ? compute_level(cfg, data, cfg.k_ref, ref_stride)
                                : compute_level(cfg, data, cfg.k_min + t - 1, 1);
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };
    const int workers = std::min(cfg.threads, levels + 1);
    if (workers <= 1) {
        for (int t = 0; t <= levels; ++t) task(t);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int t = next++; t <= levels; t = next++) task(t);
            });
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    const LevelData& ref = results[0];
    const double eps_ref_sub = std::ldexp(1.0, -cfg.k_max);
    ConvergenceReport rep;
    for (int t = 1; t <= levels; ++t) {
        const int k = cfg.k_min + t - 1;
        const double eps = std::ldexp(1.0, -k);
        double err = 0.0;
        for (std::size_t m = 0; m < results[t].scalars.size(); ++m)
            err = std::max(err, sup_error(results[t].scalars[m], eps, ref.scalars[m], eps_ref_sub));
        if (!results[t].points.empty()) err = std::max(err, point_error(results[t].points, ref.points, 1 << (cfg.k_max - k)));
        rep.rows.push_back({eps, err});
    }
    rep.degenerate = std::all_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.error <= 1e-13; });
    if (rep.degenerate) {
        rep.slope = rep.intercept = std::numeric_limits<double>::quiet_NaN();
    } else {
        std::tie(rep.slope, rep.intercept) = fit_slope(rep.rows);
    }
    return rep;
}

std::pair<double, double> fit_slope(std::span<const ConvergenceRow> rows) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows)
        if (r.eps > 0.0 && r.error > 0.0 && std::isfinite(r.error)) pts.emplace_back(std::log(r.eps), std::log(r.error));
    if (pts.size() < 3)
        throw ValidationError("fit_slope: need at least 3 rows with positive error, got " + std::to_string(pts.size()));
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) throw ValidationError("fit_slope: all rows share the same eps");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

bool strictly_decreasing(const ConvergenceReport& rep) {
    for (std::size_t m = 1; m < rep.rows.size(); ++m)
        if (!(rep.rows[m].error < rep.rows[m - 1].error)) return false;
    return true;
}

void emit_report(const ConvergenceReport& rep, const std::string& path) {
    if (rep.rows.empty()) throw ValidationError("emit_report: report has no rows");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "epsilon,error\n";
    for (const auto& r : rep.rows) out << fmt17(r.eps) << ',' << fmt17(r.error) << '\n';
    out << "# slope=" << fmt17(rep.slope) << '\n' << "# intercept=" << fmt17(rep.intercept) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

ConvergenceReport read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    ConvergenceReport rep;
    std::string line;
    if (!std::getline(in, line) || line != "epsilon,error") throw ValidationError(path + ": missing header");
    bool have_slope = false, have_intercept = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# slope=", 0) == 0) {
            rep.slope = std::stod(line.substr(8));
            have_slope = true;
        } else if (line.rfind("# intercept=", 0) == 0) {
            rep.intercept = std::stod(line.substr(12));
            have_intercept = true;
        } else if (line[0] != '#') {
            const auto comma = line.find(',');
            if (comma == std::string::npos) throw ValidationError(path + ": malformed row '" + line + "'");
            rep.rows.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
        }
    }
    if (!have_slope || !have_intercept) throw ValidationError(path + ": missing slope or intercept footer");
    rep.degenerate = std::isnan(rep.slope);
    return rep;
}

}  // namespace dgoursat
