#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

#include "dgoursat/format.hpp"
#include "dgoursat/harness.hpp"
#include "dgoursat/sinegordon.hpp"
#include "dgoursat/surfaces.hpp"

namespace dgoursat {

namespace {

constexpr double kResidualTol = 1e-9;
constexpr double kCompatibilityTol = 1e-11;

struct Common {
    double r = 1.0;
    std::optional<double> eps;
    std::optional<int> k;
    std::string scheme = "hirota";
    double lambda = 1.0;
    std::string data = "demo";
    std::string out = "dgoursat";
    int threads = 0;
};

void add_data_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--data", c.data, "demo, zero, or a prefix P with files P_a0.txt and P_b0.txt")
        ->capture_default_str();
}

LatticeDomain2 make_domain(const Common& c) {
    if (c.eps) return LatticeDomain2(c.r, *c.eps);
    return LatticeDomain2::dyadic(c.r, c.k.value_or(6));
}

GoursatData2 make_data(const std::string& name) {
    if (name == "demo") return GoursatData2::demo();
    if (name == "zero") return GoursatData2::zero();
    return GoursatData2::tabulated(read_table(name + "_a0.txt"), read_table(name + "_b0.txt"), name);
}

std::vector<BacklundParam> make_chain(const std::vector<double>& alpha, const std::vector<double>& theta0,
                                      const std::string& file) {
    if (!file.empty()) {
        if (!alpha.empty() || !theta0.empty()) throw ValidationError("--chain cannot be combined with --alpha/--theta0");
        return read_backlund_chain(file);
    }
    if (!theta0.empty() && theta0.size() != alpha.size())
        throw ValidationError("--theta0 needs one value per --alpha (" + std::to_string(alpha.size()) + " given)");
    std::vector<BacklundParam> chain;
    for (std::size_t z = 0; z < alpha.size(); ++z) {
        if (!(alpha[z] > 0.0)) throw ValidationError("--alpha values must be positive");
        chain.push_back({alpha[z], theta0.empty() ? 0.0 : theta0[z]});
    }
    return chain;
}

int resolve_threads(int t) {
    if (t < 0) throw ValidationError("--threads must be >= 0");
    if (t == 0) return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return t;
}

void print_report(std::ostream& out, const KSurfaceReport& rep) {
    out << "edge_residual=" << fmt17(rep.edge) << '\n'
        << "planarity_residual=" << fmt17(rep.planarity) << '\n'
        << "angle_residual=" << fmt17(rep.angle) << '\n'
        << "angle_sum_residual=" << fmt17(rep.angle_sum) << '\n'
        << "degenerate_sites=" << rep.degenerate_sites << '\n';
}

int check_report(const KSurfaceReport& rep, std::ostream& err) {
    if (rep.max_residual() <= kResidualTol) return 0;
    err << "error: surface residual " << fmt17(rep.max_residual()) << " exceeds " << fmt17(kResidualTol) << '\n';
    return 2;
}

int cmd_solve(const Common& c, std::ostream& out) {
    const Scheme scheme = parse_scheme(c.scheme);
    const LatticeDomain2 dom = make_domain(c);
    const GoursatData2 data = make_data(c.data);
    const Rhs2 rhs = make_rhs(scheme);
    const EdgeField2 f = solve_goursat_2d(rhs, data, dom);
    const PhiField phi = reconstruct_phi(f, data.b0(0.0), scheme);
    write_grid_csv(c.out + "_a.csv", f.a, dom);
    write_grid_csv(c.out + "_b.csv", f.b, dom);
    write_grid_csv(c.out + "_phi.csv", phi.phi, dom);
    out << "scheme=" << to_string(scheme) << " eps=" << fmt17(dom.eps()) << " n=" << dom.n() << '\n'
        << "recursion_residual=" << fmt17(recursion_residual(rhs, f)) << '\n'
        << "wrote " << c.out << "_a.csv " << c.out << "_b.csv " << c.out << "_phi.csv\n";
    return 0;
}

int cmd_surface(const Common& c, std::ostream& out, std::ostream& err) {
    const Scheme scheme = parse_scheme(c.scheme);
    if (scheme != Scheme::Hirota)
        throw ValidationError("surface: the naive scheme defines no discrete surface; use --scheme hirota");
    const LatticeDomain2 dom = make_domain(c);
    const GoursatData2 data = make_data(c.data);
    const SurfaceMesh mesh = build_surface(data, dom, c.lambda);
    const EdgeField2 f = solve_goursat_2d(make_rhs(Scheme::Hirota), data, dom);
    const KSurfaceReport rep = validate_k_surface(mesh, reconstruct_phi(f, data.b0(0.0), Scheme::Hirota));
    export_obj(mesh, c.out + ".obj");
    write_meta(mesh, c.out + ".meta");
    print_report(out, rep);
    out << "wrote " << c.out << ".obj " << c.out << ".meta\n";
    return check_report(rep, err);
}

int cmd_backlund(const Common& c, const std::vector<BacklundParam>& chain, std::ostream& out, std::ostream& err) {
    if (parse_scheme(c.scheme) != Scheme::Hirota)
        throw ValidationError("backlund: the discrete Backlund transformation pairs with the hirota scheme only");
    if (chain.empty()) throw ValidationError("backlund: give at least one --alpha (or --chain)");
    const LatticeDomain2 dom = make_domain(c);
    for (const auto& p : chain) {
        if (!(0.5 * dom.eps() * p.alpha < 1.0) || !(0.5 * dom.eps() / p.alpha < 1.0))
            throw ValidationError("backlund: alpha=" + fmt17(p.alpha) + " is outside the admissible range for eps=" +
                                  fmt17(dom.eps()));
    }
    const GoursatData2 data = make_data(c.data);
    const BacklundSurfaceResult res = backlund_surface(data, dom, chain, c.lambda);
    int code = 0;
    for (std::size_t z = 0; z < res.layers.size(); ++z) {
        const std::string name = c.out + "_layer" + std::to_string(z);
        export_obj(res.layers[z], name + ".obj");
        write_meta(res.layers[z], name + ".meta");
        out << "layer " << z << ": wrote " << name << ".obj\n";
        if (z == 0) continue;
        const DisplacementStats& d = res.displacement[z - 1];
        out << "  route_residual=" << fmt17(res.route_residual[z - 1]) << '\n'
            << "  displacement_mean=" << fmt17(d.mean) << " rel_stddev=" << fmt17(d.rel_stddev) << '\n';
        if (!(res.route_residual[z - 1] <= 1e-8)) {
            err << "error: layer " << z << " two-route residual " << fmt17(res.route_residual[z - 1]) << '\n';
            code = 2;
        }
    }
    return code;
}

int cmd_converge(SweepConfig cfg, const Common& c, const std::string& quantity, std::ostream& out) {
    cfg.r = c.r;
    cfg.quantity = parse_quantity(quantity);
    cfg.scheme = parse_scheme(c.scheme);
    cfg.lambda = c.lambda;
    cfg.threads = resolve_threads(c.threads);
    cfg.validate();
    const GoursatData2 data = make_data(c.data);
    const ConvergenceReport rep = run_sweep(cfg, data);
    const std::string path = c.out + ".csv";
    emit_report(rep, path);
    out << "epsilon,error\n";
    for (const auto& row : rep.rows) out << fmt17(row.eps) << ',' << fmt17(row.error) << '\n';
    out << "# slope=" << fmt17(rep.slope) << '\n' << "# intercept=" << fmt17(rep.intercept) << '\n';
    if (rep.degenerate) out << "# degenerate: all errors below 1e-13\n";
    out << "# wrote " << path << '\n';
    return 0;
}

int cmd_check(const std::string& scheme_name, int samples, unsigned seed, double range, const std::vector<double>& alphas,
              std::ostream& out, std::ostream& err) {
    const Scheme scheme = parse_scheme(scheme_name);
    if (samples < 1) throw ValidationError("--samples must be positive");
    if (!(range > 0.0)) throw ValidationError("--range must be positive");
    for (double a : alphas)
        if (!(a > 0.0)) throw ValidationError("--alpha values must be positive");
    const Rhs2 planar = make_rhs(scheme);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-range, range);
    std::vector<std::array<double, 3>> pts(static_cast<std::size_t>(samples));
    for (auto& p : pts) p = {U(rng), U(rng), U(rng)};
    double worst = 0.0;
    for (double k : {3.0, 6.0}) {
        const double eps = std::ldexp(1.0, -static_cast<int>(k));
        for (double a : alphas) {
            const double r = check_compatibility_3d(planar, discrete_backlund_rhs(a), pts, eps);
            out << "scheme=" << to_string(scheme) << " eps=" << fmt17(eps) << " alpha=" << fmt17(a)
                << " residual=" << fmt17(r) << '\n';
            worst = std::max(worst, r);
        }
    }
    out << "max_residual=" << fmt17(worst) << '\n';
    if (worst <= kCompatibilityTol) return 0;
    err << "error: compatibility residual " << fmt17(worst) << " exceeds " << fmt17(kCompatibilityTol) << '\n';
    return 2;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discrete sine-Gordon Goursat problems, discrete K-surfaces and convergence sweeps"};
    app.require_subcommand(1);

    Common c;
    auto* solve = app.add_subcommand("solve", "Solve the Goursat problem and write a, b, phi as CSV");
    auto* surface = app.add_subcommand("surface", "Build a discrete K-surface and export OBJ + meta");
    auto* backlund = app.add_subcommand("backlund", "Apply a chain of Backlund transformations to a surface");
    auto* converge = app.add_subcommand("converge", "Run an eps sweep and fit the log-log slope");
    auto* check = app.add_subcommand("check", "Check 3D compatibility of the planar scheme with the Backlund step");

    for (auto* cmd : {solve, surface, backlund, converge}) {
        cmd->add_option("--r", c.r, "Side of the square domain [0,r]^2")->capture_default_str();
        add_data_flags(cmd, c);
        cmd->add_option("--out", c.out, "Output path prefix")->capture_default_str();
    }
    for (auto* cmd : {solve, surface, backlund}) {
        auto* e = cmd->add_option("--eps", c.eps, "Mesh size (r/eps must be an integer)");
        auto* k = cmd->add_option("--k", c.k, "Dyadic mesh size eps = 2^-k (default 6)");
        e->excludes(k);
        k->excludes(e);
    }
    for (auto* cmd : {solve, converge, check})
        cmd->add_option("--scheme", c.scheme, "naive or hirota")->capture_default_str();
    for (auto* cmd : {surface, backlund})
        cmd->add_option("--scheme", c.scheme, "hirota (naive is rejected)")->capture_default_str();
    for (auto* cmd : {surface, backlund, converge})
        cmd->add_option("--lambda", c.lambda, "Spectral parameter")->capture_default_str();

    std::vector<double> alpha, theta0;
    std::string chain_file;
    for (auto* cmd : {backlund, converge}) {
        cmd->add_option("--alpha", alpha, "Backlund parameters, one per layer");
        cmd->add_option("--theta0", theta0, "theta at the origin, one per layer (default 0)");
        cmd->add_option("--chain", chain_file, "File with one `alpha theta0` pair per line");
    }

    SweepConfig cfg;
    std::string quantity = "surface";
    std::string field = "a";
    converge->add_option("--quantity", quantity, "fields_ab, phi, surface, surface_bt or quotients")
        ->capture_default_str();
    converge->add_option("--kmin", cfg.k_min, "Coarsest level")->capture_default_str();
    converge->add_option("--kmax", cfg.k_max, "Finest swept level")->capture_default_str();
    converge->add_option("--kref", cfg.k_ref, "Reference level (>= kmax + 2)")->capture_default_str();
    converge->add_option("--field", field, "Field for quotients: a or b")->capture_default_str();
    converge->add_option("--qx", cfg.qx, "Order of the x difference quotient")->capture_default_str();
    converge->add_option("--qy", cfg.qy, "Order of the y difference quotient")->capture_default_str();
    converge->add_option("--threads", c.threads, "Worker threads (0 = hardware, 1 = sequential)")
        ->capture_default_str();

    int samples = 10000;
    unsigned seed = 1;
    double range = 3.0;
    std::vector<double> check_alphas = {0.5, 1.0, 2.0};
    check->add_option("--samples", samples, "Random (a, b, theta) samples")->capture_default_str();
    check->add_option("--seed", seed, "RNG seed")->capture_default_str();
    check->add_option("--range", range, "Samples are uniform in [-range, range]^3")->capture_default_str();
    check->add_option("--alpha", check_alphas, "Backlund parameters to test");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*solve) return cmd_solve(c, out);
        if (*surface) return cmd_surface(c, out, err);
        if (*backlund) return cmd_backlund(c, make_chain(alpha, theta0, chain_file), out, err);
        if (*converge) {
            if (field.size() != 1) throw ValidationError("--field must be a or b");
            cfg.quotient_field = field[0];
            cfg.bt_chain = make_chain(alpha, theta0, chain_file);
            return cmd_converge(cfg, c, quantity, out);
        }
        if (*check) return cmd_check(c.scheme, samples, seed, range, check_alphas, out, err);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace dgoursat
