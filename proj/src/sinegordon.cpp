#include "dgoursat/sinegordon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dgoursat/format.hpp"

namespace dgoursat {

namespace {

// For w = 1 - rho e^{i psi} with 0 <= rho < 1,
//   (1/i) log(conj(w)/w) = -2 arg(w),
// the principal logarithm of a ratio of conjugates on the right half-plane.
double log_conj_ratio_over_i(double rho, double psi) {
    return -2.0 * std::atan2(-rho * std::sin(psi), 1.0 - rho * std::cos(psi));
}

void require_finite(double v, const char* what, int i, int j, int z) {
    if (!std::isfinite(v))
        throw NumericalError(std::string("solve_goursat_3d: non-finite ") + what + " at (" + std::to_string(i) + "," +
                             std::to_string(j) + ") in layer " + std::to_string(z));
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::Naive ? "naive" : "hirota"; }

Scheme parse_scheme(const std::string& name) {
    if (name == "naive") return Scheme::Naive;
    if (name == "hirota") return Scheme::Hirota;
    throw ValidationError("unknown scheme `" + name + "` (expected naive or hirota)");
}

RhsPair continuous_rhs(double a, double b) { return {std::sin(b), a}; }

RhsPair naive_rhs(double a, double b, double /*eps*/) { return continuous_rhs(a, b); }

RhsPair hirota_rhs(double a, double b, double eps) {
    if (eps == 0.0) return continuous_rhs(a, b);
    if (!(eps > 0.0 && eps < 2.0))
        throw ValidationError("hirota_rhs: eps must lie in [0, 2) so that the log arguments stay in the right half-plane");
    const double rho = 0.25 * eps * eps;
    const double f = (2.0 / (eps * eps)) * log_conj_ratio_over_i(rho, b + 0.5 * eps * a);
    return {f, a + 0.5 * eps * f};
}

std::complex<double> hirota_f_complex(double a, double b, double eps) {
    if (!(eps > 0.0 && eps < 2.0)) throw ValidationError("hirota_f_complex: eps must lie in (0, 2)");
    using namespace std::complex_literals;
    const double rho = 0.25 * eps * eps;
    const double psi = b + 0.5 * eps * a;
    const std::complex<double> num = 1.0 - rho * std::exp(-1i * psi);
    const std::complex<double> den = 1.0 - rho * std::exp(1i * psi);
    // log(num/den) = log num - log den on the principal branch: both lie in the right
    // half-plane. The difference keeps the exact conjugate symmetry of num and den.
    return 2.0 / (1i * eps * eps) * (std::log(num) - std::log(den));
}

Rhs2 make_rhs(Scheme s) {
    if (s == Scheme::Naive)
        return {[](double a, double b, double e) { return naive_rhs(a, b, e).f; },
                [](double a, double b, double e) { return naive_rhs(a, b, e).g; }, 1.0, "naive"};
    return {[](double a, double b, double e) { return hirota_rhs(a, b, e).f; },
            [](double a, double b, double e) { return hirota_rhs(a, b, e).g; }, 1.0, "hirota"};
}

PhiField reconstruct_phi(const EdgeField2& fields, double phi00, Scheme scheme) {
    const LatticeDomain2& dom = fields.domain;
    const int n = dom.n();
    const double eps = dom.eps();
    if (fields.a.nx() != n || fields.a.ny() != n + 1 || fields.b.nx() != n + 1 || fields.b.ny() != n)
        throw ValidationError("reconstruct_phi: field shapes do not match the domain");

    PhiField out{GridField(n + 1, n + 1), dom, scheme};
    GridField& phi = out.phi;
    if (scheme == Scheme::Naive) {
        // phi = b on rows 0..n-1. The top-left value is not determined by (a, b); it is
        // extrapolated linearly, which only shifts the top row by a constant.
        for (int j = 0; j < n; ++j)
            for (int i = 0; i <= n; ++i) phi(i, j) = fields.b(i, j);
        if (n == 0) {
            phi(0, 0) = phi00;
            return out;
        }
        phi(0, n) = n >= 2 ? 2.0 * phi(0, n - 1) - phi(0, n - 2) : phi(0, n - 1);
        for (int i = 0; i < n; ++i) phi(i + 1, n) = phi(i, n) + eps * fields.a(i, n);
        return out;
    }
    phi(0, 0) = phi00;
    for (int i = 0; i < n; ++i) phi(i + 1, 0) = phi(i, 0) + eps * fields.a(i, 0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= n; ++i) phi(i, j + 1) = 2.0 * fields.b(i, j) - phi(i, j);
    return out;
}

EdgeField2 fields_from_phi(const PhiField& phi) {
    const LatticeDomain2& dom = phi.domain;
    const int n = dom.n();
    const double eps = dom.eps();
    EdgeField2 out(dom);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i) out.a(i, j) = (phi.phi(i + 1, j) - phi.phi(i, j)) / eps;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= n; ++i) {
            out.b(i, j) = phi.scheme == Scheme::Naive ? phi.phi(i, j) : 0.5 * (phi.phi(i, j + 1) + phi.phi(i, j));
        }
    }
    return out;
}

double phi_relation_residual(const PhiField& phi, const EdgeField2& fields) {
    const EdgeField2 back = fields_from_phi(phi);
    double worst = 0.0;
    for (std::size_t k = 0; k < back.a.data().size(); ++k)
        worst = std::max(worst, std::abs(back.a.data()[k] - fields.a.data()[k]));
    for (std::size_t k = 0; k < back.b.data().size(); ++k)
        worst = std::max(worst, std::abs(back.b.data()[k] - fields.b.data()[k]));
    return worst;
}

double second_order_residual(const PhiField& phi) {
    const int n = phi.domain.n();
    const double eps = phi.domain.eps();
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double p00 = phi.phi(i, j), p10 = phi.phi(i + 1, j);
            const double p01 = phi.phi(i, j + 1), p11 = phi.phi(i + 1, j + 1);
            double r;
            if (phi.scheme == Scheme::Naive) {
                r = (p11 - p10 - p01 + p00) / (eps * eps) - std::sin(p00);
            } else {
                r = std::sin(0.25 * (p11 - p10 - p01 + p00)) - 0.25 * eps * eps * std::sin(0.25 * (p11 + p10 + p01 + p00));
            }
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

std::vector<BacklundParam> read_backlund_chain(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<BacklundParam> chain;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        BacklundParam p;
        if (!(ss >> p.alpha)) continue;
        if (!(ss >> p.theta0)) throw ValidationError(path + ":" + std::to_string(lineno) + ": expected `alpha theta0`");
        if (!(p.alpha > 0.0)) throw ValidationError(path + ":" + std::to_string(lineno) + ": alpha must be positive");
        chain.push_back(p);
    }
    return chain;
}

std::string format_chain(std::span<const BacklundParam> chain) {
    std::string out;
    for (const auto& p : chain) {
        if (!out.empty()) out += ';';
        out += fmt17(p.alpha) + ":" + fmt17(p.theta0);
    }
    return out;
}

BacklundRates backlund_rhs_continuous(double a, double b, double theta, double alpha) {
    if (!(alpha > 0.0)) throw ValidationError("backlund_rhs_continuous: alpha must be positive");
    const double u = -a + alpha * std::sin(theta);
    return {u, std::sin(b + theta) / alpha, 2.0 * u, 2.0 * theta};
}

namespace {

void check_backlund_params(double alpha, double eps) {
    if (!(alpha > 0.0)) throw ValidationError("discrete Backlund transformation: alpha must be positive");
    if (!(eps > 0.0)) throw ValidationError("discrete Backlund transformation: eps must be positive");
    if (!(0.5 * eps * alpha < 1.0 && 0.5 * eps / alpha < 1.0))
        throw ValidationError("discrete Backlund transformation: need eps*alpha/2 < 1 and eps/(2 alpha) < 1 (eps=" +
                              fmt17(eps) + ", alpha=" + fmt17(alpha) + ")");
}

// delta_x theta = -a + (1/(i eps)) log[(1 - (eps alpha/2) e^{-i theta + i eps a/2}) / conj]
double discrete_u(double a, double theta, double alpha, double eps) {
    return -a + log_conj_ratio_over_i(0.5 * eps * alpha, theta - 0.5 * eps * a) / eps;
}

// delta_y theta = (1/(i eps)) log[(1 - (eps/(2 alpha)) e^{-ib - i theta}) / conj]
double discrete_v(double b, double theta, double alpha, double eps) {
    return log_conj_ratio_over_i(0.5 * eps / alpha, b + theta) / eps;
}

}  // namespace

BacklundRates backlund_rhs_discrete(double a, double b, double theta, double alpha, double eps) {
    check_backlund_params(alpha, eps);
    const double u = discrete_u(a, theta, alpha, eps);
    const double v = discrete_v(b, theta, alpha, eps);
    return {u, v, 2.0 * u, 2.0 * theta + eps * v};
}

double continuous_compatibility_residual(double a, double b, double theta, double alpha) {
    const auto [f, g] = continuous_rhs(a, b);
    const BacklundRates r = backlund_rhs_continuous(a, b, theta, alpha);
    // Partial derivatives of u, v, xi, eta.
    const double du_da = -1.0, du_dth = alpha * std::cos(theta);
    const double dv_db = std::cos(b + theta) / alpha, dv_dth = dv_db;
    const double dxi_da = -2.0, dxi_dth = 2.0 * alpha * std::cos(theta);
    const double deta_db = 0.0, deta_dth = 2.0;
    const RhsPair shifted = continuous_rhs(a + r.xi, b + r.eta);

    const double r1 = (du_da * f + du_dth * r.v) - (dv_db * g + dv_dth * r.u);
    const double r2 = (dxi_da * f + dxi_dth * r.v) - (shifted.f - f);
    const double r3 = (deta_db * g + deta_dth * r.u) - (shifted.g - g);
    return std::max({std::abs(r1), std::abs(r2), std::abs(r3)});
}

BacklundRhs discrete_backlund_rhs(double alpha) {
    if (!(alpha > 0.0)) throw ValidationError("discrete_backlund_rhs: alpha must be positive");
    return {[alpha](double a, double th, double e) {
                check_backlund_params(alpha, e);
                return discrete_u(a, th, alpha, e);
            },
            [alpha](double b, double th, double e) {
                check_backlund_params(alpha, e);
                return discrete_v(b, th, alpha, e);
            },
            [alpha](double a, double th, double e) {
                check_backlund_params(alpha, e);
                return 2.0 * discrete_u(a, th, alpha, e);
            },
            [alpha](double b, double th, double e) {
                check_backlund_params(alpha, e);
                return 2.0 * th + e * discrete_v(b, th, alpha, e);
            }};
}

std::vector<BacklundStep> discrete_backlund_chain(std::span<const BacklundParam> chain) {
    std::vector<BacklundStep> steps;
    steps.reserve(chain.size());
    for (const auto& p : chain) steps.push_back({discrete_backlund_rhs(p.alpha), p.theta0});
    return steps;
}

double check_compatibility_3d(const Rhs2& planar, const BacklundRhs& bt, std::span<const std::array<double, 3>> samples,
                              double eps) {
    double worst = 0.0;
    for (const auto& [a, b, th] : samples) {
        const double f = planar.f(a, b, eps), g = planar.g(a, b, eps);
        const double u = bt.u(a, th, eps), v = bt.v(b, th, eps);
        const double xi = bt.xi(a, th, eps), eta = bt.eta(b, th, eps);
        const double a_y = a + eps * f, b_x = b + eps * g;
        const double th_y = th + eps * v, th_x = th + eps * u;
        const double a_z = a + xi, b_z = b + eta;

        const double r1 = (bt.u(a_y, th_y, eps) - u) - (bt.v(b_x, th_x, eps) - v);
        const double r2 = (bt.xi(a_y, th_y, eps) - xi) - (eps * planar.f(a_z, b_z, eps) - eps * f);
        const double r3 = (bt.eta(b_x, th_x, eps) - eta) - (eps * planar.g(a_z, b_z, eps) - eps * g);
        for (double r : {r1, r2, r3}) {
            if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

LayeredField3 solve_goursat_3d(const Rhs2& planar, std::span<const BacklundStep> steps, const GoursatData2& data,
                               const LatticeDomain2& dom) {
    const int n = dom.n();
    const double eps = dom.eps();
    LayeredField3 out{dom, {}, {}, {}, {}};
    out.layers.reserve(steps.size() + 1);
    out.layers.push_back(solve_goursat_2d(planar, data, dom));

    for (std::size_t z = 0; z < steps.size(); ++z) {
        const BacklundRhs& bt = steps[z].rhs;
        const EdgeField2& cur = out.layers[z];
        const int zi = static_cast<int>(z);

        GridField theta(n + 1, n + 1);
        theta(0, 0) = steps[z].theta0;
        require_finite(theta(0, 0), "theta", 0, 0, zi);
        for (int i = 0; i < n; ++i) {
            theta(i + 1, 0) = theta(i, 0) + eps * bt.u(cur.a(i, 0), theta(i, 0), eps);
            require_finite(theta(i + 1, 0), "theta", i + 1, 0, zi);
        }
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i <= n; ++i) {
                theta(i, j + 1) = theta(i, j) + eps * bt.v(cur.b(i, j), theta(i, j), eps);
                require_finite(theta(i, j + 1), "theta", i, j + 1, zi);
            }
        }
        double mismatch = 0.0;
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const double other = theta(i, j + 1) + eps * bt.u(cur.a(i, j + 1), theta(i, j + 1), eps);
                mismatch = std::max(mismatch, std::abs(other - theta(i + 1, j + 1)));
                if (!(mismatch <= kIncompatibilityTol))
                    throw NumericalError("solve_goursat_3d: theta cross-propagation mismatch " + fmt17(mismatch) +
                                         " at cell (" + std::to_string(i) + "," + std::to_string(j) + ") in layer " +
                                         std::to_string(z) + " (incompatible system)");
            }
        }

        EdgeField2 next(dom);
        for (int j = 0; j <= n; ++j) {
            for (int i = 0; i < n; ++i) {
                next.a(i, j) = cur.a(i, j) + bt.xi(cur.a(i, j), theta(i, j), eps);
                require_finite(next.a(i, j), "a", i, j, zi + 1);
            }
        }
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i <= n; ++i) {
                next.b(i, j) = cur.b(i, j) + bt.eta(cur.b(i, j), theta(i, j), eps);
                require_finite(next.b(i, j), "b", i, j, zi + 1);
            }
        }
        const double residual = recursion_residual(planar, next);
        if (!(residual <= kIncompatibilityTol))
            throw NumericalError("solve_goursat_3d: transformed layer " + std::to_string(z + 1) +
                                 " violates the planar recursion by " + fmt17(residual) + " (incompatible system)");

        out.theta.push_back(std::move(theta));
        out.theta_mismatch.push_back(mismatch);
        out.layer_residual.push_back(residual);
        out.layers.push_back(std::move(next));
    }
    return out;
}

}  // namespace dgoursat
