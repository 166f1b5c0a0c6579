#include "dgoursat/goursat.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dgoursat/format.hpp"

namespace dgoursat {

namespace {

bool nearly_equal(double x, double y) {
    return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x));
}

GoursatData2::Fn table_lookup(std::vector<std::pair<double, double>> table, std::string what) {
    for (std::size_t k = 1; k < table.size(); ++k) {
        if (!(table[k].first > table[k - 1].first))
            throw ValidationError(what + ": x values must be strictly increasing (line " + std::to_string(k + 1) + ")");
    }
    return [table = std::move(table), what = std::move(what)](double x) {
        auto it = std::lower_bound(table.begin(), table.end(), x,
                                   [](const auto& row, double v) { return row.first < v; });
        if (it != table.end() && nearly_equal(x, it->first)) return it->second;
        if (it != table.begin() && nearly_equal(x, std::prev(it)->first)) return std::prev(it)->second;
        throw ValidationError(what + ": no sample at grid site x=" + fmt17(x) + " (tabulated data is not interpolated)");
    };
}

[[noreturn]] void blow_up(const char* field, int i, int j, const LatticeDomain2& dom) {
    throw NumericalError(std::string("solve_goursat_2d: non-finite ") + field + " at site (" + std::to_string(i) + "," +
                         std::to_string(j) + ") = (" + fmt17(dom.coord(i)) + "," + fmt17(dom.coord(j)) + ")");
}

}  // namespace

LatticeDomain2::LatticeDomain2(double r, double eps) : r_(r), eps_(eps), n_(0) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("LatticeDomain2: eps must be positive and finite");
    if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("LatticeDomain2: r must be non-negative and finite");
    const double ratio = r / eps;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
        throw ValidationError("LatticeDomain2: r/eps must be an integer (r=" + fmt17(r) + ", eps=" + fmt17(eps) + ")");
    if (rounded > static_cast<double>(std::numeric_limits<int>::max() / 2))
        throw ValidationError("LatticeDomain2: too many cells");
    n_ = static_cast<int>(rounded);
}

LatticeDomain2 LatticeDomain2::dyadic(double r, int k) {
    if (k < 0 || k > 30) throw ValidationError("LatticeDomain2::dyadic: k must lie in [0, 30]");
    return LatticeDomain2(r, std::ldexp(1.0, -k));
}

GoursatData2::GoursatData2(Fn a0, Fn b0, std::string id) : a0_(std::move(a0)), b0_(std::move(b0)), id_(std::move(id)) {
    if (!a0_ || !b0_) throw ValidationError("GoursatData2: both a0 and b0 are required");
}

GoursatData2 GoursatData2::tabulated(std::vector<std::pair<double, double>> a0,
                                     std::vector<std::pair<double, double>> b0, std::string id) {
    return GoursatData2(table_lookup(std::move(a0), "a0 table"), table_lookup(std::move(b0), "b0 table"),
                        std::move(id));
}

GoursatData2 GoursatData2::demo() {
    return GoursatData2([](double x) { return std::cos(2.0 * x); }, [](double y) { return 1.0 + std::sin(y); }, "demo");
}

GoursatData2 GoursatData2::zero() { return constant(0.0, 0.0); }

GoursatData2 GoursatData2::constant(double a0, double b0) {
    return GoursatData2([a0](double) { return a0; }, [b0](double) { return b0; },
                        a0 == 0.0 && b0 == 0.0 ? "zero" : "constant");
}

std::vector<double> GoursatData2::sample_a(const LatticeDomain2& dom) const {
    std::vector<double> out(static_cast<std::size_t>(dom.n()));
    for (int i = 0; i < dom.n(); ++i) out[i] = a0_(dom.coord(i));
    return out;
}

std::vector<double> GoursatData2::sample_b(const LatticeDomain2& dom) const {
    std::vector<double> out(static_cast<std::size_t>(dom.n()));
    for (int j = 0; j < dom.n(); ++j) out[j] = b0_(dom.coord(j));
    return out;
}

std::vector<std::pair<double, double>> read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::pair<double, double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double x, v;
        if (!(ss >> x)) continue;
        if (!(ss >> v)) throw ValidationError(path + ":" + std::to_string(lineno) + ": expected `x value`");
        std::string rest;
        if (ss >> rest) throw ValidationError(path + ":" + std::to_string(lineno) + ": trailing tokens");
        rows.emplace_back(x, v);
    }
    return rows;
}

EdgeField2 solve_goursat_2d(const Rhs2& rhs, const GoursatData2& data, const LatticeDomain2& dom) {
    return solve_goursat_2d(rhs, data.sample_a(dom), data.sample_b(dom), dom);
}

EdgeField2 solve_goursat_2d(const Rhs2& rhs, const std::vector<double>& a_row, const std::vector<double>& b_col,
                            const LatticeDomain2& dom) {
    const int n = dom.n();
    if (static_cast<int>(a_row.size()) != n || static_cast<int>(b_col.size()) != n)
        throw ValidationError("solve_goursat_2d: boundary data length " + std::to_string(a_row.size()) + "/" +
                              std::to_string(b_col.size()) + " does not match n=" + std::to_string(n));
    if (!rhs.f || !rhs.g) throw ValidationError("solve_goursat_2d: incomplete right-hand side");
    const double eps = dom.eps();

    EdgeField2 out(dom);
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(a_row[i])) blow_up("a", i, 0, dom);
        out.a(i, 0) = a_row[i];
    }
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(b_col[j])) blow_up("b", 0, j, dom);
        out.b(0, j) = b_col[j];
    }
    // Each elementary square takes its bottom and left edges to its top and right edges.
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double a = out.a(i, j);
            const double b = out.b(i, j);
            const double an = a + eps * rhs.f(a, b, eps);
            const double bn = b + eps * rhs.g(a, b, eps);
            if (!std::isfinite(an)) blow_up("a", i, j + 1, dom);
            if (!std::isfinite(bn)) blow_up("b", i + 1, j, dom);
            out.a(i, j + 1) = an;
            out.b(i + 1, j) = bn;
        }
    }
    return out;
}

double recursion_residual(const Rhs2& rhs, const EdgeField2& fields) {
    const int n = fields.domain.n();
    const double eps = fields.domain.eps();
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double a = fields.a(i, j);
            const double b = fields.b(i, j);
            worst = std::max(worst, std::abs(fields.a(i, j + 1) - (a + eps * rhs.f(a, b, eps))));
            worst = std::max(worst, std::abs(fields.b(i + 1, j) - (b + eps * rhs.g(a, b, eps))));
        }
    }
    return worst;
}

GridField delta_x(const GridField& p, double eps) {
    if (p.nx() < 1) throw ValidationError("delta_x: grid has no columns");
    GridField out(p.nx() - 1, p.ny());
    for (int j = 0; j < p.ny(); ++j)
        for (int i = 0; i + 1 < p.nx(); ++i) out(i, j) = (p(i + 1, j) - p(i, j)) / eps;
    return out;
}

GridField delta_y(const GridField& p, double eps) {
    if (p.ny() < 1) throw ValidationError("delta_y: grid has no rows");
    GridField out(p.nx(), p.ny() - 1);
    for (int j = 0; j + 1 < p.ny(); ++j)
        for (int i = 0; i < p.nx(); ++i) out(i, j) = (p(i, j + 1) - p(i, j)) / eps;
    return out;
}

double discrete_ck_norm(const GridField& p, int K, const LatticeDomain2& dom) {
    if (K < 0) throw ValidationError("discrete_ck_norm: K must be non-negative");
    if (K > dom.n()) throw ValidationError("discrete_ck_norm: K*eps exceeds r");
    const int last = dom.n() - K;  // Omega^eps(r - K eps) covers indices 0..last
    double best = 0.0;
    GridField dx = p;
    for (int k = 0; k <= K; ++k) {
        GridField q = dx;
        for (int l = 0; k + l <= K; ++l) {
            for (int j = 0; j <= std::min(last, q.ny() - 1); ++j)
                for (int i = 0; i <= std::min(last, q.nx() - 1); ++i) best = std::max(best, std::abs(q(i, j)));
            if (k + l < K) q = delta_y(q, dom.eps());
        }
        if (k < K) dx = delta_x(dx, dom.eps());
    }
    return best;
}

int nesting_ratio(double eps, double eps_fine) {
    if (!(eps > 0.0) || !(eps_fine > 0.0)) throw ValidationError("nesting_ratio: mesh sizes must be positive");
    const double ratio = eps / eps_fine;
    const double m = std::round(ratio);
    if (m < 1.0 || std::abs(ratio - m) > 1e-9 * ratio)
        throw ValidationError("grids are not nested: eps=" + fmt17(eps) + " is not an integer multiple of " +
                              fmt17(eps_fine));
    return static_cast<int>(m);
}

double sup_error(const GridField& p, double eps, const GridField& q, double eps_fine) {
    const int m = nesting_ratio(eps, eps_fine);
    double worst = 0.0;
    for (int j = 0; j < p.ny(); ++j) {
        for (int i = 0; i < p.nx(); ++i) {
            if (!q.contains(m * i, m * j)) continue;
            worst = std::max(worst, std::abs(p(i, j) - q(m * i, m * j)));
        }
    }
    return worst;
}

void write_grid_csv(const std::string& path, const GridField& p, const LatticeDomain2& dom) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "# eps=" << fmt17(dom.eps()) << " r=" << fmt17(dom.r()) << "\n";
    out << "i,j,value\n";
    for (int j = 0; j < p.ny(); ++j)
        for (int i = 0; i < p.nx(); ++i) out << i << ',' << j << ',' << fmt17(p(i, j)) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

GridCsv read_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    GridCsv out;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# eps=", 0) != 0) throw ValidationError(path + ": missing metadata line");
    if (std::sscanf(line.c_str(), "# eps=%lf r=%lf", &out.eps, &out.r) != 2)
        throw ValidationError(path + ": malformed metadata line");
    if (!std::getline(in, line) || line != "i,j,value") throw ValidationError(path + ": missing header");
    struct Entry {
        int i, j;
        double v;
    };
    std::vector<Entry> entries;
    int nx = 0, ny = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Entry e{};
        if (std::sscanf(line.c_str(), "%d,%d,%lf", &e.i, &e.j, &e.v) != 3 || e.i < 0 || e.j < 0)
            throw ValidationError(path + ": malformed row `" + line + "`");
        nx = std::max(nx, e.i + 1);
        ny = std::max(ny, e.j + 1);
        entries.push_back(e);
    }
    out.grid = GridField(nx, ny);
    for (const auto& e : entries) out.grid(e.i, e.j) = e.v;
    return out;
}

}  // namespace dgoursat
