#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dgoursat/error.hpp"

namespace dgoursat {

/// Square lattice [0,r]^eps x [0,r]^eps with n = r/eps cells per axis.
class LatticeDomain2 {
public:
    LatticeDomain2(double r, double eps);

    /// eps = 2^-k
    static LatticeDomain2 dyadic(double r, int k);

    double r() const { return r_; }
    double eps() const { return eps_; }
    int n() const { return n_; }
    double coord(int i) const { return i * eps_; }

    bool operator==(const LatticeDomain2&) const = default;

private:
    double r_;
    double eps_;
    int n_;
};

/// Dense 2D array indexed (i, j), i along x. Stored row by row (j outer).
template <class T>
class Grid2 {
public:
    Grid2() = default;
    Grid2(int nx, int ny, const T& fill = T{})
        : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), fill) {
        if (nx < 0 || ny < 0) throw ValidationError("Grid2: negative extent");
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    bool empty() const { return data_.empty(); }
    bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }

    T& operator()(int i, int j) { return data_[index(i, j)]; }
    const T& operator()(int i, int j) const { return data_[index(i, j)]; }

    const T& at(int i, int j) const {
        if (!contains(i, j))
            throw ValidationError("Grid2::at: (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") outside " + std::to_string(nx_) + "x" + std::to_string(ny_));
        return data_[index(i, j)];
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool operator==(const Grid2&) const = default;

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
    }

    int nx_ = 0;
    int ny_ = 0;
    std::vector<T> data_;
};

using GridField = Grid2<double>;

/// Edge-attached unknowns: a(i,j) on the horizontal edge from (i eps, j eps),
/// shape n x (n+1); b(i,j) on the vertical edge from (i eps, j eps), shape (n+1) x n.
struct EdgeField2 {
    LatticeDomain2 domain;
    GridField a;
    GridField b;

    explicit EdgeField2(const LatticeDomain2& dom)
        : domain(dom), a(dom.n(), dom.n() + 1), b(dom.n() + 1, dom.n()) {}
};

/// Right-hand sides of  delta_y a = f(a, b; eps),  delta_x b = g(a, b; eps).
struct Rhs2 {
    std::function<double(double a, double b, double eps)> f;
    std::function<double(double a, double b, double eps)> g;
    double eps0 = 1.0;
    std::string name;
};

/// Goursat data a(x,0) = a0(x), b(0,y) = b0(y). Either closed-form functions or
/// tabulated samples that must hit lattice sites exactly.
class GoursatData2 {
public:
    using Fn = std::function<double(double)>;

    GoursatData2(Fn a0, Fn b0, std::string id = "custom");

    /// Tabulated data: strictly increasing x, looked up without interpolation.
    static GoursatData2 tabulated(std::vector<std::pair<double, double>> a0,
                                  std::vector<std::pair<double, double>> b0, std::string id = "tabulated");

    /// a0(x) = cos 2x, b0(y) = 1 + sin y
    static GoursatData2 demo();
    static GoursatData2 zero();
    static GoursatData2 constant(double a0, double b0);

    double a0(double x) const { return a0_(x); }
    double b0(double y) const { return b0_(y); }
    const std::string& id() const { return id_; }

    /// a0 at x = 0, eps, ..., (n-1) eps
    std::vector<double> sample_a(const LatticeDomain2& dom) const;
    /// b0 at y = 0, eps, ..., (n-1) eps
    std::vector<double> sample_b(const LatticeDomain2& dom) const;

private:
    Fn a0_;
    Fn b0_;
    std::string id_;
};

/// Reads one `x value` pair per line; '#' starts a comment.
std::vector<std::pair<double, double>> read_table(const std::string& path);

/// Solves the discrete Goursat problem on the whole domain by the edge recursion
///   a(x,y+eps) = a(x,y) + eps f(a(x,y), b(x,y)),  b(x+eps,y) = b(x,y) + eps g(a(x,y), b(x,y)).
/// Throws NumericalError naming the first site where a non-finite value appears.
EdgeField2 solve_goursat_2d(const Rhs2& rhs, const GoursatData2& data, const LatticeDomain2& dom);

/// Same recursion from explicit boundary samples (a_row.size() == n, b_col.size() == n).
EdgeField2 solve_goursat_2d(const Rhs2& rhs, const std::vector<double>& a_row, const std::vector<double>& b_col,
                            const LatticeDomain2& dom);

/// Largest residual of the two recursions over all cells.
double recursion_residual(const Rhs2& rhs, const EdgeField2& fields);

/// (p(x+eps,y) - p(x,y))/eps; result has one column fewer.
GridField delta_x(const GridField& p, double eps);
/// (p(x,y+eps) - p(x,y))/eps; result has one row fewer.
GridField delta_y(const GridField& p, double eps);

/// Discrete C^K norm: max over k+l <= K of sup |dx^k dy^l p| on Omega^eps(r - K eps).
/// p may be any grid function on the lattice (vertex or edge shaped).
double discrete_ck_norm(const GridField& p, int K, const LatticeDomain2& dom);

/// sup |p - q| at coincident sites of the coarse grid (p at eps) and fine grid (q at eps_fine).
double sup_error(const GridField& p, double eps, const GridField& q, double eps_fine);

/// Integer ratio eps / eps_fine; throws if the grids are not nested.
int nesting_ratio(double eps, double eps_fine);

// CSV: first line `# eps=<v> r=<v>`, header `i,j,value`, one row per entry.
void write_grid_csv(const std::string& path, const GridField& p, const LatticeDomain2& dom);
struct GridCsv {
    GridField grid;
    double eps = 0.0;
    double r = 0.0;
};
GridCsv read_grid_csv(const std::string& path);

}  // namespace dgoursat
