#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dgoursat/goursat.hpp"
#include "dgoursat/sinegordon.hpp"

namespace dgoursat {

/// Right-hand side of  delta_{x_i} a_k = f_(k,i)(a)  for one pair (k, i).
/// `deps` declares which fields f reads; the solver passes NaN for every other component.
struct EquationND {
    int field = 0;
    int dir = 0;
    std::function<double(std::span<const double> state)> f;
    std::vector<int> deps;
};

/// Discrete d-dimensional hyperbolic system. Directions are 0-based.
struct SystemSpecND {
    int N = 0;
    int d = 0;
    std::vector<std::vector<int>> E;  // evolution directions per field, sorted
    std::vector<double> eps;          // step per direction
    std::vector<EquationND> equations;
    std::vector<std::string> names;   // optional field names

    bool evolves(int k, int i) const;
    /// Complement of E[k].
    std::vector<int> D(int k) const;
    const EquationND& equation(int k, int i) const;

    /// Structural checks: sizes, nonempty E_k, positive steps, exactly one equation per (k, i in E_k).
    /// Throws ValidationError.
    void validate() const;
};

struct DependencyViolation {
    int field;
    int dir;
    int reads;
};

/// Pairs (k, i) whose declared dependency a_l violates E_k \ {i} subset of E_l.
std::vector<DependencyViolation> dependency_violations(const SystemSpecND& spec);
bool check_dependency(const SystemSpecND& spec);

/// Max over samples, fields k and pairs i != j in E_k of
///   | e_i f_ki(a) + e_j f_kj(a + e_i f_i(a)) - e_j f_kj(a) - e_i f_ki(a + e_j f_j(a)) |.
/// Non-finite values give +inf.
double check_identity(const SystemSpecND& spec, std::span<const std::vector<double>> samples);

/// Field k as a dense array over the lattice. Field k has n_i + 1 sites along each
/// direction of E_k and n_i along each direction of D_k (cell attachment). Linear index
/// runs with direction 0 fastest.
struct FieldND {
    std::vector<int> shape;
    std::vector<std::size_t> strides;
    std::vector<double> values;

    bool contains(std::span<const int> x) const;
    std::size_t index(std::span<const int> x) const;
    double at(std::span<const int> x) const { return values[index(x)]; }
};

struct StateND {
    std::vector<int> n;  // cells per direction
    std::vector<double> eps;
    std::vector<FieldND> fields;
    /// Largest mismatch between the chosen assignment and an alternative direction.
    double route_mismatch = 0.0;
    /// Number of sites at which alternatives were checked.
    std::size_t verified_sites = 0;
};

enum class SweepOrder {
    Lexicographic,  // direction 0 fastest
    Reverse,        // last direction fastest
    Hyperplane      // by sum of indices, lexicographic inside a hyperplane
};

enum class RouteRule {
    Smallest,  // define a site through the smallest i in E_k with x_i > 0
    Largest
};

struct SolveOptionsND {
    SweepOrder order = SweepOrder::Lexicographic;
    RouteRule route = RouteRule::Smallest;
    /// Alternatives are checked at every site up to this many sites, else at every 100th.
    std::size_t full_verify_limit = 200000;
    double mismatch_tol = 1e-9;
    int threads = 1;  // used by Hyperplane only
};

/// Goursat data of field k, a function of the lattice coordinates x_i = mu_i eps_i.
using DataFnND = std::function<double(std::span<const double> coords)>;

/// Solves the Goursat problem on prod [0, r_i]. Each site value is assigned exactly once.
/// Throws NumericalError on blow-up or when an alternative direction disagrees by more than
/// mismatch_tol; ValidationError for a bad spec (including failed dependency check).
StateND solve_goursat_nd(const SystemSpecND& spec, const std::vector<DataFnND>& data, const std::vector<double>& r,
                         const SolveOptionsND& opts = {});

/// Plain Hirota system on the plane: a (E = {1}), b (E = {0}).
SystemSpecND hirota_system_2d(double eps);

/// Sine-Gordon with one kind of discrete Backlund transformation as a third direction:
/// a (E = {1,2}), b (E = {0,2}), theta (E = {0,1}); steps (eps, eps, 1).
SystemSpecND sine_gordon_bt_system(double eps, double alpha);

/// Data for the encoding above: a0, b0 on the axes and theta0 per layer.
std::vector<DataFnND> sine_gordon_bt_data(const GoursatData2& data, std::vector<double> theta0);

/// Layer z of a and b of a 2D or 3D sine-Gordon state.
EdgeField2 edge_field_from_state(const StateND& st, const LatticeDomain2& dom, int z = 0);

/// One CSV per field at `<prefix>_<name>.csv`. First line `# field=<name> eps=<e1;..> n=<n1;..>`,
/// header `i1,...,id,value`. Returns the paths written.
std::vector<std::string> write_state_csv(const StateND& st, const SystemSpecND& spec, const std::string& prefix);

}  // namespace dgoursat
