#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dgoursat/goursat.hpp"

namespace dgoursat {

enum class Scheme { Naive, Hirota };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

struct RhsPair {
    double f;  // delta_y a
    double g;  // delta_x b
};

/// (sin b, a): the sine-Gordon equation with a = phi_x, b = phi.
RhsPair continuous_rhs(double a, double b);

/// Naive scheme; identical to the continuous right-hand side for every eps.
RhsPair naive_rhs(double a, double b, double eps);

/// Hirota scheme:
///   f = (2/(i eps^2)) log[(1 - (eps^2/4) e^{-ib - i eps a/2}) / (1 - (eps^2/4) e^{ib + i eps a/2})],
///   g = a + (eps/2) f.
/// Requires 0 <= eps < 2; eps == 0 returns the continuous limit.
RhsPair hirota_rhs(double a, double b, double eps);

/// The complex value of the Hirota log expression for f, evaluated literally.
std::complex<double> hirota_f_complex(double a, double b, double eps);

Rhs2 make_rhs(Scheme s);

struct PhiField {
    GridField phi;  // (n+1) x (n+1) vertex values, unwrapped angles
    LatticeDomain2 domain;
    Scheme scheme;
};

/// Recovers phi from edge fields.
///  Naive:  a = delta_x phi, b = phi.  phi00 is ignored (phi(0,0) = b(0,0)); the top row
///          comes from the a-recursion.
///  Hirota: a = delta_x phi on the bottom row, then phi(x,y+eps) = 2 b(x,y) - phi(x,y).
PhiField reconstruct_phi(const EdgeField2& fields, double phi00, Scheme scheme);

/// Max residual of the defining change of variables between phi and (a, b).
double phi_relation_residual(const PhiField& phi, const EdgeField2& fields);

/// Max residual of the second-order equation (naive: delta_x delta_y phi = sin phi;
/// Hirota: the quarter-sum sine relation) over all elementary squares.
double second_order_residual(const PhiField& phi);

/// (a, b) from phi through the change of variables of the scheme.
EdgeField2 fields_from_phi(const PhiField& phi);

// ---------------------------------------------------------------------------
// Backlund transformations

struct BacklundParam {
    double alpha = 1.0;
    double theta0 = 0.0;
};

/// Reads one `alpha theta0` pair per line.
std::vector<BacklundParam> read_backlund_chain(const std::string& path);
std::string format_chain(std::span<const BacklundParam> chain);

struct BacklundRates {
    double u;    // delta_x theta
    double v;    // delta_y theta
    double xi;   // a~ - a
    double eta;  // b~ - b
};

/// u = -a + alpha sin theta, v = sin(b + theta)/alpha, xi = 2u, eta = 2 theta.
BacklundRates backlund_rhs_continuous(double a, double b, double theta, double alpha);

/// Discrete transformation compatible with the Hirota scheme.
/// Requires eps*alpha/2 < 1 and eps/(2 alpha) < 1.
BacklundRates backlund_rhs_discrete(double a, double b, double theta, double alpha, double eps);

/// Residual of the three continuous compatibility identities for f = sin b, g = a,
/// evaluated with closed-form partial derivatives.
double continuous_compatibility_residual(double a, double b, double theta, double alpha);

/// The four functions of a Backlund step. u, xi read (a, theta); v, eta read (b, theta).
struct BacklundRhs {
    std::function<double(double a, double theta, double eps)> u;
    std::function<double(double b, double theta, double eps)> v;
    std::function<double(double a, double theta, double eps)> xi;
    std::function<double(double b, double theta, double eps)> eta;
};

BacklundRhs discrete_backlund_rhs(double alpha);

/// One layer transition: rates plus theta at the origin of the source layer.
struct BacklundStep {
    BacklundRhs rhs;
    double theta0 = 0.0;
};

std::vector<BacklundStep> discrete_backlund_chain(std::span<const BacklundParam> chain);

/// Max absolute defect of the three discrete compatibility identities over the samples
/// (each sample is (a, b, theta)).
double check_compatibility_3d(const Rhs2& planar, const BacklundRhs& bt, std::span<const std::array<double, 3>> samples,
                              double eps);

/// Fields a, b on layers 0..R and theta on layers 0..R-1.
struct LayeredField3 {
    LatticeDomain2 domain;
    std::vector<EdgeField2> layers;
    std::vector<GridField> theta;
    /// Largest disagreement between the two facet routes for theta, per transition.
    std::vector<double> theta_mismatch;
    /// Largest residual of the planar recursion on the transformed layer, per transition.
    std::vector<double> layer_residual;

    int R() const { return static_cast<int>(theta.size()); }
};

/// Tolerance above which a cross-propagation mismatch is treated as incompatibility.
inline constexpr double kIncompatibilityTol = 1e-9;

/// Layer 0 solves the planar Goursat problem. In layer z, theta starts at theta0(z), runs
/// along the bottom row with u and up every column with v. Layer z+1 is a + xi, b + eta
/// on every edge. Throws NumericalError on blow-up or when either cross-check exceeds
/// kIncompatibilityTol.
LayeredField3 solve_goursat_3d(const Rhs2& planar, std::span<const BacklundStep> steps, const GoursatData2& data,
                               const LatticeDomain2& dom);

}  // namespace dgoursat
