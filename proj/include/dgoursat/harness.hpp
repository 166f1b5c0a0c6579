#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dgoursat/goursat.hpp"
#include "dgoursat/sinegordon.hpp"

namespace dgoursat {

enum class Quantity {
    FieldsAB,    // max of the a and b errors
    Phi,         // reconstructed vertex function
    Surface,     // Sym points at lambda
    SurfaceBT,   // Sym points of the last Backlund layer
    Quotients    // dx^qx dy^qy of field a or b
};

std::string to_string(Quantity q);
Quantity parse_quantity(const std::string& name);

struct SweepConfig {
    double r = 1.0;
    int k_min = 5;
    int k_max = 10;
    int k_ref = 12;
    Quantity quantity = Quantity::Surface;
    Scheme scheme = Scheme::Hirota;
    double lambda = 1.0;
    std::vector<BacklundParam> bt_chain;
    char quotient_field = 'a';
    int qx = 0;
    int qy = 0;
    int threads = 1;

    /// Throws ValidationError with a precise message.
    void validate() const;
};

struct ConvergenceRow {
    double eps;
    double error;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;  // decreasing eps
    double slope = 0.0;
    double intercept = 0.0;
    /// All errors below 1e-13; slope and intercept are NaN then.
    bool degenerate = false;
};

/// Errors at eps = 2^-k, k_min..k_max, against the k_ref solution at coincident sites.
ConvergenceReport run_sweep(const SweepConfig& cfg, const GoursatData2& data);

/// Least squares of ln(error) on ln(eps). Needs at least 3 rows with positive finite error.
std::pair<double, double> fit_slope(std::span<const ConvergenceRow> rows);

bool strictly_decreasing(const ConvergenceReport& rep);

/// CSV: `epsilon,error`, rows, then `# slope=` and `# intercept=`.
void emit_report(const ConvergenceReport& rep, const std::string& path);
ConvergenceReport read_report(const std::string& path);

/// Keeps p(s*i, s*j) for all i, j that stay inside p.
GridField subsample(const GridField& p, int s);

/// dx^qx dy^qy p at mesh size eps.
GridField difference_quotient(const GridField& p, int qx, int qy, double eps);

}  // namespace dgoursat
