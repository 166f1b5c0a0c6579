#pragma once

#include <span>
#include <vector>

#include "dgoursat/goursat.hpp"
#include "dgoursat/linalg2.hpp"

namespace dgoursat {

// Lax matrices of the sine-Gordon equation and their lattice versions.
//   U(a; l)  = (i/2) [[a, -l], [-l, -a]]
//   V(b; l)  = (i/2) [[0, e^{ib}/l], [e^{-ib}/l, 0]]
//   U_e(a; l) = (1 + e^2 l^2/4)^{-1/2} [[e^{i e a/2}, -i e l/2], [-i e l/2, e^{-i e a/2}]]
//   V_e(b; l) = (1 + e^2 l^-2/4)^{-1/2} [[1, (i e/(2l)) e^{ib}], [(i e/(2l)) e^{-ib}, 1]]
// All throw ValidationError for lambda == 0.

C2x2 lax_U_cont(double a, double lambda);
C2x2 lax_V_cont(double b, double lambda);
C2x2 lax_U_disc(double a, double lambda, double eps);
C2x2 lax_V_disc(double b, double lambda, double eps);

enum class LaxKind { UCont, VCont, UDisc, VDisc };

C2x2 lax_matrix(LaxKind kind, double value, double lambda, double eps);

/// Closed-form d/dlambda of lax_matrix, prefactors included.
C2x2 lax_dlambda(LaxKind kind, double value, double lambda, double eps);

/// Frame value and its lambda-derivative at one site.
struct FrameSample {
    C2x2 psi = C2x2::identity();
    C2x2 dpsi = C2x2::zero();
};

/// L * sample, differentiated by the product rule.
inline FrameSample step(const C2x2& L, const C2x2& dL, const FrameSample& s) {
    return {L * s.psi, dL * s.psi + L * s.dpsi};
}

struct FrameField {
    LatticeDomain2 domain;
    double lambda;
    Grid2<FrameSample> samples;
};

struct CellResidual {
    double value = 0.0;
    int i = -1;
    int j = -1;
};

/// Worst cell of || U_e(x,y+e) V_e(x,y) - V_e(x+e,y) U_e(x,y) ||_F.
CellResidual zero_curvature_worst_cell(const EdgeField2& fields, double lambda);
double zero_curvature_residual(const EdgeField2& fields, double lambda);

enum class PathOrder {
    XThenY,  // bottom row along x, then every column upward
    YThenX   // left column along y, then every row to the right
};

/// Default zero-curvature tolerance checked before propagation.
inline constexpr double kZeroCurvatureTol = 1e-10;

/// Solves Psi(x+e,y) = U_e Psi(x,y), Psi(x,y+e) = V_e Psi(x,y), Psi(0,0) = 1 together with
/// the lambda-derivative. Throws NumericalError naming the worst cell when the zero-curvature
/// residual of the fields exceeds zcc_tol.
FrameField propagate_frame(const EdgeField2& fields, double lambda, PathOrder order = PathOrder::XThenY,
                           double zcc_tol = kZeroCurvatureTol);

/// Largest || Psi_xy - Psi_yx ||_F over all sites (no zero-curvature pre-check).
double path_independence_residual(const EdgeField2& fields, double lambda);

/// Largest defect of the frame equations of `frame` against the Lax matrices of `fields`.
double frame_equation_residual(const FrameField& frame, const EdgeField2& fields);

/// Streams the XThenY frame one row at a time, so that a whole surface can be sampled
/// without holding the frame field in memory. Rows are bitwise identical to propagate_frame.
class FrameRowStepper {
public:
    FrameRowStepper(const EdgeField2& fields, double lambda);

    int row() const { return row_; }
    std::span<const FrameSample> current() const { return current_; }
    bool done() const { return row_ >= fields_->domain.n(); }
    void advance();

private:
    const EdgeField2* fields_;
    double lambda_;
    int row_ = 0;
    std::vector<FrameSample> current_;
};

/// Immersion point: 2 lambda Psi^{-1} dPsi read in R^3 through X = i (x1 s1 + x2 s2 + x3 s3).
/// With su2_project's (i/2) convention this is su2_project(lambda Psi^{-1} dPsi).
Su2Vector sym_point(const FrameSample& sample, double lambda);

/// W(theta; lambda) = [[alpha e^{i theta}, -i lambda], [-i lambda, alpha e^{-i theta}]]
C2x2 backlund_W(double theta, double alpha, double lambda);
/// dW/dlambda = [[0, -i], [-i, 0]]
C2x2 backlund_W_dlambda();

/// Psi~ = W(theta) Psi, dPsi~ = W_lambda Psi + W dPsi at every site.
FrameField transform_frame(const FrameField& frame, const GridField& theta, double alpha);

/// Largest defect of W(x+e,y) U_e(a) = U_e(a~) W(x,y) and W(x,y+e) V_e(b) = V_e(b~) W(x,y).
double intertwining_residual(const EdgeField2& base, const EdgeField2& transformed, const GridField& theta,
                             double alpha, double lambda);

}  // namespace dgoursat
