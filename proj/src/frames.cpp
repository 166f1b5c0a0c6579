#include "dgoursat/frames.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dgoursat/format.hpp"

namespace dgoursat {

namespace {

constexpr cplx I{0.0, 1.0};

void require_lambda(double lambda) {
    if (lambda == 0.0 || !std::isfinite(lambda)) throw ValidationError("spectral parameter lambda must be finite and nonzero");
}

void require_shapes(const EdgeField2& f) {
    const int n = f.domain.n();
    if (f.a.nx() != n || f.a.ny() != n + 1 || f.b.nx() != n + 1 || f.b.ny() != n)
        throw ValidationError("edge field shapes do not match the domain");
}

// Lax matrix together with its lambda-derivative.
struct LaxPair {
    C2x2 L;
    C2x2 dL;
};

LaxPair u_disc(double a, double lambda, double eps) {
    const double s = 1.0 + 0.25 * eps * eps * lambda * lambda;
    const double c = 1.0 / std::sqrt(s);
    const double dc = -0.25 * eps * eps * lambda * c * c * c;
    const cplx ph = std::polar(1.0, 0.5 * eps * a);
    const cplx off = -0.5 * I * eps * lambda;
    const cplx doff = -0.5 * I * eps;
    const C2x2 N{ph, off, off, std::conj(ph)};
    const C2x2 dN{0.0, doff, doff, 0.0};
    return {c * N, dc * N + c * dN};
}

LaxPair v_disc(double b, double lambda, double eps) {
    const double s = 1.0 + 0.25 * eps * eps / (lambda * lambda);
    const double c = 1.0 / std::sqrt(s);
    const double dc = 0.25 * eps * eps / (lambda * lambda * lambda) * c * c * c;
    const cplx eb = std::polar(1.0, b);
    const cplx k = 0.5 * I * eps / lambda;
    const cplx dk = -0.5 * I * eps / (lambda * lambda);
    const C2x2 M{1.0, k * eb, k * std::conj(eb), 1.0};
    const C2x2 dM{0.0, dk * eb, dk * std::conj(eb), 0.0};
    return {c * M, dc * M + c * dM};
}

}  // namespace

C2x2 lax_U_cont(double a, double lambda) {
    require_lambda(lambda);
    return 0.5 * I * C2x2{a, -lambda, -lambda, -a};
}

C2x2 lax_V_cont(double b, double lambda) {
    require_lambda(lambda);
    const cplx eb = std::polar(1.0, b);
    return 0.5 * I * C2x2{0.0, eb / lambda, std::conj(eb) / lambda, 0.0};
}

C2x2 lax_U_disc(double a, double lambda, double eps) {
    require_lambda(lambda);
    return u_disc(a, lambda, eps).L;
}

C2x2 lax_V_disc(double b, double lambda, double eps) {
    require_lambda(lambda);
    return v_disc(b, lambda, eps).L;
}

C2x2 lax_matrix(LaxKind kind, double value, double lambda, double eps) {
    switch (kind) {
        case LaxKind::UCont: return lax_U_cont(value, lambda);
        case LaxKind::VCont: return lax_V_cont(value, lambda);
        case LaxKind::UDisc: return lax_U_disc(value, lambda, eps);
        case LaxKind::VDisc: return lax_V_disc(value, lambda, eps);
    }
    throw ValidationError("lax_matrix: unknown kind");
}

C2x2 lax_dlambda(LaxKind kind, double value, double lambda, double eps) {
    require_lambda(lambda);
    switch (kind) {
        case LaxKind::UCont: return 0.5 * I * C2x2{0.0, -1.0, -1.0, 0.0};
        case LaxKind::VCont: {
            const cplx eb = std::polar(1.0, value);
            return (-1.0 / (lambda * lambda)) * (0.5 * I * C2x2{0.0, eb, std::conj(eb), 0.0});
        }
        case LaxKind::UDisc: return u_disc(value, lambda, eps).dL;
        case LaxKind::VDisc: return v_disc(value, lambda, eps).dL;
    }
    throw ValidationError("lax_dlambda: unknown kind");
}

CellResidual zero_curvature_worst_cell(const EdgeField2& fields, double lambda) {
    require_lambda(lambda);
    require_shapes(fields);
    const int n = fields.domain.n();
    const double eps = fields.domain.eps();
    CellResidual worst;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const C2x2 lhs = lax_U_disc(fields.a(i, j + 1), lambda, eps) * lax_V_disc(fields.b(i, j), lambda, eps);
            const C2x2 rhs = lax_V_disc(fields.b(i + 1, j), lambda, eps) * lax_U_disc(fields.a(i, j), lambda, eps);
            const double r = frobenius_norm(lhs - rhs);
            // NaN sticks once seen
            if (worst.i < 0 || (!std::isnan(worst.value) && !(r <= worst.value))) worst = {r, i, j};
        }
    }
    return worst;
}

double zero_curvature_residual(const EdgeField2& fields, double lambda) {
    return zero_curvature_worst_cell(fields, lambda).value;
}

FrameRowStepper::FrameRowStepper(const EdgeField2& fields, double lambda) : fields_(&fields), lambda_(lambda) {
    require_lambda(lambda);
    require_shapes(fields);
    const int n = fields.domain.n();
    const double eps = fields.domain.eps();
    current_.assign(static_cast<std::size_t>(n) + 1, FrameSample{});
    for (int i = 0; i < n; ++i) {
        const LaxPair u = u_disc(fields.a(i, 0), lambda, eps);
        current_[i + 1] = step(u.L, u.dL, current_[i]);
    }
}

void FrameRowStepper::advance() {
    if (done()) throw ValidationError("FrameRowStepper::advance: already at the top row");
    const double eps = fields_->domain.eps();
    for (std::size_t i = 0; i < current_.size(); ++i) {
        const LaxPair v = v_disc(fields_->b(static_cast<int>(i), row_), lambda_, eps);
        current_[i] = step(v.L, v.dL, current_[i]);
    }
    ++row_;
}

FrameField propagate_frame(const EdgeField2& fields, double lambda, PathOrder order, double zcc_tol) {
    require_lambda(lambda);
    require_shapes(fields);
    const int n = fields.domain.n();
    const double eps = fields.domain.eps();
    const CellResidual zcc = zero_curvature_worst_cell(fields, lambda);
    if (!(zcc.value <= zcc_tol))
        throw NumericalError("propagate_frame: zero-curvature residual " + fmt17(zcc.value) + " at cell (" +
                             std::to_string(zcc.i) + "," + std::to_string(zcc.j) + ") exceeds " + fmt17(zcc_tol));

    FrameField out{fields.domain, lambda, Grid2<FrameSample>(n + 1, n + 1)};
    auto& s = out.samples;
    if (order == PathOrder::XThenY) {
        FrameRowStepper stepper(fields, lambda);
        while (true) {
            const auto row = stepper.current();
            for (int i = 0; i <= n; ++i) s(i, stepper.row()) = row[i];
            if (stepper.done()) break;
            stepper.advance();
        }
        return out;
    }
    for (int j = 0; j < n; ++j) {
        const LaxPair v = v_disc(fields.b(0, j), lambda, eps);
        s(0, j + 1) = step(v.L, v.dL, s(0, j));
    }
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i < n; ++i) {
            const LaxPair u = u_disc(fields.a(i, j), lambda, eps);
            s(i + 1, j) = step(u.L, u.dL, s(i, j));
        }
    }
    return out;
}

double path_independence_residual(const EdgeField2& fields, double lambda) {
    const double inf = std::numeric_limits<double>::infinity();
    const FrameField xy = propagate_frame(fields, lambda, PathOrder::XThenY, inf);
    const FrameField yx = propagate_frame(fields, lambda, PathOrder::YThenX, inf);
    double worst = 0.0;
    for (std::size_t k = 0; k < xy.samples.data().size(); ++k)
        worst = std::max(worst, frobenius_norm(xy.samples.data()[k].psi - yx.samples.data()[k].psi));
    return worst;
}

double frame_equation_residual(const FrameField& frame, const EdgeField2& fields) {
    require_shapes(fields);
    const int n = fields.domain.n();
    const double eps = fields.domain.eps();
    if (frame.samples.nx() != n + 1 || frame.samples.ny() != n + 1)
        throw ValidationError("frame_equation_residual: frame and fields live on different lattices");
    const auto& s = frame.samples;
    double worst = 0.0;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i < n; ++i) {
            const C2x2 U = lax_U_disc(fields.a(i, j), frame.lambda, eps);
            worst = std::max(worst, frobenius_norm(s(i + 1, j).psi - U * s(i, j).psi));
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const C2x2 V = lax_V_disc(fields.b(i, j), frame.lambda, eps);
            worst = std::max(worst, frobenius_norm(s(i, j + 1).psi - V * s(i, j).psi));
        }
    }
    return worst;
}

Su2Vector sym_point(const FrameSample& sample, double lambda) {
    return su2_project(lambda * (sample.psi.inverse() * sample.dpsi));
}

C2x2 backlund_W(double theta, double alpha, double lambda) {
    const cplx et = std::polar(alpha, theta);
    return {et, -I * lambda, -I * lambda, std::conj(et)};
}

C2x2 backlund_W_dlambda() { return {0.0, -I, -I, 0.0}; }

FrameField transform_frame(const FrameField& frame, const GridField& theta, double alpha) {
    if (!(alpha > 0.0)) throw ValidationError("transform_frame: alpha must be positive");
    if (theta.nx() != frame.samples.nx() || theta.ny() != frame.samples.ny())
        throw ValidationError("transform_frame: theta and frame shapes differ");
    FrameField out = frame;
    const C2x2 dW = backlund_W_dlambda();
    auto& dst = out.samples.data();
    for (std::size_t k = 0; k < dst.size(); ++k) {
        const C2x2 W = backlund_W(theta.data()[k], alpha, frame.lambda);
        dst[k] = step(W, dW, frame.samples.data()[k]);
    }
    return out;
}

double intertwining_residual(const EdgeField2& base, const EdgeField2& transformed, const GridField& theta,
                             double alpha, double lambda) {
    require_shapes(base);
    require_shapes(transformed);
    const int n = base.domain.n();
    const double eps = base.domain.eps();
    if (theta.nx() != n + 1 || theta.ny() != n + 1) throw ValidationError("intertwining_residual: theta shape mismatch");
    double worst = 0.0;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i < n; ++i) {
            const C2x2 lhs = backlund_W(theta(i + 1, j), alpha, lambda) * lax_U_disc(base.a(i, j), lambda, eps);
            const C2x2 rhs = lax_U_disc(transformed.a(i, j), lambda, eps) * backlund_W(theta(i, j), alpha, lambda);
            worst = std::max(worst, frobenius_norm(lhs - rhs));
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const C2x2 lhs = backlund_W(theta(i, j + 1), alpha, lambda) * lax_V_disc(base.b(i, j), lambda, eps);
            const C2x2 rhs = lax_V_disc(transformed.b(i, j), lambda, eps) * backlund_W(theta(i, j), alpha, lambda);
            worst = std::max(worst, frobenius_norm(lhs - rhs));
        }
    }
    return worst;
}

}  // namespace dgoursat
