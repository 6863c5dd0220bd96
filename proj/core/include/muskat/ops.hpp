#pragma once

#include <array>
#include <cstddef>

#include "muskat/quadrature.hpp"
#include "muskat/spectral.hpp"
#include "muskat/weights.hpp"

namespace muskat {

// delta_a f = f - f(. - a), slope = delta_a f / |a|, s_h f = 2f - f(. - h) - f(. + h).
RealField delta(const RealField& f, const Vec2& a);
RealField slope(const RealField& f, const Vec2& a);
RealField second_diff(const RealField& f, const Vec2& h);

// Pointwise product formed on the 3/2-padded grid and truncated back.
RealField dealiased_product(const RealField& a, const RealField& b);

struct FieldResult {
    RealField value;
    QuadFlags flags;
};

// -L(f)f, the right-hand side of the interface equation, mean-free.
FieldResult muskat_rhs(const RealField& f, const QuadratureSpec& q);
// Same with the radial factor 1 - chi(|alpha| / eps).
FieldResult muskat_rhs_cutoff(const RealField& f, double eps, const QuadratureSpec& q);
// L(f)g for independent g.
FieldResult L_apply(const RealField& f, const RealField& g, const QuadratureSpec& q);

FieldResult elliptic_part(const RealField& f, const RealField& g, const QuadratureSpec& q);

struct DriftResult {
    std::array<RealField, 2> v;
    QuadFlags flags;
};
DriftResult drift(const RealField& f, const QuadratureSpec& q);

// M_alpha carries the |alpha|^-3 factor.
FieldResult remainder(const RealField& f, const RealField& g, const QuadratureSpec& q);

struct MuskatDecomposition {
    RealField p_part;
    std::array<RealField, 2> drift;
    RealField drift_term;   // V(f) . grad g
    RealField remainder;
    RealField total;        // L(f)g
    double residual = 0.0;  // |total - p - V.grad g - R| / |total| in L2
    QuadFlags flags;
};
MuskatDecomposition decomposition(const RealField& f, const RealField& g, const QuadratureSpec& q);

// |M_alpha| <= 6|alpha|^-3 |slope - a.grad f| + 3|alpha|^-3 |grad delta_alpha f| at every
// padded grid point and quadrature node.
struct BoundAudit {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double max_ratio = 0.0;
};
BoundAudit remainder_bound_audit(const RealField& f, const QuadratureSpec& q);

struct KernelIdentity {
    RealField lhs, rhs;
    double relerr = 0.0;
};
// lhs = -int <a.zeta>^-3 alpha.grad(slope g) dalpha/|alpha|^2,
// rhs =  int <a.zeta>^-3 delta_alpha g dalpha/|alpha|^3.
KernelIdentity kernel_identity_check(const Vec2& zeta, const RealField& g, const QuadratureSpec& q);

// The quadrature symbols of the finite-difference weighted Laplacian and of
// the Gagliardo double integral, built from the same alpha-nodes.
MultiplierTable weighted_fd_symbol(const Grid& g, const Weight& k, const QuadratureSpec& q);
MultiplierTable gagliardo_symbol(const Grid& g, double s, const QuadratureSpec& q);
// Constant making the kappa = 1 finite-difference operator equal |xi|^{3/2} phi(0).
double fd_laplacian_constant();

RealField weighted_fd_laplacian(const RealField& g, const Weight& k, const QuadratureSpec& q);

struct SeminormResult {
    double value = 0.0;
    QuadFlags flags;
};
// (int int |f(x) - f(y)|^2 / |x - y|^{2 + 2s} dx dy)^{1/2}
SeminormResult gagliardo_seminorm(const RealField& f, double s, const QuadratureSpec& q);

// sum_j R_j(V_j g) - V_j R_j g
RealField commutator_riesz_drift(const RealField& f, const RealField& g, const QuadratureSpec& q);
// <D>^{3/2,phi}(L(f)f) - L(f)(<D>^{3/2,phi} f)
RealField commutator_weighted(const RealField& f, const Weight& k, const QuadratureSpec& q);

// max |s_h(uv) - u s_h v - v s_h u + (delta_h u)(delta_h v) + (delta_-h u)(delta_-h v)|
// relative to max|u| max|v|, evaluated on a 2x oversampled grid so that the
// products are resolved.
double leibniz_audit(const RealField& u, const RealField& v, const Vec2& h);

}  // namespace muskat
