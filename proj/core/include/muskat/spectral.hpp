#pragma once

#include <array>
#include <functional>
#include <utility>

#include "muskat/grid.hpp"

namespace muskat {

using Vec2 = std::array<double, 2>;

// Forward transform with the 1/n^2 (mean-value) normalization.
SpectralField transform(const RealField& f);
// Real part of the inverse; exact for Hermitian coefficient arrays.
RealField inverse(const SpectralField& F);

// Table m(xi1, xi2) over the lattice.  Nyquist rows/columns are set to zero so
// real symbols stay Hermitian.
MultiplierTable make_multiplier(const Grid& g, const std::function<cplx(double, double)>& m);
// |xi|^s with the xi = 0 entry set to zero (homogeneous convention).
MultiplierTable abs_xi_power(const Grid& g, double s);

SpectralField apply_multiplier(const SpectralField& F, const MultiplierTable& m);

// Coefficients of x -> f(x - alpha).
SpectralField shift(const SpectralField& F, const Vec2& alpha);

std::array<SpectralField, 2> gradient(const SpectralField& F);
// Symbol i xi_j / |xi|, zero at xi = 0.
std::pair<SpectralField, SpectralField> riesz(const SpectralField& F);

// (sum |xi|^{2s} w^2 |f^|^2)^{1/2} in the unitary continuous normalization, so
// s = 0, w = 1 returns the L2 norm.  The xi = 0 mode is excluded.
double sobolev_norm(const SpectralField& F, double s, const MultiplierTable* w = nullptr);
// l^2 sum conj(a) b over the lattice, real part (Parseval pairing).
double spectral_inner(const SpectralField& a, const SpectralField& b);

// Zero every mode with |k_j| > kmax.
SpectralField band_limit(const SpectralField& F, int kmax);
// Energy fraction carried by modes with |k|_inf > kmax.
double energy_beyond(const SpectralField& F, int kmax);

// Samples of f on an (r n) x (r n) grid by zero-padded inverse transform.
std::vector<double> oversample(const SpectralField& F, int r);

// Trigonometric interpolant, value and gradient at an arbitrary point.
struct PointEval {
    double value;
    Vec2 grad;
};
PointEval evaluate_at(const SpectralField& F, const Vec2& x);

// Sup norms from 2x oversampled samples, refined by local search on the
// trigonometric interpolant around the leading candidates.
double sup_norm(const SpectralField& F);
double lip_norm(const SpectralField& F);

// f_lambda(x) = f(c + lambda (x - c)) / lambda on the same box, c its center.
// Throws if f is not negligible outside the preimage box (lambda < 1), or near
// the box edge or beyond the compressed band (lambda > 1).  Periodic images
// pulled in by compression are dropped.
RealField rescale_critical(const RealField& f, double lambda, double tol = 1e-8);

}  // namespace muskat
