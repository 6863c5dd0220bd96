#pragma once

// Shared machinery of the alpha-quadrature: band-limited "lifted" spectra,
// shifted evaluation on the padded grid, per-angle accumulation with a fixed
// reduction tree, and far-field multipliers.

#include <array>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "fft.hpp"
#include "muskat/quadrature.hpp"
#include "muskat/spectral.hpp"

namespace muskat::detail {

// Coefficients on the band |k_j| <= K = n/2 - 1, half plane k2 >= 0,
// index (k1 + K) * (K + 1) + k2.
using Lifted = std::vector<cplx>;

struct Workspace {
    cvec half;
    std::vector<rvec> buf;
    Workspace(int m, int nbuf)
        : half(std::size_t(m) * (m / 2 + 1)), buf(nbuf, rvec(std::size_t(m) * m)) {}
};

// Per-angle far-field radial integrals on the padded half lattice, t = a . xi:
// i1s = int_R^inf sin(rt)/r, i2c = int cos(rt)/r^2, i3s = int sin(rt)/r^3,
// i4c = int cos(rt)/r^4.
struct AngleTails {
    std::vector<double> i1s, i2c, i3s, i4c;
};

class Engine {
public:
    Engine(const Grid& g, const QuadratureSpec& q);

    const Grid& grid() const { return g_; }
    const QuadratureSpec& spec() const { return q_; }
    int m() const { return m_; }
    std::size_t mm() const { return std::size_t(m_) * m_; }
    std::size_t mh() const { return std::size_t(m_) * (m_ / 2 + 1); }
    int K() const { return K_; }
    std::size_t nlift() const { return std::size_t(2 * K_ + 1) * (K_ + 1); }
    int n_angles() const { return q_.n_theta / 2; }
    double dtheta() const;
    const Vec2& dir(int j) const { return dir_[j]; }
    // inner rule on [r_min, split]; outer rule on [split, R], empty when split = R
    const RadialRule& rule() const { return rule_; }
    const RadialRule& outer() const { return outer_; }
    double split() const { return rule_.r.back(); }
    double R() const { return R_; }

    Lifted lift(const SpectralField& F) const;
    SpectralField unlift(const Lifted& L) const;
    // multiply by i (a . xi)
    Lifted directional(const Lifted& F, const Vec2& a) const;

    // Padded physical samples of x -> G(x - s r a), s = +1 or -1 (or unshifted when r = 0).
    void physical(const Lifted& G, const Vec2& a, double r, int s, double* out, Workspace& ws) const;
    // Two shifts at once: out_m = G(x - r a), out_p = G(x + r a).
    void physical_pm(const Lifted& G, const Vec2& a, double r, double* out_m, double* out_p,
                     Workspace& ws) const;
    // Padded physical -> lifted band (truncation, 1/m^2 normalization).
    Lifted truncate(const double* phys, Workspace& ws) const;
    // Padded physical -> normalized padded half spectrum.
    cvec padded_spectrum(const double* phys, Workspace& ws) const;
    // c2r of tau(P,Q) * U(P,Q) on the padded half lattice into out.
    void apply_padded(const cvec& U, const std::vector<cplx>& tau, double* out, Workspace& ws) const;

    const AngleTails& tails(int j) const;
    // multiplier tables on the padded half lattice, built from tails(j)
    std::vector<cplx> tail_multiplier(int j, const std::function<cplx(double t, const AngleTails&, std::size_t)>& f) const;
    double padded_t(int j, std::size_t idx) const;

    // Exact integrals of the linear kernels beyond the split radius, as
    // functions of rho = |xi| on the lifted band:
    //   L-form  int_0^pi dtheta int_split^inf (-2 t sin(rt)/r) dr
    //   delta-form int_0^pi dtheta int_split^inf (2 - 2 cos(rt))/r^2 dr
    // The upper limit is R instead of infinity when far_field is off.  A
    // cutoff weight w(r) = 1 - chi(r/eps) is folded in when eps > 0.
    const std::vector<double>& iso_tail_L(double eps = 0.0) const;
    const std::vector<double>& iso_tail_D() const;

    // Sum over angles of per-angle buffers in a fixed binary tree.
    using AngleBody = std::function<void(int j, std::vector<double*>& acc, Workspace& ws)>;
    std::vector<rvec> angle_sum(int ncomp, int nbuf, const AngleBody& body) const;

    QuadFlags base_flags() const;

private:
    Grid g_;
    QuadratureSpec q_;
    int m_, K_;
    RadialRule rule_, outer_;
    double R_;
    std::vector<Vec2> dir_;
    std::vector<double> xi_m_;   // padded wave numbers times 2 pi / l, by row index
    mutable std::once_flag tails_once_;
    mutable std::vector<AngleTails> tails_;
    mutable std::mutex iso_mtx_;
    mutable std::deque<std::pair<double, std::vector<double>>> iso_L_;
    mutable std::vector<double> iso_D_;
    void build_tails() const;
};

// Cached engine per (grid, spec).
std::shared_ptr<const Engine> engine_for(const Grid& g, const QuadratureSpec& q);

// Even quadratic head over [0, r0] for radial weight w:
// returns (int_0^r0 w, int_0^r0 w r^2).
std::array<double, 2> head_moments(double r0, const std::function<double(double)>& w);

}  // namespace muskat::detail
