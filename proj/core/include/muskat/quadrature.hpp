#pragma once

#include <string>
#include <vector>

#include "muskat/grid.hpp"

namespace muskat {

// Polar alpha-quadrature: n_theta/2 antipodal direction pairs on [0, pi) and
// n_r log-uniform radii shared between an inner rule on [r_min, r_split] and
// an outer rule on [r_split, r_max].  [0, r_min] is closed by an even
// quadratic fit through the first two nodes.  Beyond r_split the part of each
// integrand that is linear in the data is integrated exactly; the outer rule
// only sees the nonlinear remainder, and [r_max, inf) is closed by far-field
// multipliers when far_field is set.
struct QuadratureSpec {
    int n_r = 64;
    int n_theta = 32;
    double r_min_cells = 0.5;   // r_min = r_min_cells * h
    double r_max_frac = 0.5;    // r_max = r_max_frac * l, at most 1/2
    double r_split = 4.0;       // clipped to r_max
    bool far_field = true;
    bool padding = true;        // 3/2 zero padding for pointwise products

    double r_min(const Grid& g) const { return r_min_cells * g.h(); }
    double r_max(const Grid& g) const { return r_max_frac * g.l; }
    double split(const Grid& g) const { return r_split < r_max(g) ? r_split : r_max(g); }
    // throws std::invalid_argument naming the offending field
    void validate(const Grid& g) const;
    QuadratureSpec refined() const;
    bool operator==(const QuadratureSpec&) const = default;
};

// Reference and fine resolutions used by the verification suites.
QuadratureSpec reference_quadrature();
QuadratureSpec fine_quadrature();

struct RadialRule {
    std::vector<double> r, w;  // int_{r0}^{r1} F(r) dr ~ sum w_i F(r_i)
};
// Log-uniform nodes with fourth-order end corrections in u = log r.
RadialRule radial_rule(double r0, double r1, int n);

struct QuadFlags {
    bool low_resolution = false;
    double tail_estimate = 0.0;   // sup-norm size of the neglected far-field terms
    bool flagged = false;
};

// Radial bump: 1 on [0, 1/4], 0 beyond 2, quintic smoothstep in between.
double chi(double rho);

}  // namespace muskat
