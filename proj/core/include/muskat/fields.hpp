#pragma once

#include <cstdint>
#include <vector>

#include "muskat/spectral.hpp"

namespace muskat {

struct Bump {
    Vec2 center;
    double sigma;
    double amplitude;
};

// Periodic sums are not taken: bumps are meant to sit well inside the box.
RealField gaussian(const Grid& g, double amplitude, double sigma, const Vec2& center);
RealField bumps(const Grid& g, const std::vector<Bump>& list);

struct Mode {
    int k1, k2;
    double amplitude, phase;
};
// sum a cos(xi_k . x + phase)
RealField mode_sum(const Grid& g, const std::vector<Mode>& modes);

// Fixed-seed family of localized fields: three Gaussian bumps with normal
// amplitudes, centers within 4 of the box center, widths in [1, 2], band
// limited to |k| <= n/3 and scaled so that the Lipschitz norm equals lip.
std::vector<RealField> random_family(const Grid& g, int count, std::uint64_t seed, double lip = 0.3);

// max |f| over points closer than `band` to the box edge
double edge_max(const RealField& f, double band);

}  // namespace muskat
