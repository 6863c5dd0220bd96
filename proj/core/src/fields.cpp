#include "muskat/fields.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace muskat {

RealField gaussian(const Grid& g, double amplitude, double sigma, const Vec2& center) {
    return bumps(g, {{center, sigma, amplitude}});
}

RealField bumps(const Grid& g, const std::vector<Bump>& list) {
    RealField f(g);
    const double h = g.h();
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            double v = 0.0;
            for (const Bump& b : list) {
                const double d1 = i * h - b.center[0], d2 = j * h - b.center[1];
                v += b.amplitude * std::exp(-(d1 * d1 + d2 * d2) / (2.0 * b.sigma * b.sigma));
            }
            f(i, j) = v;
        }
    return f;
}

RealField mode_sum(const Grid& g, const std::vector<Mode>& modes) {
    RealField f(g);
    const double h = g.h(), c = 2.0 * std::numbers::pi / g.l;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            double v = 0.0;
            for (const Mode& m : modes) v += m.amplitude * std::cos(c * (m.k1 * i * h + m.k2 * j * h) + m.phase);
            f(i, j) = v;
        }
    return f;
}

std::vector<RealField> random_family(const Grid& g, int count, std::uint64_t seed, double lip) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Vec2 mid{g.l / 2, g.l / 2};
    std::vector<RealField> out;
    for (int k = 0; k < count; ++k) {
        std::vector<Bump> list;
        for (int b = 0; b < 3; ++b) {
            const double rad = 4.0 * std::sqrt(unit(rng)), th = 2.0 * std::numbers::pi * unit(rng);
            const double sigma = 1.0 + unit(rng);
            list.push_back({{mid[0] + rad * std::cos(th), mid[1] + rad * std::sin(th)}, sigma, normal(rng)});
        }
        const SpectralField F = band_limit(transform(bumps(g, list)), g.n / 3);
        const double s = lip / lip_norm(F);
        out.push_back(inverse(s * F));
    }
    return out;
}

double edge_max(const RealField& f, double band) {
    const Grid& g = f.grid;
    double m = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double x = i * g.h(), y = j * g.h();
            const double d = std::min({x, y, g.l - x, g.l - y});
            if (d < band) m = std::max(m, std::abs(f(i, j)));
        }
    return m;
}

}  // namespace muskat
