#include "muskat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"

namespace muskat {

using detail::cvec;
using detail::fft2;

Grid::Grid(int n_, double l_) : n(n_), l(l_) {
    if (n < 8 || n % 2 != 0) throw std::invalid_argument("grid: n must be even and >= 8");
    if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("grid: l must be positive");
}

double Grid::xi(int p) const { return 2.0 * std::numbers::pi * wave(p) / l; }
double Grid::xi_max() const { return 2.0 * std::numbers::pi * (n / 2) / l; }

double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 64) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

namespace {
void same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw std::invalid_argument("grid mismatch");
}
}  // namespace

RealField operator+(const RealField& a, const RealField& b) {
    same_grid(a.grid, b.grid);
    RealField r(a.grid);
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] = a.v[i] + b.v[i];
    return r;
}
RealField operator-(const RealField& a, const RealField& b) {
    same_grid(a.grid, b.grid);
    RealField r(a.grid);
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] = a.v[i] - b.v[i];
    return r;
}
RealField operator*(double s, const RealField& a) {
    RealField r(a.grid);
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] = s * a.v[i];
    return r;
}
SpectralField operator+(const SpectralField& a, const SpectralField& b) {
    same_grid(a.grid, b.grid);
    SpectralField r(a.grid);
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
}
SpectralField operator-(const SpectralField& a, const SpectralField& b) {
    same_grid(a.grid, b.grid);
    SpectralField r(a.grid);
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
}
SpectralField operator*(double s, const SpectralField& a) {
    SpectralField r(a.grid);
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = s * a.c[i];
    return r;
}

double l2_inner(const RealField& a, const RealField& b) {
    same_grid(a.grid, b.grid);
    std::vector<double> t(a.v.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = a.v[i] * b.v[i];
    const double h = a.grid.h();
    return h * h * pairwise_sum(t);
}
double l2_norm(const RealField& f) { return std::sqrt(l2_inner(f, f)); }
double max_abs(const RealField& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

SpectralField transform(const RealField& f) {
    const Grid& g = f.grid;
    cvec in(g.size()), out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(f.v[i])) throw std::invalid_argument("transform: non-finite sample");
        in[i] = f.v[i];
    }
    fft2(g.n).forward(in.data(), out.data());
    SpectralField F(g);
    const double s = 1.0 / double(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) F.c[i] = s * out[i];
    return F;
}

RealField inverse(const SpectralField& F) {
    const Grid& g = F.grid;
    cvec in(F.c.begin(), F.c.end()), out(g.size());
    fft2(g.n).backward(in.data(), out.data());
    RealField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f.v[i] = out[i].real();
    return f;
}

MultiplierTable make_multiplier(const Grid& g, const std::function<cplx(double, double)>& m) {
    MultiplierTable t(g);
    for (int p = 0; p < g.n; ++p)
        for (int q = 0; q < g.n; ++q)
            t(p, q) = (g.nyquist(p) || g.nyquist(q)) ? cplx(0.0) : m(g.xi(p), g.xi(q));
    return t;
}

MultiplierTable abs_xi_power(const Grid& g, double s) {
    return make_multiplier(g, [s](double a, double b) {
        const double r = std::hypot(a, b);
        return cplx(r > 0.0 ? std::pow(r, s) : 0.0);
    });
}

SpectralField apply_multiplier(const SpectralField& F, const MultiplierTable& m) {
    same_grid(F.grid, m.grid);
    SpectralField r(F.grid);
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = F.c[i] * m.m[i];
    return r;
}

SpectralField shift(const SpectralField& F, const Vec2& alpha) {
    const Grid& g = F.grid;
    std::vector<cplx> e1(g.n), e2(g.n);
    for (int p = 0; p < g.n; ++p) {
        e1[p] = std::polar(1.0, -alpha[0] * g.xi(p));
        e2[p] = std::polar(1.0, -alpha[1] * g.xi(p));
    }
    SpectralField r(g);
    for (int p = 0; p < g.n; ++p)
        for (int q = 0; q < g.n; ++q) r(p, q) = F(p, q) * e1[p] * e2[q];
    return r;
}

std::array<SpectralField, 2> gradient(const SpectralField& F) {
    const Grid& g = F.grid;
    std::array<SpectralField, 2> d{SpectralField(g), SpectralField(g)};
    for (int p = 0; p < g.n; ++p)
        for (int q = 0; q < g.n; ++q) {
            if (g.nyquist(p) || g.nyquist(q)) continue;
            d[0](p, q) = cplx(0.0, g.xi(p)) * F(p, q);
            d[1](p, q) = cplx(0.0, g.xi(q)) * F(p, q);
        }
    return d;
}

std::pair<SpectralField, SpectralField> riesz(const SpectralField& F) {
    const Grid& g = F.grid;
    SpectralField a(g), b(g);
    for (int p = 0; p < g.n; ++p)
        for (int q = 0; q < g.n; ++q) {
            if (g.nyquist(p) || g.nyquist(q)) continue;
            const double x = g.xi(p), y = g.xi(q), r = std::hypot(x, y);
            if (r == 0.0) continue;
            a(p, q) = cplx(0.0, x / r) * F(p, q);
            b(p, q) = cplx(0.0, y / r) * F(p, q);
        }
    return {a, b};
}

double sobolev_norm(const SpectralField& F, double s, const MultiplierTable* w) {
    if (s < -2.0 || s > 4.0) throw std::invalid_argument("sobolev_norm: s outside [-2, 4]");
    const Grid& g = F.grid;
    if (w) same_grid(g, w->grid);
    std::vector<double> t(g.size(), 0.0);
    for (int p = 0; p < g.n; ++p)
        for (int q = 0; q < g.n; ++q) {
            const double r = std::hypot(g.xi(p), g.xi(q));
            if (r == 0.0) continue;
            const std::size_t i = std::size_t(p) * g.n + q;
            double wt = std::pow(r, 2.0 * s);
            if (w) wt *= std::norm(w->m[i]);
            t[i] = wt * std::norm(F.c[i]);
        }
    return g.l * std::sqrt(pairwise_sum(t));
}

double spectral_inner(const SpectralField& a, const SpectralField& b) {
    same_grid(a.grid, b.grid);
    std::vector<double> t(a.c.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = (std::conj(a.c[i]) * b.c[i]).real();
    return a.grid.l * a.grid.l * pairwise_sum(t);
}

SpectralField band_limit(const SpectralField& F, int kmax) {
    const Grid& g = F.grid;
    SpectralField r = F;
    for (int p = 0; p < g.n; ++p)
        for (int q = 0; q < g.n; ++q)
            if (std::abs(g.wave(p)) > kmax || std::abs(g.wave(q)) > kmax || g.nyquist(p) ||
                g.nyquist(q))
                r(p, q) = 0.0;
    return r;
}

double energy_beyond(const SpectralField& F, int kmax) {
    const Grid& g = F.grid;
    std::vector<double> all(g.size()), out(g.size(), 0.0);
    for (int p = 0; p < g.n; ++p)
        for (int q = 0; q < g.n; ++q) {
            const std::size_t i = std::size_t(p) * g.n + q;
            all[i] = std::norm(F.c[i]);
            if (std::abs(g.wave(p)) > kmax || std::abs(g.wave(q)) > kmax) out[i] = all[i];
        }
    const double tot = pairwise_sum(all);
    return tot > 0.0 ? pairwise_sum(out) / tot : 0.0;
}

std::vector<double> oversample(const SpectralField& F, int r) {
    const Grid& g = F.grid;
    const int m = r * g.n;
    cvec in(std::size_t(m) * m, cplx(0.0)), out(std::size_t(m) * m);
    for (int p = 0; p < g.n; ++p)
        for (int q = 0; q < g.n; ++q) {
            if (g.nyquist(p) || g.nyquist(q)) continue;
            const int P = (g.wave(p) + m) % m, Q = (g.wave(q) + m) % m;
            in[std::size_t(P) * m + Q] = F(p, q);
        }
    fft2(m).backward(in.data(), out.data());
    std::vector<double> v(out.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = out[i].real();
    return v;
}

PointEval evaluate_at(const SpectralField& F, const Vec2& x) {
    const Grid& g = F.grid;
    std::vector<cplx> e1(g.n), e2(g.n);
    for (int p = 0; p < g.n; ++p) {
        const bool skip = g.nyquist(p);
        e1[p] = skip ? cplx(0.0) : std::polar(1.0, g.xi(p) * x[0]);
        e2[p] = skip ? cplx(0.0) : std::polar(1.0, g.xi(p) * x[1]);
    }
    cplx v = 0.0, d1 = 0.0, d2 = 0.0;
    for (int p = 0; p < g.n; ++p) {
        if (e1[p] == cplx(0.0)) continue;
        cplx s = 0.0, sq = 0.0;
        for (int q = 0; q < g.n; ++q) {
            const cplx t = F(p, q) * e2[q];
            s += t;
            sq += cplx(0.0, g.xi(q)) * t;
        }
        v += e1[p] * s;
        d1 += cplx(0.0, g.xi(p)) * e1[p] * s;
        d2 += e1[p] * sq;
    }
    return {v.real(), {d1.real(), d2.real()}};
}

namespace {

// Candidates: local maxima of a periodic sampled field, largest first.
std::vector<std::pair<int, int>> peak_candidates(const std::vector<double>& v, int m, int count) {
    std::vector<std::pair<double, std::size_t>> peaks;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double c = v[std::size_t(i) * m + j];
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (!di && !dj) continue;
                    const int ii = (i + di + m) % m, jj = (j + dj + m) % m;
                    if (v[std::size_t(ii) * m + jj] > c) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max) peaks.push_back({c, std::size_t(i) * m + j});
        }
    std::sort(peaks.begin(), peaks.end(), [](auto& a, auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::pair<int, int>> out;
    for (int k = 0; k < int(peaks.size()) && k < count; ++k)
        out.push_back({int(peaks[k].second / m), int(peaks[k].second % m)});
    return out;
}

template <class Obj>
double refine_max(Obj&& obj, Vec2 x, double step, double stop) {
    double best = obj(x);
    for (int it = 0; it < 400 && step > stop; ++it) {
        Vec2 cand = x;
        double cbest = best;
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
                if (!di && !dj) continue;
                const Vec2 y{x[0] + di * step, x[1] + dj * step};
                const double val = obj(y);
                if (val > cbest) {
                    cbest = val;
                    cand = y;
                }
            }
        // round-off sized gains would keep the search wandering on a plateau
        if (cbest > best + 1e-14 * std::abs(best)) {
            best = cbest;
            x = cand;
        } else {
            step *= 0.5;
        }
    }
    return best;
}

double sup_of(const SpectralField& F, bool gradient_norm) {
    const Grid& g = F.grid;
    const int r = 2, m = r * g.n;
    std::vector<double> v;
    if (gradient_norm) {
        auto d = gradient(F);
        auto a = oversample(d[0], r), b = oversample(d[1], r);
        v.resize(a.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::hypot(a[i], b[i]);
    } else {
        v = oversample(F, r);
        for (double& x : v) x = std::abs(x);
    }
    const double hm = g.l / m;
    double best = 0.0;
    for (auto& v0 : v) best = std::max(best, v0);
    if (best == 0.0) return 0.0;
    auto obj = [&](const Vec2& x) {
        const PointEval e = evaluate_at(F, x);
        return gradient_norm ? std::hypot(e.grad[0], e.grad[1]) : std::abs(e.value);
    };
    // on a 2x oversampled grid the continuous maximum sits near a sample of
    // comparable size; low peaks are noise
    const double floor = 0.5 * best;
    for (auto [i, j] : peak_candidates(v, m, 4))
        if (v[std::size_t(i) * m + j] >= floor)
            best = std::max(best, refine_max(obj, Vec2{i * hm, j * hm}, 0.5 * hm, 1e-11 * g.l));
    return best;
}

}  // namespace

double sup_norm(const SpectralField& F) { return sup_of(F, false); }
double lip_norm(const SpectralField& F) { return sup_of(F, true); }

RealField rescale_critical(const RealField& f, double lambda, double tol) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("rescale_critical: lambda must be positive");
    const Grid& g = f.grid;
    const SpectralField F = transform(f);
    const double c = 0.5 * g.l;
    if (lambda < 1.0) {
        const double fmax = max_abs(f), half = 0.5 * lambda * g.l;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                const bool outside = std::abs(i * g.h() - c) > half || std::abs(j * g.h() - c) > half;
                if (outside && std::abs(f(i, j)) > tol * fmax)
                    throw std::domain_error("rescale_critical: support leaves the torus");
            }
    } else if (lambda > 1.0) {
        // the compressed box would pull in periodic images; f must vanish near its edge
        const double fmax = max_abs(f), frame = 0.45 * g.l;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                const bool edge = std::abs(i * g.h() - c) > frame || std::abs(j * g.h() - c) > frame;
                if (edge && std::abs(f(i, j)) > tol * fmax)
                    throw std::domain_error("rescale_critical: f does not vanish near the box edge");
            }
        const int kmax = int(std::floor((g.n / 2 - 1) / lambda));
        if (energy_beyond(F, kmax) > tol * tol)
            throw std::domain_error("rescale_critical: rescaled spectrum passes the band edge");
    }
    const int n = g.n;
    std::vector<cplx> E(std::size_t(n) * n);
    for (int i = 0; i < n; ++i) {
        const double y = c + lambda * (i * g.h() - c);
        for (int p = 0; p < n; ++p)
            E[std::size_t(i) * n + p] = g.nyquist(p) ? cplx(0.0) : std::polar(1.0, g.xi(p) * y);
    }
    // T[p][j] = sum_q F[p][q] E[j][q]
    std::vector<cplx> T(std::size_t(n) * n, cplx(0.0));
    for (int p = 0; p < n; ++p)
        for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (int q = 0; q < n; ++q) s += F(p, q) * E[std::size_t(j) * n + q];
            T[std::size_t(p) * n + j] = s;
        }
    RealField out(g);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (int p = 0; p < n; ++p) s += E[std::size_t(i) * n + p] * T[std::size_t(p) * n + j];
            const bool image = std::abs(lambda * (i * g.h() - c)) >= c || std::abs(lambda * (j * g.h() - c)) >= c;
            out(i, j) = image ? 0.0 : s.real() / lambda;
        }
    return out;
}

}  // namespace muskat
