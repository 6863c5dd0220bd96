#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

#include "engine.hpp"
#include "numerics.hpp"

namespace muskat {

using std::numbers::pi;

void QuadratureSpec::validate(const Grid& g) const {
    if (n_r < 8) throw std::invalid_argument("quad.n_r must be >= 8");
    if (n_theta < 2 || n_theta % 2 != 0) throw std::invalid_argument("quad.n_theta must be even and >= 2");
    if (!(r_min_cells > 0.0) || !std::isfinite(r_min_cells))
        throw std::invalid_argument("quad.r_min_cells must be positive");
    if (!(r_max_frac > 0.0) || r_max_frac > 0.5) throw std::invalid_argument("quad.r_max_frac must be in (0, 0.5]");
    if (!(r_min(g) < r_max(g))) throw std::invalid_argument("quad.r_min_cells must put r_min below r_max");
    if (!(r_split > r_min(g))) throw std::invalid_argument("quad.r_split must exceed r_min");
}

QuadratureSpec QuadratureSpec::refined() const {
    QuadratureSpec q = *this;
    q.n_r *= 2;
    q.n_theta *= 2;
    return q;
}

QuadratureSpec reference_quadrature() { return {}; }
QuadratureSpec fine_quadrature() { return reference_quadrature().refined(); }

RadialRule radial_rule(double r0, double r1, int n) {
    if (n < 8) throw std::invalid_argument("radial_rule: need at least 8 nodes");
    if (!(r0 > 0.0 && r1 > r0)) throw std::invalid_argument("radial_rule: need 0 < r0 < r1");
    static constexpr double end[4] = {17.0 / 48, 59.0 / 48, 43.0 / 48, 49.0 / 48};
    const double u0 = std::log(r0), du = (std::log(r1) - u0) / (n - 1);
    RadialRule q;
    q.r.resize(n);
    q.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double c = 1.0;
        if (i < 4) c = end[i];
        if (n - 1 - i < 4) c = end[n - 1 - i];
        q.r[i] = i == 0 ? r0 : (i == n - 1 ? r1 : std::exp(u0 + i * du));
        q.w[i] = c * du * q.r[i];
    }
    return q;
}

double chi(double rho) {
    rho = std::abs(rho);
    if (rho <= 0.25) return 1.0;
    if (rho >= 2.0) return 0.0;
    const double x = (rho - 0.25) / 1.75;
    return 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

}  // namespace muskat

namespace muskat::detail {

namespace {

int padded_size(int n, bool pad) {
    if (!pad) return n;
    return 2 * ((3 * n + 3) / 4);
}

int wave_of(int p, int m) { return p <= m / 2 ? p : p - m; }

// (1 - J0(s)) / s^2
double one_minus_j0_s2(double s) {
    if (s < 1e-3) return 0.25 - s * s / 64.0;
    return (1.0 - bessel_j0(s)) / (s * s);
}
double j1_over_s(double s) {
    if (s < 1e-6) return 0.5;
    return bessel_j1(s) / s;
}

// Q(X_i) = int_0^{X_i} f for X sorted ascending, by cumulative segments.
template <class F>
std::vector<double> cumulative(F f, const std::vector<double>& X) {
    Integrator in;
    std::vector<double> out(X.size());
    double acc = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i] > prev) {
            // split long segments so the rule sees a few oscillations at a time
            const int pieces = std::max(1, int(std::ceil((X[i] - prev) / 20.0)));
            const double d = (X[i] - prev) / pieces;
            for (int k = 0; k < pieces; ++k)
                acc += in.qag(f, prev + k * d, prev + (k + 1) * d, 0.0, 1e-13).value;
            prev = X[i];
        }
        out[i] = acc;
    }
    return out;
}

}  // namespace

Engine::Engine(const Grid& g, const QuadratureSpec& q)
    : g_(g), q_(q), m_(padded_size(g.n, q.padding)), K_(g.n / 2 - 1) {
    q_.validate(g_);
    const double r0 = q_.r_min(g_), rs = q_.split(g_);
    R_ = q_.r_max(g_);
    if (rs < R_) {
        // nodes shared in proportion to the log-length of each piece
        const double frac = std::log(rs / r0) / std::log(R_ / r0);
        const int n_in = std::clamp(int(std::lround(q_.n_r * frac)), 8, std::max(8, q_.n_r - 8));
        rule_ = radial_rule(r0, rs, n_in);
        outer_ = radial_rule(rs, R_, std::max(8, q_.n_r - n_in));
    } else {
        rule_ = radial_rule(r0, R_, q_.n_r);
    }
    const int na = n_angles();
    dir_.resize(na);
    for (int j = 0; j < na; ++j) {
        const double th = j * pi / na;
        dir_[j] = {std::cos(th), std::sin(th)};
    }
    xi_m_.resize(m_);
    for (int p = 0; p < m_; ++p) xi_m_[p] = 2.0 * pi * wave_of(p, m_) / g_.l;
}

double Engine::dtheta() const { return pi / n_angles(); }

Lifted Engine::lift(const SpectralField& F) const {
    if (!(F.grid == g_)) throw std::invalid_argument("grid mismatch");
    Lifted L(nlift());
    const int n = g_.n;
    for (int k1 = -K_; k1 <= K_; ++k1)
        for (int k2 = 0; k2 <= K_; ++k2)
            L[std::size_t(k1 + K_) * (K_ + 1) + k2] = F((k1 + n) % n, k2);
    return L;
}

SpectralField Engine::unlift(const Lifted& L) const {
    SpectralField F(g_);
    const int n = g_.n;
    for (int k1 = -K_; k1 <= K_; ++k1)
        for (int k2 = 0; k2 <= K_; ++k2) {
            const cplx c = L[std::size_t(k1 + K_) * (K_ + 1) + k2];
            F((k1 + n) % n, k2) = c;
            if (k2 > 0) F((n - k1) % n, n - k2) = std::conj(c);
        }
    return F;
}

Lifted Engine::directional(const Lifted& F, const Vec2& a) const {
    Lifted out(F.size());
    const double c = 2.0 * pi / g_.l;
    for (int k1 = -K_; k1 <= K_; ++k1)
        for (int k2 = 0; k2 <= K_; ++k2) {
            const std::size_t i = std::size_t(k1 + K_) * (K_ + 1) + k2;
            out[i] = F[i] * cplx(0.0, c * (a[0] * k1 + a[1] * k2));
        }
    return out;
}

void Engine::physical(const Lifted& G, const Vec2& a, double r, int s, double* out, Workspace& ws) const {
    const int hw = m_ / 2 + 1;
    std::fill(ws.half.begin(), ws.half.end(), cplx(0.0));
    const double c = 2.0 * pi / g_.l;
    std::vector<cplx> e1(2 * K_ + 1), e2(K_ + 1);
    for (int k1 = -K_; k1 <= K_; ++k1) e1[k1 + K_] = std::polar(1.0, -s * r * a[0] * c * k1);
    for (int k2 = 0; k2 <= K_; ++k2) e2[k2] = std::polar(1.0, -s * r * a[1] * c * k2);
    for (int k1 = -K_; k1 <= K_; ++k1) {
        const int P = (k1 + m_) % m_;
        const cplx* src = &G[std::size_t(k1 + K_) * (K_ + 1)];
        cplx* dst = &ws.half[std::size_t(P) * hw];
        const cplx ph = e1[k1 + K_];
        for (int k2 = 0; k2 <= K_; ++k2) dst[k2] = src[k2] * ph * e2[k2];
    }
    fft2(m_).c2r(ws.half.data(), out);
}

void Engine::physical_pm(const Lifted& G, const Vec2& a, double r, double* out_m, double* out_p,
                         Workspace& ws) const {
    physical(G, a, r, +1, out_m, ws);
    physical(G, a, r, -1, out_p, ws);
}

Lifted Engine::truncate(const double* phys, Workspace& ws) const {
    const int hw = m_ / 2 + 1;
    fft2(m_).r2c(phys, ws.half.data());
    const double s = 1.0 / double(mm());
    Lifted L(nlift());
    for (int k1 = -K_; k1 <= K_; ++k1) {
        const int P = (k1 + m_) % m_;
        for (int k2 = 0; k2 <= K_; ++k2)
            L[std::size_t(k1 + K_) * (K_ + 1) + k2] = s * ws.half[std::size_t(P) * hw + k2];
    }
    return L;
}

cvec Engine::padded_spectrum(const double* phys, Workspace& ws) const {
    cvec U(mh());
    fft2(m_).r2c(phys, U.data());
    const double s = 1.0 / double(mm());
    for (auto& u : U) u *= s;
    return U;
}

void Engine::apply_padded(const cvec& U, const std::vector<cplx>& tau, double* out, Workspace& ws) const {
    for (std::size_t i = 0; i < U.size(); ++i) ws.half[i] = U[i] * tau[i];
    fft2(m_).c2r(ws.half.data(), out);
}

double Engine::padded_t(int j, std::size_t idx) const {
    const int hw = m_ / 2 + 1;
    const int P = int(idx / hw), Q = int(idx % hw);
    return dir_[j][0] * xi_m_[P] + dir_[j][1] * (2.0 * pi * Q / g_.l);
}

void Engine::build_tails() const {
    const int na = n_angles();
    const double R = this->R();
    tails_.resize(na);
    const int hw = m_ / 2 + 1;
    for (int j = 0; j < na; ++j) {
        AngleTails& T = tails_[j];
        T.i1s.resize(mh());
        T.i2c.resize(mh());
        T.i3s.resize(mh());
        T.i4c.resize(mh());
        for (std::size_t idx = 0; idx < mh(); ++idx) {
            const int P = int(idx / hw), Q = int(idx % hw);
            if (P == m_ / 2 || Q == m_ / 2) {
                T.i1s[idx] = T.i2c[idx] = T.i3s[idx] = T.i4c[idx] = 0.0;
                continue;
            }
            const double t = padded_t(j, idx);
            const double at = std::abs(t);
            double i1s = 0.0;
            if (at > 0.0) i1s = std::copysign(pi / 2 - sine_integral(R * at), t);
            const double cr = std::cos(R * t), sr = std::sin(R * t);
            const double i2c = cr / R - t * i1s;
            const double i3s = sr / (2 * R * R) + 0.5 * t * i2c;
            const double i4c = cr / (3 * R * R * R) - t / 3.0 * i3s;
            T.i1s[idx] = i1s;
            T.i2c[idx] = i2c;
            T.i3s[idx] = i3s;
            T.i4c[idx] = i4c;
        }
    }
}

const AngleTails& Engine::tails(int j) const {
    std::call_once(tails_once_, [this] { build_tails(); });
    return tails_[j];
}

std::vector<cplx> Engine::tail_multiplier(
    int j, const std::function<cplx(double, const AngleTails&, std::size_t)>& f) const {
    const AngleTails& T = tails(j);
    std::vector<cplx> tau(mh());
    const int hw = m_ / 2 + 1;
    for (std::size_t idx = 0; idx < mh(); ++idx) {
        const int P = int(idx / hw), Q = int(idx % hw);
        tau[idx] = (P == m_ / 2 || Q == m_ / 2) ? cplx(0.0) : f(padded_t(j, idx), T, idx);
    }
    return tau;
}

namespace {
// Distinct k1^2 + k2^2 on the lifted band with the per-entry key.
struct RadialKeys {
    std::vector<int> key_of;       // per lifted entry
    std::vector<int> distinct;     // sorted
};
RadialKeys radial_keys(int K) {
    RadialKeys rk;
    rk.key_of.resize(std::size_t(2 * K + 1) * (K + 1));
    for (int k1 = -K; k1 <= K; ++k1)
        for (int k2 = 0; k2 <= K; ++k2) {
            const int key = k1 * k1 + k2 * k2;
            rk.key_of[std::size_t(k1 + K) * (K + 1) + k2] = key;
            rk.distinct.push_back(key);
        }
    std::sort(rk.distinct.begin(), rk.distinct.end());
    rk.distinct.erase(std::unique(rk.distinct.begin(), rk.distinct.end()), rk.distinct.end());
    return rk;
}
}  // namespace

const std::vector<double>& Engine::iso_tail_L(double eps) const {
    std::lock_guard<std::mutex> lock(iso_mtx_);
    for (auto& [e, v] : iso_L_)
        if (e == eps) return v;
    const RadialKeys rk = radial_keys(K_);
    const double S = split(), R = this->R(), c = 2.0 * pi / g_.l;
    const bool far = q_.far_field;
    std::vector<double> X(rk.distinct.size()), Y(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
        X[i] = S * c * std::sqrt(double(rk.distinct[i]));
        Y[i] = R * c * std::sqrt(double(rk.distinct[i]));
    }
    const std::vector<double> Q = cumulative(j1_over_s, X);
    const std::vector<double> QR = far ? std::vector<double>() : cumulative(j1_over_s, Y);
    std::map<int, double> val;
    Integrator in;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double rho = c * std::sqrt(double(rk.distinct[i]));
        // int_S^inf (-2 pi rho J1(r rho)/r) dr, minus the part past R without the far field
        double v = -2.0 * pi * rho * (1.0 - Q[i]);
        if (!far) v -= -2.0 * pi * rho * (1.0 - QR[i]);
        if (eps > 0.0 && 2.0 * eps > S && rho > 0.0) {
            const double top = far ? 2.0 * eps : std::min(2.0 * eps, R);
            auto f = [&](double r) { return chi(r / eps) * 2.0 * pi * rho * bessel_j1(r * rho) / r; };
            if (top > S) v += in.qag(f, S, top, 1e-14, 1e-11).value;
        }
        val[rk.distinct[i]] = v;
    }
    std::vector<double> out(nlift());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = val[rk.key_of[i]];
    iso_L_.emplace_back(eps, std::move(out));
    return iso_L_.back().second;
}

const std::vector<double>& Engine::iso_tail_D() const {
    std::lock_guard<std::mutex> lock(iso_mtx_);
    if (!iso_D_.empty()) return iso_D_;
    const RadialKeys rk = radial_keys(K_);
    const double S = split(), R = this->R(), c = 2.0 * pi / g_.l;
    const bool far = q_.far_field;
    std::vector<double> X(rk.distinct.size()), Y(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
        X[i] = S * c * std::sqrt(double(rk.distinct[i]));
        Y[i] = R * c * std::sqrt(double(rk.distinct[i]));
    }
    const std::vector<double> Q = cumulative(one_minus_j0_s2, X);
    const std::vector<double> QR = far ? std::vector<double>() : cumulative(one_minus_j0_s2, Y);
    std::map<int, double> val;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double rho = c * std::sqrt(double(rk.distinct[i]));
        double v = 2.0 * pi * rho * (1.0 - Q[i]);
        if (!far) v -= 2.0 * pi * rho * (1.0 - QR[i]);
        val[rk.distinct[i]] = v;
    }
    iso_D_.resize(nlift());
    for (std::size_t i = 0; i < iso_D_.size(); ++i) iso_D_[i] = val[rk.key_of[i]];
    return iso_D_;
}

std::vector<rvec> Engine::angle_sum(int ncomp, int nbuf, const AngleBody& body) const {
    const int na = n_angles();
    std::vector<std::vector<rvec>> per(na);
#pragma omp parallel
    {
        Workspace ws(m_, nbuf);
#pragma omp for schedule(static)
        for (int j = 0; j < na; ++j) {
            per[j].assign(ncomp, rvec(mm(), 0.0));
            std::vector<double*> acc(ncomp);
            for (int c = 0; c < ncomp; ++c) acc[c] = per[j][c].data();
            body(j, acc, ws);
        }
    }
    // fixed binary tree over the angle index
    for (int stride = 1; stride < na; stride *= 2)
        for (int j = 0; j + stride < na; j += 2 * stride)
            for (int c = 0; c < ncomp; ++c) {
                double* a = per[j][c].data();
                const double* b = per[j + stride][c].data();
                for (std::size_t i = 0; i < mm(); ++i) a[i] += b[i];
            }
    return std::move(per[0]);
}

QuadFlags Engine::base_flags() const {
    QuadFlags f;
    f.low_resolution = q_.n_r < 16 || q_.n_theta < 8;
    f.flagged = f.low_resolution;
    return f;
}

std::shared_ptr<const Engine> engine_for(const Grid& g, const QuadratureSpec& q) {
    using Key = std::tuple<int, double, int, int, double, double, double, bool, bool>;
    static std::mutex mtx;
    static std::map<Key, std::shared_ptr<const Engine>> cache;
    const Key key{g.n, g.l, q.n_r, q.n_theta, q.r_min_cells, q.r_max_frac, q.r_split, q.far_field, q.padding};
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto e = std::make_shared<const Engine>(g, q);
    if (cache.size() > 16) cache.clear();
    cache.emplace(key, e);
    return e;
}

std::array<double, 2> head_moments(double r0, const std::function<double(double)>& w) {
    Integrator in;
    auto f0 = [&](double r) { return w(r); };
    auto f2 = [&](double r) { return w(r) * r * r; };
    return {in.qags(f0, 0.0, r0, 1e-15, 1e-11).value, in.qags(f2, 0.0, r0, 1e-15, 1e-11).value};
}

}  // namespace muskat::detail
