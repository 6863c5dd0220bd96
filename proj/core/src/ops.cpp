#include "muskat/ops.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "engine.hpp"
#include "numerics.hpp"

namespace muskat {

using detail::cvec;
using detail::Engine;
using detail::Lifted;
using detail::rvec;
using detail::Workspace;
using std::numbers::pi;

namespace {

// tail estimate above this fraction of the output sup norm raises the flag
constexpr double kTailTol = 1e-2;

void same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw std::invalid_argument("grid mismatch");
}

}  // namespace

RealField delta(const RealField& f, const Vec2& a) {
    const SpectralField F = transform(f);
    return inverse(F - shift(F, a));
}

RealField slope(const RealField& f, const Vec2& a) {
    const double r = std::hypot(a[0], a[1]);
    if (!(r > 0.0)) throw std::invalid_argument("slope: alpha must be nonzero");
    return (1.0 / r) * delta(f, a);
}

RealField second_diff(const RealField& f, const Vec2& h) {
    const SpectralField F = transform(f);
    return inverse(2.0 * F - shift(F, h) - shift(F, {-h[0], -h[1]}));
}

namespace {

Lifted lifted_of(const Engine& e, const RealField& f) { return e.lift(transform(f)); }
RealField field_of(const Engine& e, const Lifted& L) { return inverse(e.unlift(L)); }

rvec padded(const Engine& e, const Lifted& L, Workspace& ws) {
    rvec out(e.mm());
    e.physical(L, {1.0, 0.0}, 0.0, 1, out.data(), ws);
    return out;
}

double sup(const rvec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double lifted_norm(const Lifted& L) {
    std::vector<double> t(L.size());
    for (std::size_t i = 0; i < L.size(); ++i) t[i] = std::norm(L[i]);
    return std::sqrt(pairwise_sum(t));
}

void zero_mean(const Engine& e, Lifted& L) { L[std::size_t(e.K()) * (e.K() + 1)] = 0.0; }

enum : unsigned { kL = 1, kP = 2, kV = 4, kR = 8 };
enum { cL, cP, cV1, cV2, cR, kComps };

struct Raw {
    std::array<Lifted, kComps> out;
    rvec v1, v2, g1, g2;   // padded drift and grad g, for V . grad g
    QuadFlags flags;
};

// All pair evaluators share this loop.  Per angle a and node r the integrand
// of each part, summed over the antipodes +-a, is an even function of r; the
// inner rule covers [r_min, split], an even quadratic fit through the first
// two nodes covers [0, r_min].  Past the split the linear parts of L and P are
// exact and the outer rule sees only the rest; (when enabled) far-field
// multipliers cover [R, inf).  eps > 0 multiplies the L integrand by
// 1 - chi(r/eps).
Raw evaluate(const Engine& e, const Lifted& F, const Lifted& G, unsigned mask, double eps = 0.0) {
    const auto& rule = e.rule();
    const std::size_t M = e.mm();
    const bool far = e.spec().far_field;
    const double R = e.R();

    // inner nodes carry the full integrand, outer nodes only its nonlinear part
    struct Node {
        double r, w;
        bool outer;
    };
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < rule.r.size(); ++i) nodes.push_back({rule.r[i], rule.w[i], false});
    for (std::size_t i = 0; i < e.outer().r.size(); ++i) nodes.push_back({e.outer().r[i], e.outer().w[i], true});
    const int nr = int(nodes.size());
    std::array<double, 2> H{rule.r[0], std::pow(rule.r[0], 3) / 3.0};
    if (eps > 0.0) {
        auto s = [eps](double r) { return 1.0 - chi(r / eps); };
        for (Node& nd : nodes) nd.w *= s(nd.r);
        H = detail::head_moments(rule.r[0], s);
    }
    const double r0 = rule.r[0], r1 = rule.r[1];

    Workspace ws0(e.m(), 0);
    const Vec2 e1{1.0, 0.0}, e2{0.0, 1.0};
    const rvec pf = padded(e, F, ws0), pg = padded(e, G, ws0);
    const rvec pf1 = padded(e, e.directional(F, e1), ws0), pf2 = padded(e, e.directional(F, e2), ws0);
    const rvec pg1 = padded(e, e.directional(G, e1), ws0), pg2 = padded(e, e.directional(G, e2), ws0);

    // padded spectra for the far-field expansions
    auto spec_of = [&](auto fn) {
        rvec t(M);
        for (std::size_t x = 0; x < M; ++x) t[x] = fn(x);
        return e.padded_spectrum(t.data(), ws0);
    };
    cvec Ug, Uf, Uff, Ufg, Uffg, U1, U2, Ug1, Ug2, Uf1, Uf2, Ufg1, Ufg2;
    if (far && (mask & (kP | kR))) Ug = spec_of([&](std::size_t x) { return pg[x]; });
    if (far && (mask & (kV | kR))) {
        Uf = spec_of([&](std::size_t x) { return pf[x]; });
        Uff = spec_of([&](std::size_t x) { return pf[x] * pf[x]; });
    }
    cvec Gx1, Gx2, Gf1, Gf2, Gff1, Gff2;
    if (far && (mask & kL)) {
        if (Uf.empty()) {
            Uf = spec_of([&](std::size_t x) { return pf[x]; });
            Uff = spec_of([&](std::size_t x) { return pf[x] * pf[x]; });
        }
        Gx1 = spec_of([&](std::size_t x) { return pg1[x]; });
        Gx2 = spec_of([&](std::size_t x) { return pg2[x]; });
        Gf1 = spec_of([&](std::size_t x) { return pf[x] * pg1[x]; });
        Gf2 = spec_of([&](std::size_t x) { return pf[x] * pg2[x]; });
        Gff1 = spec_of([&](std::size_t x) { return pf[x] * pf[x] * pg1[x]; });
        Gff2 = spec_of([&](std::size_t x) { return pf[x] * pf[x] * pg2[x]; });
    }
    if (far && (mask & kR)) {
        Ufg = spec_of([&](std::size_t x) { return pf[x] * pg[x]; });
        Uffg = spec_of([&](std::size_t x) { return pf[x] * pf[x] * pg[x]; });
        U1 = spec_of([&](std::size_t x) { return pf1[x]; });
        U2 = spec_of([&](std::size_t x) { return pf2[x]; });
        Ug1 = spec_of([&](std::size_t x) { return pg[x] * pf1[x]; });
        Ug2 = spec_of([&](std::size_t x) { return pg[x] * pf2[x]; });
        Uf1 = spec_of([&](std::size_t x) { return pf[x] * pf1[x]; });
        Uf2 = spec_of([&](std::size_t x) { return pf[x] * pf2[x]; });
        Ufg1 = spec_of([&](std::size_t x) { return pf[x] * pg[x] * pf1[x]; });
        Ufg2 = spec_of([&](std::size_t x) { return pf[x] * pg[x] * pf2[x]; });
    }

    const bool need_f = mask & (kL | kV | kR);
    const bool need_g = mask & (kP | kR);
    const bool need_dag = mask & kL;
    const bool need_daf = mask & kR;

    auto body = [&](int j, std::vector<double*>& acc, Workspace& ws) {
        const Vec2 a = e.dir(j);
        const Lifted DF = e.directional(F, a), DG = e.directional(G, a);
        rvec Daf(M), Dag(M), E0(M);
        for (std::size_t x = 0; x < M; ++x) {
            Daf[x] = a[0] * pf1[x] + a[1] * pf2[x];
            Dag[x] = a[0] * pg1[x] + a[1] * pg2[x];
            E0[x] = std::pow(1.0 + Daf[x] * Daf[x], -1.5);
        }
        double *fm = ws.buf[0].data(), *fp = ws.buf[1].data(), *gm = ws.buf[2].data(), *gp = ws.buf[3].data();
        double *agm = ws.buf[4].data(), *agp = ws.buf[5].data(), *afm = ws.buf[6].data(), *afp = ws.buf[7].data();
        std::array<rvec, kComps> h0, h1;
        for (int c = 0; c < kComps; ++c) {
            h0[c].assign(M, 0.0);
            h1[c].assign(M, 0.0);
        }
        for (int i = 0; i < nr; ++i) {
            const double r = nodes[i].r, w = nodes[i].w;
            const double lin = nodes[i].outer ? 1.0 : 0.0;
            if (need_f) e.physical_pm(F, a, r, fm, fp, ws);
            if (need_g) e.physical_pm(G, a, r, gm, gp, ws);
            if (need_dag) e.physical_pm(DG, a, r, agm, agp, ws);
            if (need_daf) e.physical_pm(DF, a, r, afm, afp, ws);
            const double ir = 1.0 / r, ir3 = ir * ir * ir;
            for (std::size_t x = 0; x < M; ++x) {
                double v[kComps] = {0, 0, 0, 0, 0};
                double Dp = 0, Dn = 0, cp = 1, cn = 1, qp = 1, qn = 1;
                if (need_f) {
                    Dp = (pf[x] - fm[x]) * ir;
                    Dn = (pf[x] - fp[x]) * ir;
                    qp = 1.0 / (1.0 + Dp * Dp);
                    qn = 1.0 / (1.0 + Dn * Dn);
                    cp = qp * std::sqrt(qp);
                    cn = qn * std::sqrt(qn);
                }
                if (mask & kL) v[cL] = ((cp - lin) * (Dag[x] - agm[x]) - (cn - lin) * (Dag[x] - agp[x])) * ir;
                if (mask & kP) v[cP] = (E0[x] - lin) * (2.0 * pg[x] - gm[x] - gp[x]) * ir * ir;
                if (mask & kV) {
                    const double fv = 2.0 * (cn - cp) * ir;
                    v[cV1] = fv * a[0];
                    v[cV2] = fv * a[1];
                }
                if (mask & kR) {
                    const double Mp = ((cp - E0[x]) - 3.0 * Dp * cp * qp * (Dp - afm[x])) * ir3;
                    const double Mn = ((cn - E0[x]) - 3.0 * Dn * cn * qn * (Dn + afp[x])) * ir3;
                    v[cR] = r * (Mp * (pg[x] - gm[x]) + Mn * (pg[x] - gp[x]));
                }
                for (int c = 0; c < kComps; ++c) {
                    acc[c][x] += w * v[c];
                    if (i == 0) h0[c][x] = v[c];
                    if (i == 1) h1[c][x] = v[c];
                }
            }
        }
        const double b = (H[1] - r0 * r0 * H[0]) / (r1 * r1 - r0 * r0);
        for (int c = 0; c < kComps; ++c)
            for (std::size_t x = 0; x < M; ++x) acc[c][x] += h0[c][x] * H[0] + (h1[c][x] - h0[c][x]) * b;

        if (!far) return;
        cvec tmp(e.mh());
        rvec o1(M), o2(M);
        auto op = [&](const std::vector<cplx>& tau, const cvec& U, double* out) {
            e.apply_padded(U, tau, out, ws);
        };
        auto op2 = [&](const std::vector<cplx>& tau, const cvec& A1, const cvec& A2, double* out) {
            for (std::size_t k = 0; k < tmp.size(); ++k) tmp[k] = a[0] * A1[k] + a[1] * A2[k];
            e.apply_padded(tmp, tau, out, ws);
        };
        if (mask & kL) {
            auto tauA = e.tail_multiplier(
                j, [](double, const detail::AngleTails& T, std::size_t k) { return cplx(0.0, -2.0 * T.i3s[k]); });
            rvec o3(M), o4(M), o5(M);
            op2(tauA, Gx1, Gx2, o1.data());
            op(tauA, Uf, o2.data());
            op2(tauA, Gf1, Gf2, o3.data());
            op(tauA, Uff, o4.data());
            op2(tauA, Gff1, Gff2, o5.data());
            for (std::size_t x = 0; x < M; ++x) {
                const double f = pf[x];
                acc[cL][x] += -1.5 * (-f * f * o1[x] - 2.0 * f * Dag[x] * o2[x] + 2.0 * f * o3[x] +
                                      Dag[x] * o4[x] - o5[x]);
            }
        }
        std::vector<cplx> tauD;
        if (mask & (kP | kR)) {
            tauD = e.tail_multiplier(j, [R](double, const detail::AngleTails& T, std::size_t k) {
                return cplx(2.0 / R - 2.0 * T.i2c[k]);
            });
            op(tauD, Ug, o1.data());
            if (mask & kP)
                for (std::size_t x = 0; x < M; ++x) acc[cP][x] += (E0[x] - 1.0) * o1[x];
            if (mask & kR)
                for (std::size_t x = 0; x < M; ++x) acc[cR][x] += (1.0 - E0[x]) * o1[x];
        }
        if (mask & kV) {
            auto tauV = e.tail_multiplier(
                j, [](double, const detail::AngleTails& T, std::size_t k) { return cplx(0.0, 2.0 * T.i3s[k]); });
            op(tauV, Uf, o1.data());
            op(tauV, Uff, o2.data());
            for (std::size_t x = 0; x < M; ++x) {
                const double t = 3.0 * (2.0 * pf[x] * o1[x] - o2[x]);
                acc[cV1][x] += a[0] * t;
                acc[cV2][x] += a[1] * t;
            }
        }
        if (mask & kR) {
            auto tauA = e.tail_multiplier(
                j, [](double, const detail::AngleTails& T, std::size_t k) { return cplx(0.0, -2.0 * T.i3s[k]); });
            auto tauB = e.tail_multiplier(
                j, [](double, const detail::AngleTails& T, std::size_t k) { return cplx(2.0 * T.i4c[k]); });
            rvec o3(M), o4(M);
            op2(tauA, U1, U2, o1.data());
            op2(tauA, Ug1, Ug2, o2.data());
            op2(tauA, Uf1, Uf2, o3.data());
            op2(tauA, Ufg1, Ufg2, o4.data());
            for (std::size_t x = 0; x < M; ++x)
                acc[cR][x] += 3.0 * (pf[x] * pg[x] * o1[x] - pf[x] * o2[x] - pg[x] * o3[x] + o4[x]);
            const double k3 = 1.0 / (3.0 * R * R * R);
            rvec o5(M), o6(M);
            op(tauB, Ug, o1.data());
            op(tauB, Uf, o2.data());
            op(tauB, Ufg, o3.data());
            op(tauB, Uff, o4.data());
            op(tauB, Uffg, o5.data());
            for (std::size_t x = 0; x < M; ++x) {
                const double f = pf[x], g = pg[x];
                acc[cR][x] += -4.5 * (2.0 * f * f * g * k3 - f * f * o1[x] - 2.0 * f * g * o2[x] +
                                      2.0 * f * o3[x] + g * o4[x] - o5[x]);
            }
        }
    };

    std::vector<rvec> sums = e.angle_sum(kComps, 8, body);

    Raw raw;
    const double dth = e.dtheta();
    const double pref[kComps] = {-1.0 / (2 * pi), 1.0 / (2 * pi), 1.0 / (4 * pi), 1.0 / (4 * pi), 1.0 / (2 * pi)};
    for (int c = 0; c < kComps; ++c) {
        const double s = dth * pref[c];
        for (double& v : sums[c]) v *= s;
        raw.out[c] = e.truncate(sums[c].data(), ws0);
    }
    {
        if (mask & kL) {
            const auto& T = e.iso_tail_L(eps);
            for (std::size_t k = 0; k < G.size(); ++k) raw.out[cL][k] += pref[cL] * T[k] * G[k];
        }
        if (mask & kP) {
            const auto& T = e.iso_tail_D();
            for (std::size_t k = 0; k < G.size(); ++k) raw.out[cP][k] += pref[cP] * T[k] * G[k];
        }
    }
    if (mask & kV) {
        raw.v1 = std::move(sums[cV1]);
        raw.v2 = std::move(sums[cV2]);
        raw.g1 = pg1;
        raw.g2 = pg2;
    }
    raw.flags = e.base_flags();
    const double sf = sup(pf), sg = sup(pg);
    // first neglected order: the (2f/r)^4 term of (1 + D^2)^{-3/2} past R
    raw.flags.tail_estimate = far ? 15.0 * sg * std::pow(sf, 4) / std::pow(R, 4) : 2.0 * sg / R;
    return raw;
}

void set_tail_flag(QuadFlags& fl, double out_sup) {
    if (fl.tail_estimate > kTailTol * out_sup && fl.tail_estimate > 1e-14) fl.flagged = true;
}

FieldResult finish(const Engine& e, Lifted L, QuadFlags fl, bool mean_free) {
    if (mean_free) zero_mean(e, L);
    FieldResult r{field_of(e, L), fl};
    set_tail_flag(r.flags, max_abs(r.value));
    return r;
}

struct Prepared {
    std::shared_ptr<const Engine> e;
    Lifted F, G;
};
Prepared prepare(const RealField& f, const RealField& g, const QuadratureSpec& q) {
    same_grid(f.grid, g.grid);
    Prepared p{detail::engine_for(f.grid, q), {}, {}};
    p.F = lifted_of(*p.e, f);
    p.G = lifted_of(*p.e, g);
    return p;
}

}  // namespace

RealField dealiased_product(const RealField& a, const RealField& b) {
    same_grid(a.grid, b.grid);
    auto e = detail::engine_for(a.grid, reference_quadrature());
    Workspace ws(e->m(), 0);
    const rvec pa = padded(*e, lifted_of(*e, a), ws), pb = padded(*e, lifted_of(*e, b), ws);
    rvec t(e->mm());
    for (std::size_t x = 0; x < t.size(); ++x) t[x] = pa[x] * pb[x];
    return field_of(*e, e->truncate(t.data(), ws));
}

FieldResult muskat_rhs(const RealField& f, const QuadratureSpec& q) {
    Prepared p = prepare(f, f, q);
    Raw raw = evaluate(*p.e, p.F, p.F, kL);
    Lifted L = std::move(raw.out[cL]);
    for (auto& c : L) c = -c;
    return finish(*p.e, std::move(L), raw.flags, true);
}

FieldResult muskat_rhs_cutoff(const RealField& f, double eps, const QuadratureSpec& q) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("muskat_rhs_cutoff: eps must be in (0, 1]");
    Prepared p = prepare(f, f, q);
    Raw raw = evaluate(*p.e, p.F, p.F, kL, eps);
    Lifted L = std::move(raw.out[cL]);
    for (auto& c : L) c = -c;
    return finish(*p.e, std::move(L), raw.flags, true);
}

FieldResult L_apply(const RealField& f, const RealField& g, const QuadratureSpec& q) {
    Prepared p = prepare(f, g, q);
    Raw raw = evaluate(*p.e, p.F, p.G, kL);
    return finish(*p.e, std::move(raw.out[cL]), raw.flags, false);
}

FieldResult elliptic_part(const RealField& f, const RealField& g, const QuadratureSpec& q) {
    Prepared p = prepare(f, g, q);
    Raw raw = evaluate(*p.e, p.F, p.G, kP);
    return finish(*p.e, std::move(raw.out[cP]), raw.flags, false);
}

DriftResult drift(const RealField& f, const QuadratureSpec& q) {
    Prepared p = prepare(f, f, q);
    Raw raw = evaluate(*p.e, p.F, p.F, kV);
    DriftResult d{{field_of(*p.e, raw.out[cV1]), field_of(*p.e, raw.out[cV2])}, raw.flags};
    set_tail_flag(d.flags, std::max(max_abs(d.v[0]), max_abs(d.v[1])));
    return d;
}

FieldResult remainder(const RealField& f, const RealField& g, const QuadratureSpec& q) {
    Prepared p = prepare(f, g, q);
    Raw raw = evaluate(*p.e, p.F, p.G, kR);
    return finish(*p.e, std::move(raw.out[cR]), raw.flags, false);
}

MuskatDecomposition decomposition(const RealField& f, const RealField& g, const QuadratureSpec& q) {
    Prepared p = prepare(f, g, q);
    const Engine& e = *p.e;
    Raw raw = evaluate(e, p.F, p.G, kL | kP | kV | kR);
    Workspace ws(e.m(), 0);
    rvec t(e.mm());
    for (std::size_t x = 0; x < t.size(); ++x) t[x] = raw.v1[x] * raw.g1[x] + raw.v2[x] * raw.g2[x];
    const Lifted vg = e.truncate(t.data(), ws);

    Lifted res(vg.size());
    for (std::size_t k = 0; k < res.size(); ++k)
        res[k] = raw.out[cL][k] - raw.out[cP][k] - vg[k] - raw.out[cR][k];

    MuskatDecomposition d;
    d.p_part = field_of(e, raw.out[cP]);
    d.drift = {field_of(e, raw.out[cV1]), field_of(e, raw.out[cV2])};
    d.drift_term = field_of(e, vg);
    d.remainder = field_of(e, raw.out[cR]);
    d.total = field_of(e, raw.out[cL]);
    const double nt = lifted_norm(raw.out[cL]);
    d.residual = nt > 0.0 ? lifted_norm(res) / nt : lifted_norm(res);
    d.flags = raw.flags;
    set_tail_flag(d.flags, max_abs(d.total));
    return d;
}

BoundAudit remainder_bound_audit(const RealField& f, const QuadratureSpec& q) {
    Prepared p = prepare(f, f, q);
    const Engine& e = *p.e;
    const std::size_t M = e.mm();
    Workspace ws0(e.m(), 0);
    const Lifted F1 = e.directional(p.F, {1.0, 0.0}), F2 = e.directional(p.F, {0.0, 1.0});
    const rvec pf = padded(e, p.F, ws0), pf1 = padded(e, F1, ws0), pf2 = padded(e, F2, ws0);
    const auto& rule = e.rule();

    // per-angle counts in acc[0][0..1], per-angle worst ratio in acc[1][j]
    auto body = [&](int j, std::vector<double*>& acc, Workspace& ws) {
        const Vec2 a = e.dir(j);
        double *fm = ws.buf[0].data(), *fp = ws.buf[1].data();
        double *m1 = ws.buf[2].data(), *p1 = ws.buf[3].data(), *m2 = ws.buf[4].data(), *p2 = ws.buf[5].data();
        double samples = 0, viol = 0, worst = 0;
        for (std::size_t i = 0; i < rule.r.size(); ++i) {
            const double r = rule.r[i], ir3 = 1.0 / (r * r * r);
            e.physical_pm(p.F, a, r, fm, fp, ws);
            e.physical_pm(F1, a, r, m1, p1, ws);
            e.physical_pm(F2, a, r, m2, p2, ws);
            for (std::size_t x = 0; x < M; ++x) {
                const double daf = a[0] * pf1[x] + a[1] * pf2[x];
                const double E0 = std::pow(1.0 + daf * daf, -1.5);
                for (int s = 0; s < 2; ++s) {
                    // s = 0: +a with f(x - alpha); s = 1: -a with f(x + alpha)
                    const double fs = s == 0 ? fm[x] : fp[x];
                    const double g1 = s == 0 ? m1[x] : p1[x], g2 = s == 0 ? m2[x] : p2[x];
                    const double sg = s == 0 ? 1.0 : -1.0;
                    const double D = (pf[x] - fs) / r;
                    const double ad = sg * daf;                       // (+-a) . grad f
                    const double ads = sg * (a[0] * g1 + a[1] * g2);  // (+-a) . grad f(x -+ alpha)
                    const double qd = 1.0 / (1.0 + D * D), c = qd * std::sqrt(qd);
                    const double Mv = ir3 * ((c - E0) - 3.0 * D * c * qd * (D - ads));
                    const double bound = 6.0 * ir3 * std::abs(D - ad) +
                                         3.0 * ir3 * std::hypot(pf1[x] - g1, pf2[x] - g2);
                    samples += 1;
                    if (std::abs(Mv) > bound) viol += 1;
                    if (bound > 0.0) worst = std::max(worst, std::abs(Mv) / bound);
                }
            }
        }
        acc[0][0] = samples;
        acc[0][1] = viol;
        acc[1][j] = worst;
    };
    // counts are exact in double; per-angle maxima land in separate cells
    std::vector<rvec> s = e.angle_sum(2, 6, body);
    BoundAudit out;
    out.samples = std::size_t(s[0][0]);
    out.violations = std::size_t(s[0][1]);
    for (int j = 0; j < e.n_angles(); ++j) out.max_ratio = std::max(out.max_ratio, s[1][j]);
    return out;
}

namespace {

// sum_j dtheta c_j [ sum_i W_i s(r_i) k(r_i, t_j) + head ] on the lifted band,
// for kernels k(r, t) even in r.
template <class Coef, class Kern>
std::vector<double> linear_symbol(const Engine& e, Coef coef, Kern kern, const std::function<double(double)>& s) {
    const auto& rule = e.rule();
    const int nr = int(rule.r.size()), K = e.K();
    std::vector<double> sw(nr);
    for (int i = 0; i < nr; ++i) sw[i] = rule.w[i] * s(rule.r[i]);
    const auto H = detail::head_moments(rule.r[0], s);
    const double r0 = rule.r[0], r1 = rule.r[1];
    const double b = (H[1] - r0 * r0 * H[0]) / (r1 * r1 - r0 * r0);
    const double c = 2.0 * pi / e.grid().l;
    std::vector<double> sym(e.nlift(), 0.0);
#pragma omp parallel for schedule(static)
    for (int k1 = -K; k1 <= K; ++k1)
        for (int k2 = 0; k2 <= K; ++k2) {
            std::vector<double> per(e.n_angles());
            for (int j = 0; j < e.n_angles(); ++j) {
                const Vec2 a = e.dir(j);
                const double t = c * (a[0] * k1 + a[1] * k2);
                double acc = 0.0;
                for (int i = 0; i < nr; ++i) acc += sw[i] * kern(rule.r[i], t);
                const double k0 = kern(r0, t), kk1 = kern(r1, t);
                acc += k0 * H[0] + (kk1 - k0) * b;
                per[j] = e.dtheta() * coef(j) * acc;
            }
            sym[std::size_t(k1 + K) * (K + 1) + k2] = pairwise_sum(per);
        }
    return sym;
}

MultiplierTable to_table(const Engine& e, const std::vector<double>& sym) {
    const Grid& g = e.grid();
    const int K = e.K();
    MultiplierTable t(g);
    for (int p = 0; p < g.n; ++p)
        for (int q = 0; q < g.n; ++q) {
            if (g.nyquist(p) || g.nyquist(q)) continue;
            int k1 = g.wave(p), k2 = g.wave(q);
            if (k2 < 0) {
                k1 = -k1;
                k2 = -k2;
            }
            t(p, q) = sym[std::size_t(k1 + K) * (K + 1) + k2];
        }
    return t;
}

double I1s(double R, double t) {
    if (t == 0.0) return 0.0;
    return std::copysign(pi / 2 - detail::sine_integral(R * std::abs(t)), t);
}

// int_R^inf s(r) 4 pi (1 - J0(r rho)) / r^2 dr per lifted entry
std::vector<double> iso_fd_tail(const Engine& e, const std::function<double(double)>& s, double R) {
    const int K = e.K();
    const double c = 2.0 * pi / e.grid().l;
    detail::Integrator in;
    auto one = [&](double r) { return s(r) / (r * r); };
    const double base = in.qagiu(one, R, 1e-15, 1e-12).value;
    std::map<int, double> val;
    for (int k1 = 0; k1 <= K; ++k1)
        for (int k2 = 0; k2 <= K; ++k2) val[k1 * k1 + k2 * k2] = 0.0;
    const double span = 400.0;
    for (auto& [key, v] : val) {
        if (key == 0) continue;
        const double rho = c * std::sqrt(double(key));
        auto f = [&](double r) { return s(r) * detail::bessel_j0(r * rho) / (r * r); };
        const int pieces = std::max(1, int(std::ceil(span * rho / (20.0 * pi))));
        double osc = 0.0;
        for (int k = 0; k < pieces; ++k) {
            const double a = R + span * k / pieces, b = R + span * (k + 1) / pieces;
            osc += in.qag(f, a, b, 1e-15, 1e-10, GSL_INTEG_GAUSS21).value;
        }
        v = 4.0 * pi * (base - osc);
    }
    std::vector<double> out(e.nlift());
    for (int k1 = -K; k1 <= K; ++k1)
        for (int k2 = 0; k2 <= K; ++k2) out[std::size_t(k1 + K) * (K + 1) + k2] = val[k1 * k1 + k2 * k2];
    return out;
}

// pair kernel 2 (2 - 2 cos(rt)) / r^2 with radial weight s, angular sum over the full circle
std::vector<double> fd_symbol(const Engine& e, const std::function<double(double)>& s) {
    auto kern = [](double r, double t) {
        const double st = std::sin(0.5 * r * t);
        return 8.0 * st * st / (r * r);
    };
    std::vector<double> sym = linear_symbol(e, [](int) { return 1.0; }, kern, s);
    // exact beyond the split, up to R only without far field
    const bool far = e.spec().far_field;
    if (far || e.split() < e.R()) {
        const std::vector<double> tail = iso_fd_tail(e, s, e.split());
        for (std::size_t k = 0; k < sym.size(); ++k) sym[k] += tail[k];
    }
    if (!far && e.split() < e.R()) {
        const std::vector<double> tail = iso_fd_tail(e, s, e.R());
        for (std::size_t k = 0; k < sym.size(); ++k) sym[k] -= tail[k];
    }
    return sym;
}

}  // namespace

KernelIdentity kernel_identity_check(const Vec2& zeta, const RealField& g, const QuadratureSpec& q) {
    auto e = detail::engine_for(g.grid, q);
    const Lifted G = lifted_of(*e, g);
    std::vector<double> C(e->n_angles());
    for (int j = 0; j < e->n_angles(); ++j) {
        const double d = e->dir(j)[0] * zeta[0] + e->dir(j)[1] * zeta[1];
        C[j] = std::pow(1.0 + d * d, -1.5);
    }
    auto coef = [&](int j) { return C[j]; };
    auto one = [](double) { return 1.0; };
    // -2 t sin(rt) / r and (2 - 2 cos(rt)) / r^2
    std::vector<double> lhs = linear_symbol(
        *e, coef, [](double r, double t) { return -2.0 * t * std::sin(r * t) / r; }, one);
    std::vector<double> rhs = linear_symbol(
        *e,
        coef,
        [](double r, double t) {
            const double st = std::sin(0.5 * r * t);
            return 4.0 * st * st / (r * r);
        },
        one);
    {
        const auto& TL = e->iso_tail_L();
        const auto& TD = e->iso_tail_D();
        const int K = e->K();
        const bool far = e->spec().far_field;
        const double S = e->split(), R = e->R(), c = 2.0 * pi / g.grid.l;
        // per-angle int_a^inf of the two kernels
        auto tl = [](double a, double t) { return -2.0 * t * I1s(a, t); };
        auto td = [](double a, double t) {
            return 2.0 / a - 2.0 * (std::cos(a * t) / a - t * I1s(a, t));
        };
        for (int k1 = -K; k1 <= K; ++k1)
            for (int k2 = 0; k2 <= K; ++k2) {
                const std::size_t k = std::size_t(k1 + K) * (K + 1) + k2;
                std::vector<double> pl(e->n_angles()), pr(e->n_angles());
                for (int j = 0; j < e->n_angles(); ++j) {
                    const double t = c * (e->dir(j)[0] * k1 + e->dir(j)[1] * k2);
                    double vl = tl(S, t), vr = td(S, t);
                    if (!far) {
                        vl -= tl(R, t);
                        vr -= td(R, t);
                    }
                    pl[j] = e->dtheta() * (C[j] - 1.0) * vl;
                    pr[j] = e->dtheta() * (C[j] - 1.0) * vr;
                }
                lhs[k] += TL[k] + pairwise_sum(pl);
                rhs[k] += TD[k] + pairwise_sum(pr);
            }
    }
    Lifted Ll(G.size()), Lr(G.size()), D(G.size());
    for (std::size_t k = 0; k < G.size(); ++k) {
        Ll[k] = -lhs[k] * G[k];
        Lr[k] = rhs[k] * G[k];
        D[k] = Ll[k] - Lr[k];
    }
    KernelIdentity out;
    out.lhs = field_of(*e, Ll);
    out.rhs = field_of(*e, Lr);
    const double nr = lifted_norm(Lr);
    out.relerr = nr > 0.0 ? lifted_norm(D) / nr : lifted_norm(D);
    return out;
}

double fd_laplacian_constant() {
    const double Kc = -std::tgamma(-1.5) * std::cos(0.75 * pi);
    const double KJ = std::pow(2.0, -1.5) * std::tgamma(0.25) / (1.5 * std::tgamma(1.75));
    return Kc / KJ;
}

MultiplierTable weighted_fd_symbol(const Grid& g, const Weight& k, const QuadratureSpec& q) {
    auto e = detail::engine_for(g, q);
    std::vector<double> sym = fd_symbol(*e, [&k](double r) { return k(1.0 / r) / std::sqrt(r); });
    const double c = fd_laplacian_constant();
    for (double& v : sym) v *= c;
    return to_table(*e, sym);
}

MultiplierTable gagliardo_symbol(const Grid& g, double s, const QuadratureSpec& q) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("gagliardo: s must be in (0, 1)");
    auto e = detail::engine_for(g, q);
    return to_table(*e, fd_symbol(*e, [s](double r) { return std::pow(r, 1.0 - 2.0 * s); }));
}

RealField weighted_fd_laplacian(const RealField& g, const Weight& k, const QuadratureSpec& q) {
    return inverse(apply_multiplier(transform(g), weighted_fd_symbol(g.grid, k, q)));
}

SeminormResult gagliardo_seminorm(const RealField& f, double s, const QuadratureSpec& q) {
    const MultiplierTable m = gagliardo_symbol(f.grid, s, q);
    const SpectralField F = transform(f);
    std::vector<double> t(F.c.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = m.m[i].real() * std::norm(F.c[i]);
    SeminormResult r;
    r.value = f.grid.l * std::sqrt(std::max(0.0, pairwise_sum(t)));
    r.flags = detail::engine_for(f.grid, q)->base_flags();
    return r;
}

RealField commutator_riesz_drift(const RealField& f, const RealField& g, const QuadratureSpec& q) {
    const DriftResult V = drift(f, q);
    const auto [R1, R2] = riesz(transform(g));
    const RealField r1 = inverse(R1), r2 = inverse(R2);
    const auto [A1, _a] = riesz(transform(dealiased_product(V.v[0], g)));
    const auto [_b, A2] = riesz(transform(dealiased_product(V.v[1], g)));
    return inverse(A1 + A2) - dealiased_product(V.v[0], r1) - dealiased_product(V.v[1], r2);
}

RealField commutator_weighted(const RealField& f, const Weight& k, const QuadratureSpec& q) {
    const auto phi = PhiTable::for_grid(k, f.grid);
    const MultiplierTable D = phi->symbol(f.grid, 1.5, 1);
    const RealField Lf = L_apply(f, f, q).value;
    const RealField Df = inverse(apply_multiplier(transform(f), D));
    return inverse(apply_multiplier(transform(Lf), D)) - L_apply(f, Df, q).value;
}

double leibniz_audit(const RealField& u, const RealField& v, const Vec2& h) {
    same_grid(u.grid, v.grid);
    const Grid g2(2 * u.grid.n, u.grid.l);
    RealField U(g2), W(g2);
    U.v = oversample(transform(u), 2);
    W.v = oversample(transform(v), 2);
    const Vec2 mh{-h[0], -h[1]};
    auto shifted = [&](const RealField& x, const Vec2& a) { return inverse(shift(transform(x), a)); };
    RealField UW(g2);
    for (std::size_t i = 0; i < UW.v.size(); ++i) UW.v[i] = U.v[i] * W.v[i];
    const RealField Um = shifted(U, h), Up = shifted(U, mh), Wm = shifted(W, h), Wp = shifted(W, mh);
    const RealField UWm = shifted(UW, h), UWp = shifted(UW, mh);
    double worst = 0.0;
    for (std::size_t i = 0; i < UW.v.size(); ++i) {
        const double u0 = U.v[i], w0 = W.v[i];
        const double s_uw = 2 * UW.v[i] - UWm.v[i] - UWp.v[i];
        const double s_u = 2 * u0 - Um.v[i] - Up.v[i], s_w = 2 * w0 - Wm.v[i] - Wp.v[i];
        const double rhs = -(u0 - Um.v[i]) * (w0 - Wm.v[i]) - (u0 - Up.v[i]) * (w0 - Wp.v[i]);
        worst = std::max(worst, std::abs(s_uw - u0 * s_w - w0 * s_u - rhs));
    }
    const double scale = std::max(max_abs(U) * max_abs(W), 1e-300);
    return worst / scale;
}

}  // namespace muskat
