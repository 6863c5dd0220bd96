// One PASS/FAIL line per acceptance criterion.  Tolerances are pinned below.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "muskat/diagnostics.hpp"
#include "muskat/evolution.hpp"
#include "muskat/fields.hpp"
#include "muskat/ops.hpp"
#include "muskat/spectral.hpp"
#include "muskat/weights.hpp"

using namespace muskat;

namespace tol {
constexpr double l0_relerr = 1e-3;
constexpr double l0_slope = 1.0;
constexpr double decomposition = 1e-3;
constexpr double kernel_identity = 1e-3;
constexpr double dsphi = 2e-2;
constexpr double bracket_drift = 5e-2;
constexpr double tech1_spread = 1e-3;
constexpr double taylor_exponent = 1e-2;
constexpr double pairing_linear = 1e-2;
constexpr double pairing_split = 1e-10;
constexpr double unit_interpolation = 1e-9;
constexpr double calibration_margin = 1.5;
constexpr double decay_budget_s = 1800.0;
constexpr double slope_lo = 0.8, slope_hi = 1.2;
constexpr double scaling = 1e-6;
}  // namespace tol

namespace {

const Grid ref_grid(128, 32.0);
const QuadratureSpec ref_q = reference_quadrature();
const std::uint64_t seed_a = 20240601, seed_b = 20240602;
const Vec2 mid{16.0, 16.0};

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
    std::printf("criterion %2d %-4s %s: %s\n", id, pass ? "PASS" : "FAIL", title, detail.c_str());
    std::fflush(stdout);
    failures += !pass;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void guarded(int id, const char* title, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        report(id, title, false, std::string("error: ") + e.what());
    }
}

double rel(const RealField& a, const RealField& b) { return l2_norm(a - b) / l2_norm(b); }

RealField minus_D(const RealField& f) {
    return -1.0 * inverse(apply_multiplier(transform(f), abs_xi_power(f.grid, 1.0)));
}

std::vector<Vec2> sample_xi(double lo, double hi, int count) {
    std::vector<Vec2> xi;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double r = lo * std::pow(hi / lo, double(i) / (count - 1));
        xi.push_back({r * std::cos(i * golden), r * std::sin(i * golden)});
    }
    return xi;
}

void c1() {
    const RealField f = (1e-6 / max_abs(random_family(ref_grid, 1, seed_a)[0])) * random_family(ref_grid, 1, seed_a)[0];
    const RealField lin = minus_D(f);
    const double e0 = rel(muskat_rhs(f, ref_q).value, lin);
    const double e1 = rel(muskat_rhs(f, ref_q.refined()).value, lin);
    const double slope = std::log2(e0 / e1);
    report(1, "L(0) = <D>", e0 < tol::l0_relerr && slope >= tol::l0_slope,
           fmt("relerr %.3e (< %.0e), refined %.3e, slope %.2f (>= %.0f)", e0, tol::l0_relerr, e1, slope, tol::l0_slope));
}

void c2() {
    double worst = 0.0;
    std::size_t violations = 0, samples = 0;
    for (const auto& f : random_family(ref_grid, 10, seed_a)) {
        worst = std::max(worst, decomposition(f, f, ref_q).residual);
        const BoundAudit a = remainder_bound_audit(f, ref_q);
        violations += a.violations;
        samples += a.samples;
    }
    report(2, "quasilinear decomposition", worst < tol::decomposition && violations == 0,
           fmt("max residual %.3e (< %.0e) over 10 fields, bound violations %zu of %zu samples", worst,
               tol::decomposition, violations, samples));
}

void c3() {
    const RealField g = gaussian(ref_grid, 1.0, 2.0, mid);
    double worst = 0.0;
    for (const Vec2 z : {Vec2{0.0, 0.0}, Vec2{1.0, 0.0}, Vec2{0.7, -0.7}})
        worst = std::max(worst, kernel_identity_check(z, g, ref_q).relerr);
    report(3, "kernel divergence identity", worst < tol::kernel_identity,
           fmt("max relerr %.3e (< %.0e) over three zeta", worst, tol::kernel_identity));
}

void c4() {
    const RealField g = gaussian(ref_grid, 1.0, 2.0, mid);
    double e[2];
    int i = 0;
    for (const Weight& w : {Weight::unit(), Weight::log_pow(0.375)}) {
        const auto phi = PhiTable::for_grid(w, ref_grid);
        const RealField s = inverse(apply_multiplier(transform(g), phi->symbol(ref_grid, 1.5, 1)));
        e[i++] = rel(weighted_fd_laplacian(g, w, ref_q), s);
    }
    report(4, "weighted Laplacian, spectral vs finite difference", std::max(e[0], e[1]) < tol::dsphi,
           fmt("unit %.3e, log_pow(3/8) %.3e (< %.0e)", e[0], e[1], tol::dsphi));
}

void c5() {
    RadialTable t;
    for (int i = 0; i <= 2000; ++i) {
        const double r = 10.0 * i / 2000;
        t.r.push_back(r);
        t.omega.push_back(std::pow(r, 4) * std::exp(-4.0 * r * r));
    }
    bool ok = true;
    std::string detail;
    for (const Weight& w : {Weight::unit(), Weight::log_pow(0.375), build_weight_from_spectrum(t)}) {
        const bool h = validate_admissible(w, default_radii()).pass();
        bool bounded = true;
        for (double s : {0.25, 0.5, 1.0, 2.0}) bounded = bounded && weight_growth_sweep(w, s).bounded;
        const PhiTable a(w, PhiTable::log_nodes(20)), b(w, PhiTable::log_nodes(40));
        const auto [ca, Ca] = equivalence_constants(a);
        const auto [cb, Cb] = equivalence_constants(b);
        const double drift = std::abs((Cb / cb) / (Ca / ca) - 1.0);
        const bool pass = h && bounded && drift < tol::bracket_drift && !a.any_flagged() && !b.any_flagged();
        ok = ok && pass;
        detail += fmt("[%s H1-H3 %s, C_sigma %s, C/c %.4f drift %.1e] ", w.kind() == WeightKind::TailBuilt ? "tail_built"
                                                                      : w.spec().c_str(),
                      h ? "ok" : "fail", bounded ? "finite" : "unbounded", Ca / ca, drift);
    }
    report(5, "weight machinery", ok, detail + fmt("(drift < %.0e)", tol::bracket_drift));
}

void c6() {
    const double lo = 2.0 * std::numbers::pi / ref_grid.l;
    KernelSpec k1;
    const auto xi = sample_xi(lo, ref_grid.xi_max(), 16);
    const auto m = difference_kernel_multiplier(k1, xi);
    double mn = INFINITY, mx = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        const double v = m[i].m / std::hypot(xi[i][0], xi[i][1]);
        mn = std::min(mn, v), mx = std::max(mx, v), sum += v;
    }
    const double spread = (mx - mn) / (sum / xi.size());

    KernelSpec kt{DifferenceOrder::TaylorRemoved, 1.5, 0, Weight::unit()};
    std::vector<Vec2> line;
    for (int i = 0; i < 10; ++i) {
        const double r = lo * std::pow(ref_grid.xi_max() / lo, i / 9.0);
        line.push_back({r * std::cos(0.3), r * std::sin(0.3)});
    }
    const auto mt = difference_kernel_multiplier(kt, line);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < 10; ++i) {
        const double x = std::log(std::hypot(line[i][0], line[i][1])), y = std::log(mt[i].m);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double p = (10 * sxy - sx * sy) / (10 * sxx - sx * sx);
    const double perr = std::abs(p / 3.0 - 1.0);

    const Weight lp = Weight::log_pow(0.375);
    const Grid fine(2 * ref_grid.n, ref_grid.l);
    const auto phi = PhiTable::for_grid(lp, fine);
    double worst = 0.0;
    std::string br;
    for (double s : {0.5, 1.0, 1.5}) {
        const KernelSpec z{DifferenceOrder::Second, s, 2, lp};
        double ratio[2];
        int j = 0;
        for (const auto& pts : {sample_xi(lo, ref_grid.xi_max(), 12), sample_xi(lo, fine.xi_max(), 24)}) {
            const auto mz = difference_kernel_multiplier(z, pts);
            double c = INFINITY, C = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const double r = std::hypot(pts[i][0], pts[i][1]);
                const double v = mz[i].m / (std::pow(r, 2 * s) * std::pow((*phi)(r), 2));
                c = std::min(c, v), C = std::max(C, v);
            }
            ratio[j++] = C / c;
        }
        const double d = std::abs(ratio[1] / ratio[0] - 1.0);
        worst = std::max(worst, d);
        br += fmt(" s=%.1f C/c %.4f", s, ratio[0]);
    }
    report(6, "kernel multiplier laws",
           spread < tol::tech1_spread && perr < tol::taylor_exponent && worst < tol::bracket_drift,
           fmt("first-order spread %.1e (< %.0e); taylor exponent %.6f vs 3 (%.1e < %.0e); bracket drift %.1e (< %.0e);",
               spread, tol::tech1_spread, p, perr, tol::taylor_exponent, worst, tol::bracket_drift) +
               br);
}

void c7() {
    const auto phi = PhiTable::for_grid(Weight::log_pow(0.375), ref_grid);
    const RealField base = random_family(ref_grid, 1, seed_a)[0];
    const MultiplierTable Bsym = phi->symbol(ref_grid, 2.5, 1);
    double worst = 0.0, split = 0.0;
    std::string d;
    for (double amp : {1e-3, 1e-4, 1e-5}) {
        const RealField f = (amp / max_abs(base)) * base;
        const Pairing p = dissipation_pairing(f, *phi, ref_q);
        const double B = std::pow(sobolev_norm(transform(f), 0.0, &Bsym), 2);
        worst = std::max(worst, std::abs(p.value / B - 1.0));
        split = std::max(split, std::abs(p.split - p.value) / std::abs(p.value));
        d += fmt(" %.0e:%.6f", amp, p.value / B);
    }
    const Pairing full = dissipation_pairing(base, *phi, ref_q);
    split = std::max(split, std::abs(full.split - full.value) / std::abs(full.value));
    report(7, "dissipation pairing", worst < tol::pairing_linear && split < tol::pairing_split,
           fmt("pairing/B_phi at amplitude%s; max |ratio - 1| %.1e (< %.0e); split mismatch %.1e (< %.0e)", d.c_str(),
               worst, tol::pairing_linear, split, tol::pairing_split));
}

void c8() {
    const auto unit = PhiTable::for_grid(Weight::unit(), ref_grid);
    const auto lp = PhiTable::for_grid(Weight::log_pow(0.375), ref_grid);
    const auto A = random_family(ref_grid, 10, seed_a), B = random_family(ref_grid, 10, seed_b);
    double u = 0.0, ca = 0.0, cb = 0.0;
    for (const auto* fam : {&A, &B})
        for (const auto& f : *fam)
            for (double s : {2.125, 2.25, 25.0 / 12.0}) u = std::max(u, interpolation_probe(f, *unit, s));
    for (const auto& f : A)
        for (double s : {2.125, 2.25, 25.0 / 12.0}) ca = std::max(ca, interpolation_probe(f, *lp, s));
    for (const auto& f : B)
        for (double s : {2.125, 2.25, 25.0 / 12.0}) cb = std::max(cb, interpolation_probe(f, *lp, s));
    report(8, "interpolation", u <= 1.0 + tol::unit_interpolation && cb <= tol::calibration_margin * ca,
           fmt("unit max ratio %.12f (<= 1 + %.0e); weighted calibrated %.4f, validated %.4f (<= %.1f x)", u,
               tol::unit_interpolation, ca, cb, tol::calibration_margin));
}

SimConfig decay_config(double amp) {
    SimConfig c;
    c.grid = Grid(64, 32.0);
    c.weight = Weight::log_pow(0.375);
    c.epsilon = 0.01;
    c.dt_initial = 0.25;
    c.t_end = 5.0;
    c.initial.kind = InitialData::Kind::Gaussian;
    c.initial.amplitude = amp;
    c.initial.width = 2.0;
    c.initial.center = mid;
    return c;
}

struct DecayRun {
    bool decays;
    bool aborted;
    double lip0, lip_max;
};

DecayRun decay_run(double amp) {
    const RunResult r = run(decay_config(amp));
    const auto& h = r.state.history;
    DecayRun d{!r.aborted, r.aborted, h.front().lip_f, 0.0};
    for (std::size_t i = 0; i < h.size(); ++i) {
        d.lip_max = std::max(d.lip_max, h[i].lip_f);
        if (i && h[i].A_phi > h[i - 1].A_phi) d.decays = false;
    }
    return d;
}

void c9() {
    const auto t0 = std::chrono::steady_clock::now();
    double lo = 0.01, hi = 40.0;
    const DecayRun a = decay_run(lo), b = decay_run(hi);
    std::string note;
    if (!a.decays || b.decays) {
        report(9, "small-data decay", false,
               fmt("no bracket: amplitude %.2g %s, %.2g %s", lo, a.decays ? "decays" : "grows", hi,
                   b.decays ? "decays" : "grows"));
        return;
    }
    for (int it = 0; it < 6; ++it) {
        const double m = std::sqrt(lo * hi);
        (decay_run(m).decays ? lo : hi) = m;
    }
    const DecayRun big = decay_run(10.0 * lo);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool growth = big.aborted || big.lip_max > big.lip0;
    report(9, "small-data decay", growth && secs <= tol::decay_budget_s,
           fmt("threshold amplitude in [%.4g, %.4g] (sigma 2, n 64, eps 0.01, t in [0, 5]); at 10x: lip %.3g -> max %.3g%s; "
               "%.0f s (<= %.0f)",
               lo, hi, big.lip0, big.lip_max, big.aborted ? ", aborted on blow-up" : "", secs, tol::decay_budget_s));
}

void c10() {
    // worker counts
    SimConfig c = decay_config(1.0);
    c.t_end = 0.5;
    c.dt_initial = 0.1;
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const RunResult r1 = run(c);
    omp_set_num_threads(2);
    const RunResult r2 = run(c);
    omp_set_num_threads(saved);
    const bool same = r1.state.fhat.c == r2.state.fhat.c && r1.csv == r2.csv;

    // first-order convergence in dt with the step pinned
    c.t_end = 0.4;
    c.cfl = 1e6;
    std::vector<SpectralField> out;
    for (double dt : {0.1, 0.05, 0.025}) {
        c.dt_initial = dt;
        out.push_back(run(c).state.fhat);
    }
    const double d1 = sobolev_norm(out[0] - out[1], 0.0), d2 = sobolev_norm(out[1] - out[2], 0.0);
    const double slope = std::log2(d1 / d2);

    // critical rescaling
    const RealField f = gaussian(ref_grid, 1.0, 1.25, mid);
    const SpectralField F = transform(f);
    double sc = 0.0;
    for (double lam : {0.5, 2.0}) {
        const SpectralField R = transform(rescale_critical(f, lam));
        sc = std::max(sc, std::abs(sobolev_norm(R, 2.0) / sobolev_norm(F, 2.0) - 1.0));
        sc = std::max(sc, std::abs(lip_norm(R) / lip_norm(F) - 1.0));
    }
    report(10, "determinism and convergence",
           same && slope >= tol::slope_lo && slope <= tol::slope_hi && sc < tol::scaling,
           fmt("1 vs 2 workers %s; dt slope %.3f (in [%.1f, %.1f]); rescaling drift %.1e (< %.0e)",
               same ? "bit-identical" : "differ", slope, tol::slope_lo, tol::slope_hi, sc, tol::scaling));
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    guarded(1, "L(0) = <D>", c1);
    guarded(2, "quasilinear decomposition", c2);
    guarded(3, "kernel divergence identity", c3);
    guarded(4, "weighted Laplacian, spectral vs finite difference", c4);
    guarded(5, "weight machinery", c5);
    guarded(6, "kernel multiplier laws", c6);
    guarded(7, "dissipation pairing", c7);
    guarded(8, "interpolation", c8);
    guarded(9, "small-data decay", c9);
    guarded(10, "determinism and convergence", c10);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d of 10 criteria failed (%.0f s)\n", failures, secs);
    return failures ? 1 : 0;
}
