#include "muskat/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "muskat/diagnostics.hpp"
#include "muskat/evolution.hpp"
#include "muskat/fields.hpp"
#include "muskat/ops.hpp"
#include "muskat/spectral.hpp"
#include "muskat/weights.hpp"

namespace muskat {

const char* const kThresholdsVersion = "1";

const std::vector<Threshold>& thresholds() {
    static const std::vector<Threshold> t = {
        {"bracket_drift", 5e-2, "relative change of C/c under doubled sampling"},
        {"calibration_margin", 1.5, "validation ratio over the calibrated constant"},
        {"decay_increase_rel", 1e-12, "allowed relative step increase of A_phi"},
        {"decomposition_residual", 1e-3, "L2 residual of the quasilinear split"},
        {"dsphi", 2e-2, "spectral vs finite-difference weighted Laplacian"},
        {"exact", 1e-10, "algebraic symmetries"},
        {"failures", 0.0, "count of failed sub-checks"},
        {"gagliardo", 1e-2, "double integral vs Fourier multiplier"},
        {"kernel_identity", 1e-3, "divergence identity relative L2 error"},
        {"kernel_exponent", 1e-2, "fitted exponent relative to 2b"},
        {"kernel_spread", 1e-3, "(max - min) / mean of m / |xi|"},
        {"l0_identity", 1e-3, "L(0) against <D> relative L2 error"},
        {"leibniz", 1e-12, "discrete product rule"},
        {"lipschitz_ratio", 1.0, "lip / bound"},
        {"logpow_asymptotic", 5e-2, "phi / log(2 + lambda)^a over the last decade"},
        {"pairing_linear", 1e-2, "pairing / B_phi - 1 at small amplitude"},
        {"pairing_split", 1e-10, "pairing vs its self-adjoint split"},
        {"refinement_slope", 1.0, "log2 error ratio under doubled quadrature"},
        {"remainder_violations", 0.0, "pointwise remainder bound violations"},
        {"scaling", 1e-6, "critical rescaling of H^2 and lip"},
        {"unit_interpolation", 1e-9, "excess of the kappa = 1 interpolation ratio over 1"},
    };
    return t;
}

double threshold(const std::string& name) {
    for (const auto& t : thresholds())
        if (name == t.name) return t.value;
    throw std::invalid_argument("unknown threshold '" + name + "'");
}

std::string suite_name(Suite s) {
    switch (s) {
        case Suite::Identities: return "identities";
        case Suite::Kernels: return "kernels";
        case Suite::Weights: return "weights";
        case Suite::Symmetry: return "symmetry";
        case Suite::Energy: return "energy";
        case Suite::Decay: return "decay";
    }
    return "?";
}

Suite parse_suite(const std::string& name) {
    for (Suite s : all_suites())
        if (suite_name(s) == name) return s;
    throw std::invalid_argument("unknown suite '" + name + "'");
}

std::vector<Suite> all_suites() {
    return {Suite::Identities, Suite::Kernels, Suite::Weights, Suite::Symmetry, Suite::Energy, Suite::Decay};
}

bool SuiteReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string SuiteReport::to_json() const {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["thresholds_version"] = version;
    j["pass"] = pass();
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["measured"] = std::isfinite(c.measured) ? nlohmann::ordered_json(c.measured) : nlohmann::ordered_json(nullptr);
        e["relation"] = c.relation;
        e["threshold"] = c.threshold;
        e["pass"] = c.pass;
        e["resolution"] = c.resolution;
        if (c.slope) e["slope"] = *c.slope;
        if (!c.values.empty()) {
            nlohmann::ordered_json v;
            for (const auto& [k, x] : c.values) v[k] = std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
            e["values"] = v;
        }
        if (!c.note.empty()) e["note"] = c.note;
        j["checks"].push_back(e);
    }
    return j.dump(2) + "\n";
}

std::string SuiteReport::to_table() const {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "suite %s (thresholds v%s): %s\n", suite.c_str(), version.c_str(),
                  pass() ? "PASS" : "FAIL");
    os << buf;
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof buf, "  %-4s %-36s %12.4e %-2s %10.3e", c.pass ? "ok" : "FAIL", c.name.c_str(),
                      c.measured, c.relation.c_str(), c.threshold);
        os << buf;
        if (c.slope) {
            std::snprintf(buf, sizeof buf, "  slope %.3f", *c.slope);
            os << buf;
        }
        if (!c.note.empty()) os << "  " << c.note;
        os << "\n";
    }
    return os.str();
}

namespace {

struct Ctx {
    Grid g;
    QuadratureSpec q;
    std::string res;
    std::vector<Check> out;
};

std::string resolution(const Grid& g, const QuadratureSpec& q) {
    std::ostringstream os;
    os << "n=" << g.n << " l=" << g.l << " n_r=" << q.n_r << " n_theta=" << q.n_theta;
    return os.str();
}

bool holds(double m, const std::string& rel, double t) {
    if (!std::isfinite(m)) return false;
    if (rel == "<") return m < t;
    if (rel == "<=") return m <= t;
    if (rel == ">=") return m >= t;
    if (rel == "==") return m == t;
    throw std::logic_error("bad relation " + rel);
}

Check& add(Ctx& c, const std::string& name, double measured, const std::string& rel, const std::string& thr,
           const QuadFlags* flags = nullptr) {
    Check k;
    k.name = name;
    k.measured = measured;
    k.relation = rel;
    k.threshold = threshold(thr);
    k.pass = holds(measured, rel, k.threshold);
    k.resolution = c.res;
    if (flags && flags->flagged) {
        k.pass = false;
        k.note = "quadrature flagged";
        k.values.push_back({"tail_estimate", flags->tail_estimate});
    }
    c.out.push_back(std::move(k));
    return c.out.back();
}

// failure inside an evaluator becomes a failed check
template <class F>
void guarded(Ctx& c, const std::string& name, F&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        Check k;
        k.name = name;
        k.measured = NAN;
        k.relation = "ok";
        k.resolution = c.res;
        k.note = std::string("error: ") + e.what();
        c.out.push_back(std::move(k));
    }
}

void merge(QuadFlags& a, const QuadFlags& b) {
    a.flagged = a.flagged || b.flagged;
    a.low_resolution = a.low_resolution || b.low_resolution;
    a.tail_estimate = std::max(a.tail_estimate, b.tail_estimate);
}

double rel_l2(const RealField& a, const RealField& b) { return l2_norm(a - b) / l2_norm(b); }

RealField scaled_to(const RealField& f, double amp) { return (amp / max_abs(f)) * f; }

Vec2 center(const Grid& g) { return {0.5 * g.l, 0.5 * g.l}; }

RealField minus_D(const RealField& f) {
    return -1.0 * inverse(apply_multiplier(transform(f), abs_xi_power(f.grid, 1.0)));
}

std::string fmt(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%g", x);
    return b;
}

// ---------------------------------------------------------------- identities

void identities(Ctx& c, const SuiteOptions& o) {
    const auto fam = random_family(c.g, o.family_size, o.seed);
    const QuadratureSpec fine = c.q.refined();

    guarded(c, "l0_identity", [&] {
        const RealField f = scaled_to(fam[0], 1e-6);
        const RealField lin = minus_D(f);
        const FieldResult a = muskat_rhs(f, c.q), b = muskat_rhs(f, fine);
        const double ea = rel_l2(a.value, lin), eb = rel_l2(b.value, lin);
        auto& k = add(c, "l0_identity", ea, "<", "l0_identity", &a.flags);
        k.values = {{"relerr_ref", ea}, {"relerr_fine", eb}};
        k.slope = std::log2(ea / eb);
        add(c, "l0_refinement_slope", *k.slope, ">=", "refinement_slope").resolution = c.res + " and refined";
    });

    guarded(c, "decomposition_residual", [&] {
        double worst = 0.0;
        QuadFlags fl;
        for (const auto& f : fam) {
            const auto d = decomposition(f, f, c.q);
            worst = std::max(worst, d.residual);
            merge(fl, d.flags);
        }
        auto& k = add(c, "decomposition_residual", worst, "<", "decomposition_residual", &fl);
        k.values = {{"fields", double(fam.size())}};
    });

    guarded(c, "decomposition_refinement_slope", [&] {
        const double ra = decomposition(fam[0], fam[0], c.q).residual;
        const double rb = decomposition(fam[0], fam[0], fine).residual;
        auto& k = add(c, "decomposition_refinement_slope", std::log2(ra / rb), ">=", "refinement_slope");
        k.values = {{"residual_ref", ra}, {"residual_fine", rb}};
        k.resolution = c.res + " and refined";
    });

    guarded(c, "remainder_bound_violations", [&] {
        std::size_t v = 0, n = 0;
        double worst = 0.0;
        for (const auto& f : fam) {
            const BoundAudit a = remainder_bound_audit(f, c.q);
            v += a.violations;
            n += a.samples;
            worst = std::max(worst, a.max_ratio);
        }
        auto& k = add(c, "remainder_bound_violations", double(v), "<=", "remainder_violations");
        k.values = {{"samples", double(n)}, {"max_ratio", worst}};
    });

    const RealField g = gaussian(c.g, 1.0, 2.0, center(c.g));
    const std::vector<std::pair<std::string, Vec2>> zetas = {
        {"0", {0.0, 0.0}}, {"(1,0)", {1.0, 0.0}}, {"(0.7,-0.7)", {0.7, -0.7}}};
    for (const auto& [label, z] : zetas) {
        const std::string name = "kernel_identity zeta=" + label;
        guarded(c, name, [&] { add(c, name, kernel_identity_check(z, g, c.q).relerr, "<", "kernel_identity"); });
    }

    for (const Weight& w : {Weight::unit(), Weight::log_pow(0.375)}) {
        const std::string name = "dsphi " + w.spec();
        guarded(c, name, [&] {
            const auto phi = PhiTable::for_grid(w, c.g);
            const RealField spec = inverse(apply_multiplier(transform(g), phi->symbol(c.g, 1.5, 1)));
            add(c, name, rel_l2(weighted_fd_laplacian(g, w, c.q), spec), "<", "dsphi");
        });
    }

    guarded(c, "leibniz", [&] {
        double worst = 0.0;
        for (const Vec2 h : {Vec2{0.37, -0.81}, Vec2{2.0, 1.25}, Vec2{-5.5, 0.0}})
            worst = std::max(worst, leibniz_audit(fam[1], fam[2], h));
        add(c, "leibniz", worst, "<", "leibniz");
    });
}

// ---------------------------------------------------------------- kernels

std::vector<Vec2> sample_xi(double lo, double hi, int count) {
    std::vector<Vec2> xi;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double r = lo * std::pow(hi / lo, count == 1 ? 0.0 : double(i) / (count - 1));
        xi.push_back({r * std::cos(i * golden), r * std::sin(i * golden)});
    }
    return xi;
}

double fitted_exponent(const KernelSpec& k, double lo, double hi, int count) {
    std::vector<Vec2> xi;
    for (int i = 0; i < count; ++i) {
        const double r = lo * std::pow(hi / lo, double(i) / (count - 1));
        xi.push_back({r * std::cos(0.3), r * std::sin(0.3)});
    }
    const auto m = difference_kernel_multiplier(k, xi);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < count; ++i) {
        const double x = std::log(std::hypot(xi[i][0], xi[i][1])), y = std::log(m[i].m);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

struct Bracket {
    double c = INFINITY, C = 0.0;
    double ratio() const { return C / c; }
};

// m / (|xi|^{2b} phi^gamma) over the sample
Bracket bracket(const KernelSpec& k, const PhiTable& phi, const std::vector<Vec2>& xi, double extra_b = 0.0,
                const KernelSpec* second = nullptr) {
    const auto m = difference_kernel_multiplier(k, xi);
    std::vector<KernelValue> m2;
    if (second) m2 = difference_kernel_multiplier(*second, xi);
    Bracket b;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        const double r = std::hypot(xi[i][0], xi[i][1]);
        double gamma = k.kappa_power, val = m[i].m;
        if (second) {
            gamma += second->kappa_power;
            val *= m2[i].m;
        }
        const double target = std::pow(r, 2.0 * (k.b + extra_b)) * std::pow(phi(r), gamma);
        b.c = std::min(b.c, val / target);
        b.C = std::max(b.C, val / target);
    }
    return b;
}

void bracket_check(Ctx& c, const std::string& name, const KernelSpec& k, const PhiTable& phi, const Grid& fine_grid,
                   const KernelSpec* second = nullptr) {
    guarded(c, name, [&] {
        const double lo = 2.0 * std::numbers::pi / c.g.l;
        const Bracket a = bracket(k, phi, sample_xi(lo, c.g.xi_max(), 12), second ? second->b : 0.0, second);
        const Bracket b = bracket(k, phi, sample_xi(lo, fine_grid.xi_max(), 24), second ? second->b : 0.0, second);
        auto& ch = add(c, name, std::abs(b.ratio() / a.ratio() - 1.0), "<", "bracket_drift");
        ch.values = {{"c", a.c}, {"C", a.C}, {"C_over_c", a.ratio()}, {"C_over_c_refined", b.ratio()}};
        ch.resolution = "12 then 24 samples up to xi_max of n=" + std::to_string(c.g.n) + " and n=" +
                        std::to_string(fine_grid.n);
    });
}

void kernels(Ctx& c, const SuiteOptions& o) {
    const Weight lp = Weight::log_pow(0.375);
    const Grid fine_grid(2 * c.g.n, c.g.l);
    const auto phi_lp = PhiTable::for_grid(lp, fine_grid);
    const double lo = 2.0 * std::numbers::pi / c.g.l;

    guarded(c, "tech1 spread", [&] {
        KernelSpec k;
        const auto xi = sample_xi(lo, c.g.xi_max(), 16);
        const auto m = difference_kernel_multiplier(k, xi);
        double mn = INFINITY, mx = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i) {
            const double v = m[i].m / std::hypot(xi[i][0], xi[i][1]);
            mn = std::min(mn, v), mx = std::max(mx, v), sum += v;
        }
        auto& ch = add(c, "tech1 spread", (mx - mn) / (sum / xi.size()), "<", "kernel_spread");
        ch.values = {{"constant", sum / xi.size()}};
        ch.resolution = "16 sampled frequencies";
    });

    auto exponent = [&](const std::string& name, DifferenceOrder ord, double b) {
        guarded(c, name, [&] {
            KernelSpec k;
            k.order = ord;
            k.b = b;
            const double p = fitted_exponent(k, lo, c.g.xi_max(), 10);
            auto& ch = add(c, name, std::abs(p / (2.0 * b) - 1.0), "<", "kernel_exponent");
            ch.values = {{"exponent", p}, {"expected", 2.0 * b}};
            ch.resolution = "10 sampled frequencies";
        });
    };
    exponent("tech2 exponent taylor b=1.5", DifferenceOrder::TaylorRemoved, 1.5);
    exponent("tech3 exponent second b=1.5", DifferenceOrder::Second, 1.5);

    KernelSpec t4{DifferenceOrder::First, 0.5, 2, lp};
    bracket_check(c, "tech4 bracket first b=0.5 gamma=2", t4, *phi_lp, fine_grid);
    KernelSpec t5a{DifferenceOrder::First, 0.5, 2, lp}, t5b{DifferenceOrder::First, 0.5, 0, lp};
    bracket_check(c, "tech5 bracket product b=c=0.5", t5a, *phi_lp, fine_grid, &t5b);
    KernelSpec d1{DifferenceOrder::Second, 1.0, 2, lp};
    bracket_check(c, "d1 bracket second b=1 gamma=2", d1, *phi_lp, fine_grid);
    for (double s : {0.5, 1.0, 1.5}) {
        KernelSpec z{DifferenceOrder::Second, s, 2, lp};
        bracket_check(c, "z30 bracket s=" + fmt(s), z, *phi_lp, fine_grid);
    }

    const auto fam = random_family(c.g, 2, o.seed);
    for (double s : {0.5, 0.75}) {
        const std::string name = "gagliardo s=" + fmt(s);
        guarded(c, name, [&] {
            KernelSpec k;
            k.b = s;
            const double C = difference_kernel_multiplier(k, Vec2{1.0, 0.0}).m;
            double worst = 0.0;
            std::vector<double> ratios;
            for (const auto& f : fam) {
                const double gq = gagliardo_seminorm(f, s, c.q).value;
                const double hs = sobolev_norm(transform(f), s);
                ratios.push_back(gq * gq / (hs * hs));
                worst = std::max(worst, std::abs(ratios.back() / C - 1.0));
            }
            auto& ch = add(c, name, worst, "<", "gagliardo");
            ch.values = {{"constant", C}};
            const std::string n2 = "gagliardo field independence s=" + fmt(s);
            auto& ci = add(c, n2, std::abs(ratios[0] / ratios[1] - 1.0), "<", "gagliardo");
            ci.values = {{"ratio_0", ratios[0]}, {"ratio_1", ratios[1]}};
        });
    }
}

// ---------------------------------------------------------------- weights

RadialTable gaussian_spectrum(double sigma) {
    RadialTable t;
    for (int i = 0; i <= 2000; ++i) {
        const double r = 10.0 * i / 2000;
        t.r.push_back(r);
        t.omega.push_back(std::pow(r, 4) * std::exp(-sigma * sigma * r * r));
    }
    return t;
}

void weights(Ctx& c, const SuiteOptions&) {
    c.res = "lambda in [1e-3, 1e6]";
    const RadialTable spec = gaussian_spectrum(2.0);
    Weight tb;
    guarded(c, "tail_built construction", [&] {
        tb = build_weight_from_spectrum(spec);
        const auto [a, b] = enhanced_integral(tb, spec);
        auto& ch = add(c, "tail_built integrability", std::isfinite(a / b) ? 0.0 : 1.0, "<=", "failures");
        ch.values = {{"weighted_mass", a}, {"mass", b}, {"levels", double(tb.levels().size())}};
    });
    std::vector<std::pair<std::string, Weight>> list = {{"unit", Weight::unit()}, {"log_pow(3/8)", Weight::log_pow(0.375)}};
    if (tb.kind() == WeightKind::TailBuilt) list.push_back({"tail_built(gaussian)", tb});

    for (const auto& [label, w] : list) {
        guarded(c, "admissible " + label, [&] {
            const ValidationReport v = validate_admissible(w, default_radii());
            auto& ch = add(c, "admissible " + label, v.pass() ? 0.0 : 1.0, "<=", "failures");
            ch.values = {{"monotone", double(v.monotone)}, {"doubling", double(v.doubling)},
                         {"log_bounded", double(v.log_bounded)}, {"c0", v.c0}};
        });
        guarded(c, "growth " + label, [&] {
            int unbounded = 0;
            Check probe;
            for (double s : {0.25, 0.5, 1.0, 2.0}) {
                const GrowthSweep g = weight_growth_sweep(w, s);
                unbounded += !g.bounded;
                probe.values.push_back({"C_sigma=" + fmt(s), g.ranges.back().c_kappa2});
            }
            auto& ch = add(c, "growth " + label, double(unbounded), "<=", "failures");
            ch.values = probe.values;
        });
        guarded(c, "n60b drift " + label, [&] {
            const PhiTable a(w, PhiTable::log_nodes(20)), b(w, PhiTable::log_nodes(40));
            const auto [ca, Ca] = equivalence_constants(a);
            const auto [cb, Cb] = equivalence_constants(b);
            const double ra = Ca / ca, rb = Cb / cb;
            auto& ch = add(c, "n60b drift " + label, std::abs(rb / ra - 1.0), "<", "bracket_drift",
                           nullptr);
            ch.values = {{"c", ca}, {"C", Ca}, {"C_over_c", ra}, {"C_over_c_doubled", rb}};
            if (a.any_flagged() || b.any_flagged()) {
                ch.pass = false;
                ch.note = "phi quadrature flagged";
            }
        });
    }

    guarded(c, "control r^0.1 rejected", [&] {
        std::vector<double> r, e;
        for (int k = 0; k <= 12; ++k) {
            r.push_back(std::pow(10.0, k - 3));
            e.push_back(std::pow(10.0, 0.2 * (k - 3)));
        }
        const Weight w = Weight::tail_built_unchecked(r, e);
        const ValidationReport v = validate_admissible(w, default_radii());
        auto& ch = add(c, "control r^0.1 rejected", v.pass() ? 1.0 : 0.0, "<=", "failures");
        ch.values = {{"log_bounded", double(v.log_bounded)}};
    });

    guarded(c, "logpow asymptotic", [&] {
        const double a = 0.375;
        const Weight w = Weight::log_pow(a);
        const PhiTable p(w, PhiTable::log_nodes(20, 1e4, 1e6));
        const double r1 = p(1e5) / std::pow(std::log(2.0 + 1e5), a);
        const double r2 = p(1e6) / std::pow(std::log(2.0 + 1e6), a);
        auto& ch = add(c, "logpow asymptotic", std::abs(r2 / r1 - 1.0), "<", "logpow_asymptotic");
        ch.values = {{"ratio_1e5", r1}, {"ratio_1e6", r2}};
    });
}

// ---------------------------------------------------------------- symmetry

void symmetry(Ctx& c, const SuiteOptions& o) {
    const auto fam = random_family(c.g, 2, o.seed);
    const RealField& f = fam[0];
    const RealField& g = fam[1];

    guarded(c, "translation equivariance", [&] {
        const Vec2 beta{6 * c.g.h(), -4 * c.g.h()};   // even shifts land on the padded lattice
        const RealField fs = inverse(shift(transform(f), beta));
        const RealField a = muskat_rhs(fs, c.q).value;
        const RealField b = inverse(shift(transform(muskat_rhs(f, c.q).value), beta));
        add(c, "translation equivariance", max_abs(a - b) / max_abs(b), "<", "exact");
    });

    guarded(c, "drift even in f", [&] {
        const DriftResult a = drift(f, c.q), b = drift(-1.0 * f, c.q);
        const double scale = std::max(max_abs(a.v[0]), max_abs(a.v[1]));
        const double d = std::max(max_abs(a.v[0] - b.v[0]), max_abs(a.v[1] - b.v[1]));
        add(c, "drift even in f", d / scale, "<", "exact");
    });

    guarded(c, "elliptic part even in f", [&] {
        const RealField a = elliptic_part(f, g, c.q).value, b = elliptic_part(-1.0 * f, g, c.q).value;
        add(c, "elliptic part even in f", max_abs(a - b) / max_abs(a), "<", "exact");
    });

    const RealField narrow = gaussian(c.g, 1.0, 1.25, center(c.g));
    for (double lam : {0.5, 2.0}) {
        const std::string tag = " lambda=" + fmt(lam);
        guarded(c, "critical scaling" + tag, [&] {
            const RealField r = rescale_critical(narrow, lam);
            const SpectralField F = transform(narrow), R = transform(r);
            const double h = std::abs(sobolev_norm(R, 2.0) / sobolev_norm(F, 2.0) - 1.0);
            const double l = std::abs(lip_norm(R) / lip_norm(F) - 1.0);
            add(c, "critical scaling h2" + tag, h, "<", "scaling");
            add(c, "critical scaling lip" + tag, l, "<", "scaling");
        });
    }
}

// ---------------------------------------------------------------- energy

void energy(Ctx& c, const SuiteOptions& o) {
    const Weight lp = Weight::log_pow(0.375);
    const auto phi = PhiTable::for_grid(lp, c.g);
    const auto phi1 = PhiTable::for_grid(Weight::unit(), c.g);
    const auto famA = random_family(c.g, o.family_size, o.seed);
    const auto famB = random_family(c.g, o.family_size, o.seed + 1);

    for (double amp : {1e-3, 1e-4, 1e-5}) {
        const std::string name = "pairing linearization amp=" + fmt(amp);
        guarded(c, name, [&] {
            const RealField f = scaled_to(famA[0], amp);
            const Pairing p = dissipation_pairing(f, *phi, c.q);
            const SpectralField F = transform(f);
            const MultiplierTable Bsym = phi->symbol(c.g, 2.5, 1);
            const double B = std::pow(sobolev_norm(F, 0.0, &Bsym), 2);
            auto& ch = add(c, name, std::abs(p.value / B - 1.0), "<", "pairing_linear", &p.flags);
            ch.values = {{"pairing", p.value}, {"B_phi", B}};
        });
    }

    guarded(c, "pairing split", [&] {
        const Pairing p = dissipation_pairing(famA[0], *phi, c.q);
        auto& ch = add(c, "pairing split", std::abs(p.split - p.value) / std::abs(p.value), "<", "pairing_split");
        ch.values = {{"value", p.value}, {"split", p.split}};
    });

    guarded(c, "interpolation unit", [&] {
        double worst = 0.0;
        for (const auto* fam : {&famA, &famB})
            for (const auto& f : *fam)
                for (double s : {2.125, 2.25, 25.0 / 12.0}) worst = std::max(worst, interpolation_probe(f, *phi1, s));
        auto& ch = add(c, "interpolation unit", worst - 1.0, "<=", "unit_interpolation");
        ch.values = {{"max_ratio", worst}};
    });

    guarded(c, "interpolation weighted", [&] {
        double ca = 0.0, cb = 0.0;
        for (const auto& f : famA) ca = std::max(ca, interpolation_probe(f, *phi, 2.25));
        for (const auto& f : famB) cb = std::max(cb, interpolation_probe(f, *phi, 2.25));
        auto& ch = add(c, "interpolation weighted", cb / ca, "<=", "calibration_margin");
        ch.values = {{"calibrated", ca}, {"validated", cb}};
    });

    guarded(c, "lipschitz probe", [&] {
        double worst = 0.0;
        Check probe;
        for (double amp : {1e-3, 1e-2, 1e-1, 1.0}) {
            const LipschitzReport r = lipschitz_probe(gaussian(c.g, amp, 2.0, center(c.g)), *phi);
            worst = std::max(worst, r.ratio);
            probe.values.push_back({"ratio_amp=" + fmt(amp), r.ratio});
        }
        auto& ch = add(c, "lipschitz probe", worst, "<=", "lipschitz_ratio");
        ch.values = probe.values;
    });

    guarded(c, "pairing lower bound", [&] {
        // calibrate C in pairing >= cubic - C error on A, assert on B
        auto slack = [&](const RealField& f, bool bracket) {
            const RealField rhs = muskat_rhs(f, c.q).value;
            const DiagnosticsRecord r = record(f, *phi, c.q, 0.0, &rhs);
            const PairingBound b = pairing_bound(r);
            const double coerc = bracket ? b.bracket : b.cubic;
            return std::max(0.0, (coerc - r.dissipation) / b.error);
        };
        std::vector<double> sa, sb, ta, tb;
        for (const auto& f : famA) sa.push_back(slack(f, false)), ta.push_back(slack(f, true));
        for (const auto& f : famB) sb.push_back(slack(f, false)), tb.push_back(slack(f, true));
        const double Ca = *std::max_element(sa.begin(), sa.end());
        const double Cb = *std::max_element(sb.begin(), sb.end());
        const double Ka = *std::max_element(ta.begin(), ta.end());
        const double Kb = *std::max_element(tb.begin(), tb.end());
        // zero slack on A means B must show zero slack too
        const double m = Ca > 0 ? Cb / Ca : (Cb > 0 ? INFINITY : 0.0);
        auto& ch = add(c, "pairing lower bound", m, "<=", "calibration_margin");
        ch.values = {{"C_calibrated", Ca}, {"C_validated", Cb}, {"C_bracket_calibrated", Ka},
                     {"C_bracket_validated", Kb}};
    });
}

// ---------------------------------------------------------------- decay

void decay(Ctx& c, const SuiteOptions&) {
    guarded(c, "decay monotone", [&] {
        SimConfig cfg;
        cfg.grid = c.g;
        cfg.quad = c.q;
        cfg.epsilon = 0.1;
        cfg.dt_initial = 0.1;
        cfg.t_end = 1.0;
        cfg.initial.kind = InitialData::Kind::Gaussian;
        cfg.initial.amplitude = 1e-2;
        cfg.initial.width = 2.0;
        cfg.initial.center = center(c.g);
        const RunResult r = run(cfg);
        int increases = 0;
        const auto& h = r.state.history;
        for (std::size_t i = 1; i < h.size(); ++i)
            if (h[i].A_phi > h[i - 1].A_phi * (1.0 + threshold("decay_increase_rel"))) ++increases;
        auto& ch = add(c, "decay monotone", double(increases) + (r.aborted ? 1.0 : 0.0), "<=", "failures");
        ch.values = {{"records", double(h.size())}, {"A_first", h.front().A_phi}, {"A_last", h.back().A_phi}};
        if (r.aborted) ch.note = r.status;
    });
}

}  // namespace

SuiteReport run_suite(Suite s, const SuiteOptions& opt) {
    opt.quad.validate(opt.grid);
    Ctx c{opt.grid, opt.quad, resolution(opt.grid, opt.quad), {}};
    switch (s) {
        case Suite::Identities: identities(c, opt); break;
        case Suite::Kernels: kernels(c, opt); break;
        case Suite::Weights: weights(c, opt); break;
        case Suite::Symmetry: symmetry(c, opt); break;
        case Suite::Energy: energy(c, opt); break;
        case Suite::Decay: decay(c, opt); break;
    }
    std::stable_sort(c.out.begin(), c.out.end(), [](const Check& a, const Check& b) { return a.name < b.name; });
    return {suite_name(s), kThresholdsVersion, std::move(c.out)};
}

}  // namespace muskat
