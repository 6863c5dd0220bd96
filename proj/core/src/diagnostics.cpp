#include "muskat/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "muskat/ops.hpp"
#include "numerics.hpp"

namespace muskat {

namespace {

constexpr double pi = std::numbers::pi;

struct Energies {
    double A = 0.0, B = 0.0, Z = 0.0, mu = 1.0;
};

Energies energies(const SpectralField& F, const PhiTable& phi) {
    const MultiplierTable w = phi.symbol(F.grid, 0.0, 1);
    Energies e;
    e.A = std::pow(sobolev_norm(F, 2.0, &w), 2);
    e.B = std::pow(sobolev_norm(F, 2.5, &w), 2);
    e.Z = std::pow(sobolev_norm(F, 3.0, &w), 2);
    e.mu = e.A > 0.0 ? 1.0 / phi(e.B / e.A) : 1.0;
    return e;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string csv_header() {
    std::string h = "t,A_phi,B_phi,Z_phi,mu_phi,sup_f,lip_f";
    for (double s : kRecordOrders) h += ",hs_" + fmt(s);
    h += ",dissipation,low_resolution,tail_estimate,flagged";
    return h;
}

int csv_columns() { return 7 + int(kRecordOrders.size()) + 4; }

std::string csv_row(const DiagnosticsRecord& r) {
    std::string s = fmt(r.t);
    for (double v : {r.A_phi, r.B_phi, r.Z_phi, r.mu_phi, r.sup_f, r.lip_f}) s += "," + fmt(v);
    for (double v : r.hs) s += "," + fmt(v);
    s += "," + fmt(r.dissipation);
    s += r.flags.low_resolution ? ",1" : ",0";
    s += "," + fmt(r.flags.tail_estimate);
    s += r.flags.flagged ? ",1" : ",0";
    return s;
}

Pairing dissipation_pairing(const RealField& f, const PhiTable& phi, const QuadratureSpec& q,
                            const RealField* rhs) {
    Pairing p;
    const SpectralField F = transform(f);
    RealField minus_l;
    if (rhs) {
        minus_l = *rhs;
    } else {
        FieldResult r = muskat_rhs(f, q);
        minus_l = std::move(r.value);
        p.flags = r.flags;
    }
    const SpectralField LF = -1.0 * transform(minus_l);
    const Grid& g = f.grid;
    p.value = spectral_inner(LF, apply_multiplier(F, phi.symbol(g, 4.0, 2)));
    p.split = spectral_inner(apply_multiplier(LF, phi.symbol(g, 1.5, 1)), apply_multiplier(F, phi.symbol(g, 2.5, 1)));
    return p;
}

DiagnosticsRecord record(const RealField& f, const PhiTable& phi, const QuadratureSpec& q, double t,
                         const RealField* rhs) {
    DiagnosticsRecord r;
    r.t = t;
    const SpectralField F = transform(f);
    const Energies e = energies(F, phi);
    r.A_phi = e.A;
    r.B_phi = e.B;
    r.Z_phi = e.Z;
    r.mu_phi = e.mu;
#pragma omp parallel for
    for (int i = 0; i < int(kRecordOrders.size()); ++i) r.hs[i] = sobolev_norm(F, kRecordOrders[i]);
    r.sup_f = sup_norm(F);
    r.lip_f = lip_norm(F);
    if (max_abs(f) > 0.0) {
        const Pairing p = dissipation_pairing(f, phi, q, rhs);
        r.dissipation = p.value;
        r.flags = p.flags;
    }
    return r;
}

DiagnosticsRecord record(const RealField& f, const Weight& w, const QuadratureSpec& q, double t) {
    return record(f, *PhiTable::for_grid(w, f.grid), q, t);
}

PairingBound pairing_bound(const DiagnosticsRecord& r) {
    PairingBound b;
    b.cubic = r.B_phi / (1.0 + std::pow(r.lip_f, 3));
    b.bracket = r.B_phi / std::pow(1.0 + r.lip_f * r.lip_f, 1.5);
    b.error = std::sqrt(r.A_phi) * (1.0 + r.A_phi) * r.B_phi * r.mu_phi;
    return b;
}

void KernelSpec::validate() const {
    if (!(kappa_power == 0 || kappa_power == 2 || kappa_power == 4))
        throw std::invalid_argument("kernel: gamma must be 0, 2 or 4");
    const bool ok = order == DifferenceOrder::First    ? b > 0.0 && b < 1.0
                    : order == DifferenceOrder::Second ? b > 0.0 && b < 2.0
                                                       : b > 1.0 && b < 2.0;
    if (!ok) throw std::invalid_argument("kernel: b outside the convergent range for this order");
}

KernelSpec KernelSpec::parse(const std::string& text, const Weight& w) {
    KernelSpec k;
    k.weight = w;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("kernel: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (key == "order") {
            if (val == "first" || val == "1")
                k.order = DifferenceOrder::First;
            else if (val == "second" || val == "2")
                k.order = DifferenceOrder::Second;
            else if (val == "taylor")
                k.order = DifferenceOrder::TaylorRemoved;
            else
                throw std::invalid_argument("kernel: unknown order '" + val + "'");
        } else if (key == "b") {
            k.b = std::stod(val);
        } else if (key == "gamma") {
            k.kappa_power = std::stoi(val);
        } else {
            throw std::invalid_argument("kernel: unknown key '" + key + "'");
        }
    }
    k.validate();
    return k;
}

std::string KernelSpec::spec() const {
    const char* o = order == DifferenceOrder::First ? "first" : order == DifferenceOrder::Second ? "second" : "taylor";
    return std::string("order=") + o + ",b=" + fmt(b) + ",gamma=" + std::to_string(kappa_power);
}

namespace {

// |t|^{2b} int_0^inf K(u) kappa^gamma(|t|/u) u^{-1-2b} du
KernelValue radial(const KernelSpec& k, double t, detail::Integrator& in) {
    KernelValue out;
    t = std::abs(t);
    if (t == 0.0) return out;
    auto kap = [&](double u) { return k.kappa_power ? std::pow(k.weight(t / u), k.kappa_power) : 1.0; };
    auto base = [&](double u) { return kap(u) * std::pow(u, -1.0 - 2.0 * k.b); };
    // half-angle forms keep the cancellation near u = 0 exact
    auto head = [&](double u) {
        const double s = std::sin(0.5 * u), c2 = 2.0 * s * s;
        double v;
        if (k.order == DifferenceOrder::First)
            v = 2.0 * c2;
        else if (k.order == DifferenceOrder::Second)
            v = 4.0 * c2 * c2;
        else {
            const double d = u - std::sin(u);
            v = c2 * c2 + d * d;
        }
        return v * base(u);
    };
    const double tol = 1e-11;
    detail::QuadResult h = in.qags(head, 0.0, 1.0, 0.0, tol);
    out.m = h.value;
    out.abserr = h.abserr;
    auto add = [&](const detail::QuadResult& r, double c) {
        out.m += c * r.value;
        out.abserr += std::abs(c) * r.abserr;
    };
    switch (k.order) {
    case DifferenceOrder::First:
        add(in.qagiu(base, 1.0, 0.0, tol), 2.0);
        add(in.qawf_cos(base, 1.0, 1.0, 1e-13), -2.0);
        break;
    case DifferenceOrder::Second:
        add(in.qagiu(base, 1.0, 0.0, tol), 6.0);
        add(in.qawf_cos(base, 1.0, 1.0, 1e-13), -8.0);
        add(in.qawf_cos(base, 1.0, 2.0, 1e-13), 2.0);
        break;
    case DifferenceOrder::TaylorRemoved: {
        auto quad = [&](double u) { return (2.0 + u * u) * base(u); };
        auto lin = [&](double u) { return u * base(u); };
        add(in.qagiu(quad, 1.0, 0.0, tol), 1.0);
        add(in.qawf_cos(base, 1.0, 1.0, 1e-13), -2.0);
        add(in.qawf_sin(lin, 1.0, 1.0, 1e-13), -2.0);
        break;
    }
    }
    const double scale = std::pow(t, 2.0 * k.b);
    out.m *= scale;
    out.abserr *= scale;
    return out;
}

}  // namespace

KernelValue difference_kernel_multiplier(const KernelSpec& k, const Vec2& xi) {
    k.validate();
    KernelValue out;
    const double rho = std::hypot(xi[0], xi[1]);
    if (rho == 0.0) return out;
    detail::Integrator outer, inner;
    double err = 0.0;
    auto ang = [&](double th) {
        const KernelValue v = radial(k, xi[0] * std::cos(th) + xi[1] * std::sin(th), inner);
        err = std::max(err, v.abserr);
        return v.m;
    };
    // the integrand has a kink where alpha . xi = 0
    const double th0 = std::fmod(std::atan2(xi[1], xi[0]) + 0.5 * pi + 2.0 * pi, pi);
    for (auto [a, b] : {std::pair{0.0, th0}, std::pair{th0, pi}}) {
        if (b - a < 1e-14) continue;
        const detail::QuadResult r = outer.qags(ang, a, b, 0.0, 1e-10);
        out.m += 2.0 * r.value;
        out.abserr += 2.0 * r.abserr;
    }
    out.abserr += 2.0 * pi * err;
    return out;
}

std::vector<KernelValue> difference_kernel_multiplier(const KernelSpec& k, const std::vector<Vec2>& xi) {
    std::vector<KernelValue> out(xi.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < long(xi.size()); ++i) out[i] = difference_kernel_multiplier(k, xi[i]);
    return out;
}

double interpolation_probe(const RealField& f, const PhiTable& phi, double s) {
    if (!(s > 2.0 && s < 2.5)) throw std::invalid_argument("interpolation_probe: s must lie in (2, 5/2)");
    const SpectralField F = transform(f);
    const Energies e = energies(F, phi);
    if (!(e.A > 0.0 && e.B > 0.0)) throw std::invalid_argument("interpolation_probe: degenerate field");
    return sobolev_norm(F, s) / (e.mu * std::pow(e.A, 2.5 - s) * std::pow(e.B, s - 2.0));
}

LipschitzReport lipschitz_probe(const RealField& f, const PhiTable& phi) {
    const SpectralField F = transform(f);
    const Energies e = energies(F, phi);
    const double a = phi.weight().kind() == WeightKind::LogPow ? phi.weight().exponent() : 0.0;
    LipschitzReport r;
    r.lip = lip_norm(F);
    r.bound = 1.0 + sup_norm(F) + e.A * std::pow(std::log(2.0 + e.B), 0.5 * (1.0 - 2.0 * a));
    r.ratio = r.lip / r.bound;
    return r;
}

}  // namespace muskat
