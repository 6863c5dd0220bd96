#include "muskat/weights.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "numerics.hpp"

namespace muskat {

namespace {

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument("weight: bad number '" + item + "'");
    }
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    char buf[40];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        if (i) s += ',';
        s += buf;
    }
    return s;
}

}  // namespace

Weight Weight::unit() { return Weight{}; }

Weight Weight::log_pow(double a) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("log_pow: a must be >= 0");
    Weight w;
    w.kind_ = a == 0.0 ? WeightKind::Unit : WeightKind::LogPow;
    w.a_ = a;
    if (a == 0.0) w.a_ = 0.0;
    return w;
}

Weight Weight::tail_built_unchecked(std::vector<double> radii, std::vector<double> levels) {
    if (radii.empty() || radii.size() != levels.size())
        throw std::invalid_argument("tail_built: breakpoints and levels must be aligned and nonempty");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] >= 0.0) || !std::isfinite(levels[i]))
            throw std::invalid_argument("tail_built: invalid entry");
        if (i && !(radii[i] > radii[i - 1]))
            throw std::invalid_argument("tail_built: radii must increase");
    }
    Weight w;
    w.kind_ = WeightKind::TailBuilt;
    w.r_ = std::move(radii);
    w.eta_ = std::move(levels);
    return w;
}

Weight Weight::tail_built(std::vector<double> radii, std::vector<double> levels) {
    Weight w = tail_built_unchecked(std::move(radii), std::move(levels));
    if (!validate_admissible(w, default_radii()).pass())
        throw std::domain_error("tail_built: weight is not admissible");
    return w;
}

Weight Weight::parse(const std::string& spec) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("weight spec: expected key=value in '" + item + "'");
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    const std::string kind = kv.count("kind") ? kv["kind"] : "unit";
    if (kind == "unit") return unit();
    if (kind == "log_pow") {
        if (!kv.count("a")) throw std::invalid_argument("weight spec: log_pow needs a");
        return log_pow(std::stod(kv["a"]));
    }
    if (kind == "tail_built")
        return tail_built(parse_list(kv["breakpoints"]), parse_list(kv["levels"]));
    throw std::invalid_argument("weight spec: unknown kind '" + kind + "'");
}

std::string Weight::spec() const {
    switch (kind_) {
        case WeightKind::Unit: return "kind=unit";
        case WeightKind::LogPow: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "kind=log_pow;a=%.17g", a_);
            return buf;
        }
        case WeightKind::TailBuilt:
            return "kind=tail_built;breakpoints=" + join(r_) + ";levels=" + join(eta_);
    }
    return {};
}

double Weight::eta_at(double r) const {
    const double s = std::log(4.0 + r);
    if (r <= r_.front()) return eta_.front() * s / std::log(4.0 + r_.front());
    if (r >= r_.back()) return eta_.back();
    const auto it = std::upper_bound(r_.begin(), r_.end(), r);
    const std::size_t j = std::size_t(it - r_.begin());
    const double s0 = std::log(4.0 + r_[j - 1]), s1 = std::log(4.0 + r_[j]);
    const double t = (s - s0) / (s1 - s0);
    return eta_[j - 1] + t * (eta_[j] - eta_[j - 1]);
}

double Weight::operator()(double r) const {
    switch (kind_) {
        case WeightKind::Unit: return 1.0;
        case WeightKind::LogPow: return std::pow(std::log(4.0 + r), a_);
        case WeightKind::TailBuilt: return std::max(1.0, std::sqrt(std::max(0.0, eta_at(r))));
    }
    return 1.0;
}

std::vector<double> default_radii(int count, double lo, double hi) {
    std::vector<double> r(count);
    for (int i = 0; i < count; ++i)
        r[i] = lo * std::pow(hi / lo, double(i) / (count - 1));
    return r;
}

ValidationReport validate_admissible(const Weight& k, const std::vector<double>& radii) {
    ValidationReport rep;
    rep.monotone = rep.log_bounded = true;
    double prev = 0.0, prev_ratio = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i], v = k(r);
        if (!(v >= 1.0)) throw std::domain_error("validate_admissible: kappa < 1 at r = " + std::to_string(r));
        const double ratio = v / std::log(4.0 + r);
        if (i) {
            if (v < prev * (1.0 - 1e-12)) rep.monotone = false;
            if (ratio > prev_ratio * (1.0 + 1e-12)) rep.log_bounded = false;
        }
        rep.c0 = std::max(rep.c0, k(2.0 * r) / v);
        prev = v;
        prev_ratio = ratio;
    }
    rep.doubling = std::isfinite(rep.c0) && rep.c0 <= 2.0;
    return rep;
}

PhiValue phi_value(const Weight& k, double lambda) {
    using detail::Integrator;
    Integrator in;
    auto kap = [&](double r) { return k(lambda / r); };
    // (1 - cos r) = 2 sin^2(r/2) keeps the small-r integrand accurate
    auto head = in.qags(
        [&](double r) {
            const double s = std::sin(0.5 * r);
            return 2.0 * s * s * std::pow(r, -2.5) * kap(r);
        },
        0.0, 1.0, 1e-13, 1e-11);
    auto flat = in.qagiu([&](double r) { return std::pow(r, -2.5) * kap(r); }, 1.0, 1e-13, 1e-11);
    auto osc = in.qawf_cos([&](double r) { return std::pow(r, -2.5) * kap(r); }, 1.0, 1.0, 1e-12);
    const double val = 4.0 * std::numbers::pi * (head.value + flat.value - osc.value);
    const double err = 4.0 * std::numbers::pi * (head.abserr + flat.abserr + osc.abserr);
    const double rel = err / std::abs(val);
    return {val, rel, !head.trusted() || !flat.trusted() || !osc.trusted() || !(rel <= 1e-6)};
}

double phi_unit() {
    static const double v = phi_value(Weight::unit(), 0.0).phi;
    return v;
}

namespace {
using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
}

PhiTable::PhiTable(const Weight& k, std::vector<double> lambdas) : w_(k) {
    for (double x : lambdas)
        if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("PhiTable: lambdas must be >= 0");
    std::sort(lambdas.begin(), lambdas.end());
    lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
    lambdas.erase(std::remove(lambdas.begin(), lambdas.end(), 0.0), lambdas.end());
    if (lambdas.size() < 4) throw std::invalid_argument("PhiTable: need at least four positive lambdas");
    lam_ = std::move(lambdas);
    phi_.resize(lam_.size());
    err_.resize(lam_.size());
    const PhiValue z = phi_value(k, 0.0);
    phi_zero_ = z.phi;
    flagged_ = z.flagged;
    std::vector<PhiValue> vals(lam_.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < long(lam_.size()); ++i) vals[i] = phi_value(k, lam_[i]);
    for (std::size_t i = 0; i < lam_.size(); ++i) {
        phi_[i] = vals[i].phi;
        err_[i] = vals[i].rel_err;
        flagged_ = flagged_ || vals[i].flagged;
    }
    std::vector<double> x(lam_.size()), y(phi_);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::log(lam_[i]);
    interp_ = std::make_shared<Pchip>(std::move(x), std::move(y));
}

double PhiTable::operator()(double lambda) const {
    if (lambda <= 0.0) return phi_zero_;
    if (lambda <= lam_.front())
        return phi_zero_ + (phi_.front() - phi_zero_) * lambda / lam_.front();
    if (lambda >= lam_.back()) return phi_.back();
    const auto it = std::lower_bound(lam_.begin(), lam_.end(), lambda);
    if (*it == lambda) return phi_[std::size_t(it - lam_.begin())];
    return (*static_cast<const Pchip*>(interp_.get()))(std::log(lambda));
}

std::vector<double> PhiTable::log_nodes(int per_decade, double lo, double hi) {
    const int count = int(std::lround(std::log10(hi / lo) * per_decade)) + 1;
    return default_radii(count, lo, hi);
}

std::shared_ptr<const PhiTable> PhiTable::for_grid(const Weight& k, const Grid& g, int per_decade) {
    static std::mutex mtx;
    static std::map<std::string, std::shared_ptr<const PhiTable>> cache;
    char key[96];
    std::snprintf(key, sizeof key, "|%d|%.17g|%d", g.n, g.l, per_decade);
    const std::string id = k.spec() + key;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(id);
        if (it != cache.end()) return it->second;
    }
    std::vector<double> lam = log_nodes(per_decade);
    const int kmax = g.n / 2;
    for (int a = 0; a <= kmax; ++a)
        for (int b = a; b <= kmax; ++b)
            if (a || b) lam.push_back(2.0 * std::numbers::pi * std::sqrt(double(a * a + b * b)) / g.l);
    auto table = std::make_shared<const PhiTable>(k, std::move(lam));
    std::lock_guard<std::mutex> lock(mtx);
    cache.emplace(id, table);
    return table;
}

MultiplierTable PhiTable::symbol(const Grid& g, double s, int p) const {
    MultiplierTable t(g);
    std::map<long, double> memo;
    for (int a = 0; a < g.n; ++a)
        for (int b = 0; b < g.n; ++b) {
            if (g.nyquist(a) || g.nyquist(b)) continue;
            const long k2 = long(g.wave(a)) * g.wave(a) + long(g.wave(b)) * g.wave(b);
            if (k2 == 0) continue;
            auto it = memo.find(k2);
            if (it == memo.end()) {
                const double r = 2.0 * std::numbers::pi * std::sqrt(double(k2)) / g.l;
                it = memo.emplace(k2, std::pow(r, s) * std::pow((*this)(r), p)).first;
            }
            t(a, b) = it->second;
        }
    return t;
}

std::pair<double, double> equivalence_constants(const PhiTable& p, double lo, double hi) {
    double c = INFINITY, C = 0.0;
    for (std::size_t i = 0; i < p.lambdas().size(); ++i) {
        const double x = p.lambdas()[i];
        if (x < lo * (1 - 1e-12) || x > hi * (1 + 1e-12)) continue;
        const double r = p.values()[i] / p.weight()(x);
        c = std::min(c, r);
        C = std::max(C, r);
    }
    return {c, C};
}

GrowthReport weight_growth_check(const Weight& k, double sigma, double lo, double hi, int count) {
    GrowthReport rep;
    rep.sigma = sigma;
    rep.lo = lo;
    rep.hi = hi;
    const std::vector<double> r = default_radii(count, lo, hi);
    std::vector<double> a(r.size()), b(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double kv = k(1.0 / r[i]);
        a[i] = std::pow(r[i], sigma) * kv;
        b[i] = std::pow(r[i], sigma) * kv * kv;
    }
    // for each mu, the worst r <= mu is the running maximum
    double ma = 0.0, mb = 0.0;
    rep.c_kappa = rep.c_kappa2 = 1.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
        ma = std::max(ma, a[j]);
        mb = std::max(mb, b[j]);
        rep.c_kappa = std::max(rep.c_kappa, ma / a[j]);
        rep.c_kappa2 = std::max(rep.c_kappa2, mb / b[j]);
    }
    return rep;
}

GrowthSweep weight_growth_sweep(const Weight& k, double sigma) {
    GrowthSweep s;
    for (double e : {2.0, 4.0, 6.0}) {
        const int count = int(40 * 2 * e) + 1;
        s.ranges.push_back(weight_growth_check(k, sigma, std::pow(10.0, -e), std::pow(10.0, e), count));
    }
    const auto& p = s.ranges[s.ranges.size() - 2];
    const auto& q = s.ranges.back();
    s.bounded = q.c_kappa <= 1.05 * p.c_kappa && q.c_kappa2 <= 1.05 * p.c_kappa2;
    return s;
}

RadialTable read_radial_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spectrum file '" + path + "'");
    RadialTable t;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        double r, w;
        if (!(ls >> r >> w)) throw std::runtime_error("spectrum file: bad line '" + line + "'");
        t.r.push_back(r);
        t.omega.push_back(w);
    }
    return t;
}

namespace {

// Tail masses T(r_i) = int_{r > r_i} omega 2 pi r dr by trapezoid sums.
std::vector<double> tail_mass(const RadialTable& t) {
    const std::size_t n = t.r.size();
    std::vector<double> T(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;) {
        const double seg = 0.5 * (t.omega[i] * t.r[i] + t.omega[i + 1] * t.r[i + 1]) * (t.r[i + 1] - t.r[i]);
        T[i] = T[i + 1] + 2.0 * std::numbers::pi * seg;
    }
    return T;
}

}  // namespace

Weight build_weight_from_spectrum(const RadialTable& t) {
    const std::size_t n = t.r.size();
    if (n < 2 || t.omega.size() != n) throw std::invalid_argument("spectrum: need at least two aligned rows");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(t.r[i]) || !std::isfinite(t.omega[i]) || t.omega[i] < 0.0 || t.r[i] < 0.0)
            throw std::invalid_argument("spectrum: radii and omega must be finite and nonnegative");
        if (i && !(t.r[i] > t.r[i - 1])) throw std::invalid_argument("spectrum: radii must increase");
    }
    const std::vector<double> T = tail_mass(t);
    if (!(T[0] > 0.0)) throw std::domain_error("spectrum: empty tail (total mass is zero)");
    // mass still sitting in the outer tenth of the table means no decay was resolved
    const double edge = t.r.front() + 0.9 * (t.r.back() - t.r.front());
    const std::size_t ie = std::size_t(std::lower_bound(t.r.begin(), t.r.end(), edge) - t.r.begin());
    if (ie < n && T[ie] > 0.5 * T[0])
        throw std::domain_error("spectrum: tail does not decay within the table (outer 10% holds " +
                                std::to_string(T[ie] / T[0]) + " of the mass)");

    // dyadic thresholds and capped levels, as points (s, eta) with s = log(4 + R)
    std::vector<double> R, s, eta;
    for (int j = 0; j < 200; ++j) {
        const double target = T[0] * std::pow(4.0, -j);
        std::size_t i = 0;
        while (i < n && T[i] > target) ++i;
        if (i == n) break;
        const double Rj = t.r[i], sj = std::log(4.0 + Rj);
        const double level = std::min(std::pow(2.0, j), sj);
        if (!R.empty() && Rj == R.back()) {
            eta.back() = std::max(eta.back(), level);
        } else {
            R.push_back(Rj);
            s.push_back(sj);
            eta.push_back(level);
        }
        if (T[i] == 0.0 && level >= sj) break;
    }
    // least concave majorant anchored at s = 0, which makes eta/s nonincreasing
    std::vector<std::size_t> hull;
    auto cross = [&](double x0, double y0, double x1, double y1, double x2, double y2) {
        return (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0);
    };
    for (std::size_t i = 0; i < R.size(); ++i) {
        while (!hull.empty()) {
            const std::size_t b = hull.back();
            const double x0 = hull.size() >= 2 ? s[hull[hull.size() - 2]] : 0.0;
            const double y0 = hull.size() >= 2 ? eta[hull[hull.size() - 2]] : 0.0;
            if (cross(x0, y0, s[b], eta[b], s[i], eta[i]) >= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }
    std::vector<double> hr, he;
    for (std::size_t i : hull) {
        if (!he.empty() && eta[i] <= he.back()) continue;  // flat continuation is implicit
        hr.push_back(R[i]);
        he.push_back(eta[i]);
    }
    return Weight::tail_built(std::move(hr), std::move(he));
}

std::pair<double, double> enhanced_integral(const Weight& k, const RadialTable& t) {
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i + 1 < t.r.size(); ++i) {
        const double dr = t.r[i + 1] - t.r[i];
        const double k0 = k(t.r[i]), k1 = k(t.r[i + 1]);
        const double w0 = t.omega[i] * t.r[i], w1 = t.omega[i + 1] * t.r[i + 1];
        a += 0.5 * (k0 * k0 * w0 + k1 * k1 * w1) * dr;
        b += 0.5 * (w0 + w1) * dr;
    }
    return {2.0 * std::numbers::pi * a, 2.0 * std::numbers::pi * b};
}

}  // namespace muskat
