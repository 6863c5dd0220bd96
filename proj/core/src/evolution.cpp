#include "muskat/evolution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "muskat/ops.hpp"
#include "numerics.hpp"

namespace muskat {

namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;
constexpr char kMagic[] = "MUSKATCK1";

RealField read_samples(const std::string& path, const Grid& g) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("initial: cannot open '" + path + "'");
    RealField f(g);
    for (double& v : f.v)
        if (!(in >> v)) throw std::invalid_argument("initial: '" + path + "' holds fewer than n*n samples");
    double extra;
    if (in >> extra) throw std::invalid_argument("initial: '" + path + "' holds more than n*n samples");
    return f;
}

double mass_of_bump() {
    static const double m = [] {
        detail::Integrator in;
        return 2.0 * pi * in.qag([](double r) { return chi(r) * r; }, 0.0, 2.0, 0.0, 1e-13).value;
    }();
    return m;
}

}  // namespace

RealField InitialData::realize(const Grid& g) const {
    switch (kind) {
    case Kind::Zero:
        return RealField(g);
    case Kind::Gaussian:
        return gaussian(g, amplitude, width, center);
    case Kind::MultiBump:
        return muskat::bumps(g, bumps);
    case Kind::ModeSum:
        return mode_sum(g, modes);
    case Kind::FromFile:
        return read_samples(path, g);
    }
    return RealField(g);
}

void SimConfig::validate() const {
    if (grid.n < 8 || grid.n % 2) throw std::invalid_argument("grid.n must be even and at least 8");
    if (!(grid.l > 0.0)) throw std::invalid_argument("grid.l must be positive");
    // |log eps|^-1 is infinite at eps = 1
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("sim.epsilon must lie in (0, 1)");
    if (!(dt_initial > 0.0)) throw std::invalid_argument("sim.dt_initial must be positive");
    if (!(cfl > 0.0)) throw std::invalid_argument("sim.cfl must be positive");
    if (!(t_end > 0.0)) throw std::invalid_argument("sim.t_end must be positive");
    if (record_every < 1) throw std::invalid_argument("sim.record_every must be at least 1");
    if (checkpoint_every < 0) throw std::invalid_argument("sim.checkpoint_every must be >= 0");
    if (!(beta0 > 0.0 && beta0 < 1.0)) throw std::invalid_argument("sim.beta0 must lie in (0, 1)");
    quad.validate(grid);
}

double SimConfig::viscosity() const { return 1.0 / std::abs(std::log(epsilon)); }

double bump_transform(double rho) {
    if (rho == 0.0) return 1.0;
    detail::Integrator in;
    auto f = [rho](double r) { return chi(r) * detail::bessel_j0(rho * r) * r; };
    const int pieces = std::max(1, int(std::ceil(rho / pi)));
    double v = 0.0;
    for (int k = 0; k < pieces; ++k)
        v += in.qag(f, 2.0 * k / pieces, 2.0 * (k + 1) / pieces, 1e-15, 1e-12).value;
    return 2.0 * pi * v / mass_of_bump();
}

RealField mollify_initial(const RealField& f0, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("mollify_initial: eps must lie in (0, 1]");
    const Grid& g = f0.grid;
    SpectralField F = transform(f0);
    std::map<long, double> memo;
    for (int p = 0; p < g.n; ++p)
        for (int q = 0; q < g.n; ++q) {
            const long key = long(g.wave(p)) * g.wave(p) + long(g.wave(q)) * g.wave(q);
            auto it = memo.find(key);
            if (it == memo.end())
                it = memo.emplace(key, bump_transform(eps * 2.0 * pi * std::sqrt(double(key)) / g.l)).first;
            F(p, q) *= it->second;
        }
    return inverse(F);
}

SimState initial_state(const SimConfig& cfg) {
    cfg.validate();
    SimState s;
    s.epsilon = cfg.epsilon;
    s.fhat = transform(mollify_initial(cfg.initial.realize(cfg.grid), cfg.epsilon));
    return s;
}

namespace {

// Real, Nyquist-free coefficients.
SpectralField hermitian(const SpectralField& F) {
    SpectralField r = transform(inverse(F));
    const Grid& g = r.grid;
    for (int p = 0; p < g.n; ++p)
        for (int q = 0; q < g.n; ++q)
            if (g.nyquist(p) || g.nyquist(q)) r(p, q) = 0.0;
    return r;
}

double A_of(const SpectralField& F, const PhiTable& phi) {
    const MultiplierTable w = phi.symbol(F.grid, 0.0, 1);
    return std::pow(sobolev_norm(F, 2.0, &w), 2);
}

void check_finite(const SpectralField& F) {
    double m = 0.0;
    for (const cplx& c : F.c) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw std::runtime_error("blow-up: non-finite coefficient");
        m = std::max(m, std::abs(c));
    }
    if (m > 1e12) throw std::runtime_error("blow-up: coefficient above 1e12");
}

}  // namespace

double choose_dt(const SimState& s, const SimConfig& cfg) {
    // the heat part and <D> are exact; the explicit remainder <D>f - L(f)f has
    // rate at most (1 - <lip>^-3) |xi|_max
    const double lip = lip_norm(s.fhat);
    const double rate = (1.0 - std::pow(1.0 + lip * lip, -1.5)) * cfg.grid.xi_max();
    return rate > 0.0 ? std::min(cfg.dt_initial, cfg.cfl / rate) : cfg.dt_initial;
}

namespace {

SimState advance(const SimState& s, const SimConfig& cfg, const RealField& rhs, double dt_cap, StepInfo* info) {
    const Grid& g = cfg.grid;
    const double nu = cfg.viscosity();
    SpectralField R(g);
    if (!cfg.linear_only) {
        R = transform(rhs);
        R = R + apply_multiplier(s.fhat, abs_xi_power(g, 1.0));
    }
    const bool small = lip_norm(s.fhat) < 0.5;
    auto phi = PhiTable::for_grid(cfg.weight, g);
    const double A0 = small ? A_of(s.fhat, *phi) : 0.0;
    double dt = std::min(choose_dt(s, cfg), dt_cap);
    int halvings = 0;
    SpectralField next(g);
    for (;;) {
        for (int p = 0; p < g.n; ++p)
            for (int q = 0; q < g.n; ++q) {
                const double r = std::hypot(g.xi(p), g.xi(q));
                next(p, q) = std::exp(-(nu * r * r + r) * dt) * (s.fhat(p, q) + dt * R(p, q));
            }
        next = hermitian(next);
        check_finite(next);
        // guard against growth in the small-data regime
        if (!small || halvings >= 8 || A_of(next, *phi) <= 1.1 * A0) break;
        dt *= 0.5;
        ++halvings;
    }
    SimState out;
    out.t = s.t + dt;
    out.fhat = std::move(next);
    out.step = s.step + 1;
    out.epsilon = s.epsilon;
    if (info) {
        info->dt = dt;
        info->halvings = halvings;
    }
    return out;
}

RealField nonlinearity(const SimState& s, const SimConfig& cfg) {
    if (cfg.linear_only) return RealField(cfg.grid);
    return muskat_rhs_cutoff(inverse(s.fhat), cfg.epsilon, cfg.quad).value;
}

}  // namespace

SimState step(const SimState& s, const SimConfig& cfg, StepInfo* info) {
    RealField rhs = nonlinearity(s, cfg);
    SimState out = advance(s, cfg, rhs, std::numeric_limits<double>::infinity(), info);
    out.history = s.history;
    if (info) info->rhs = std::move(rhs);
    return out;
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out.write(bytes.data(), std::streamsize(bytes.size()));
        if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

RunResult run_from(SimState s, const SimConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    auto phi = PhiTable::for_grid(cfg.weight, cfg.grid);
    RunResult res;
    const double t_end = cfg.t_end;
    double prev_sup = -1.0;
    std::string csv = csv_header() + "\n";
    auto flush = [&](const std::string& trailer) {
        res.csv = csv + "# " + trailer + "\n";
        if (res.beyond_log_window) res.csv += "# t passed |log eps|\n";
        if (!out_dir.empty()) write_file_atomic((fs::path(out_dir) / "diagnostics.csv").string(), res.csv);
    };
    try {
        for (;;) {
            const RealField f = inverse(s.fhat);
            const RealField rhs = nonlinearity(s, cfg);
            const bool done = s.t >= t_end * (1.0 - 1e-12);
            if (s.step % cfg.record_every == 0 || done) {
                DiagnosticsRecord r = record(f, *phi, cfg.quad, s.t, cfg.linear_only ? nullptr : &rhs);
                if (prev_sup >= 0.0 && !s.history.empty()) {
                    const double dt = s.t - s.history.back().t;
                    const double slack = dt * std::pow(cfg.epsilon, cfg.beta0) * (r.sup_f + r.lip_f);
                    res.max_sup_excess = std::max(res.max_sup_excess, r.sup_f - prev_sup - slack);
                }
                prev_sup = r.sup_f;
                if (s.history.empty() || r.t > s.history.back().t) {
                    csv += csv_row(r) + "\n";
                    s.history.push_back(r);
                }
            }
            if (s.t > std::abs(std::log(cfg.epsilon))) res.beyond_log_window = true;
            if (done) break;
            s = [&] {
                SimState n = advance(s, cfg, rhs, t_end - s.t, nullptr);
                if (std::abs(n.t - t_end) <= 1e-12 * t_end) n.t = t_end;   // summed steps drift by an ulp
                n.history = std::move(s.history);
                return n;
            }();
            if (cfg.checkpoint_every > 0 && s.step % cfg.checkpoint_every == 0 && !out_dir.empty())
                checkpoint_save(s, cfg.weight, (fs::path(out_dir) / "checkpoint.bin").string());
        }
        res.status = "completed";
    } catch (const std::runtime_error& e) {
        res.aborted = true;
        res.status = std::string("aborted: ") + e.what();
        if (!out_dir.empty()) checkpoint_save(s, cfg.weight, (fs::path(out_dir) / "abort_state.bin").string());
    }
    flush(res.status);
    res.state = std::move(s);
    return res;
}

RunResult run(const SimConfig& cfg, const std::string& out_dir) { return run_from(initial_state(cfg), cfg, out_dir); }

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoints assume a little-endian host");

template <class T>
void put(std::string& b, T v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    b.append(raw, sizeof(T));
}

template <class T>
T get(std::istream& in) {
    T v;
    char raw[sizeof(T)];
    if (!in.read(raw, sizeof(T))) throw std::runtime_error("checkpoint: truncated file");
    std::memcpy(&v, raw, sizeof(T));
    return v;
}

struct Header {
    std::int32_t n;
    double l, t;
    std::int64_t step;
    double eps;
    std::string weight;
};

Header read_header(std::istream& in) {
    char magic[sizeof kMagic - 1];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw std::runtime_error("checkpoint: bad magic or version");
    Header h;
    h.n = get<std::int32_t>(in);
    h.l = get<double>(in);
    h.t = get<double>(in);
    h.step = get<std::int64_t>(in);
    h.eps = get<double>(in);
    const std::uint32_t len = get<std::uint32_t>(in);
    if (h.n < 8 || h.n > (1 << 14) || len > (1u << 20)) throw std::runtime_error("checkpoint: corrupt header");
    h.weight.resize(len);
    if (len && !in.read(h.weight.data(), len)) throw std::runtime_error("checkpoint: truncated file");
    return h;
}

}  // namespace

void checkpoint_save(const SimState& s, const Weight& w, const std::string& path) {
    const Grid& g = s.fhat.grid;
    std::string b(kMagic, sizeof kMagic - 1);
    put<std::int32_t>(b, g.n);
    put<double>(b, g.l);
    put<double>(b, s.t);
    put<std::int64_t>(b, s.step);
    put<double>(b, s.epsilon);
    const std::string ws = w.spec();
    put<std::uint32_t>(b, std::uint32_t(ws.size()));
    b += ws;
    for (const cplx& c : s.fhat.c) {
        put<double>(b, c.real());
        put<double>(b, c.imag());
    }
    write_file_atomic(path, b);
}

SimState checkpoint_load(const std::string& path, const Grid& expect) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
    const Header h = read_header(in);
    if (h.n != expect.n || h.l != expect.l)
        throw std::runtime_error("checkpoint: grid " + std::to_string(h.n) + " does not match the configured grid " +
                                 std::to_string(expect.n));
    SimState s;
    s.t = h.t;
    s.step = h.step;
    s.epsilon = h.eps;
    s.fhat = SpectralField(expect);
    for (cplx& c : s.fhat.c) {
        const double re = get<double>(in);
        const double im = get<double>(in);
        c = cplx(re, im);
    }
    if (in.peek() != std::char_traits<char>::eof()) throw std::runtime_error("checkpoint: trailing bytes");
    return s;
}

std::string checkpoint_weight(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
    return read_header(in).weight;
}

std::vector<std::string> export_plot_data(const std::string& run_dir) {
    const fs::path csv = fs::path(run_dir) / "diagnostics.csv";
    std::ifstream in(csv);
    if (!in) throw std::runtime_error("export: missing " + csv.string());
    std::string line;
    std::getline(in, line);
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    if (int(cols.size()) != csv_columns()) throw std::runtime_error("export: unexpected column count");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> r;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) r.push_back(c);
        if (r.size() != cols.size()) throw std::runtime_error("export: ragged row");
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw std::runtime_error("export: empty history");
    std::vector<std::string> written;
    for (const char* name : {"A_phi", "B_phi", "lip_f", "sup_f", "dissipation"}) {
        const auto k = std::size_t(std::find(cols.begin(), cols.end(), name) - cols.begin());
        std::string body = "# t " + std::string(name) + "\n";
        for (const auto& r : rows) body += r[0] + " " + r[k] + "\n";
        const fs::path p = fs::path(run_dir) / (std::string(name) + ".dat");
        write_file_atomic(p.string(), body);
        written.push_back(p.string());
    }
    return written;
}

}  // namespace muskat
