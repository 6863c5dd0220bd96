#include "muskat/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace muskat {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + v + "'");
    }
    if (used != v.size() || !std::isfinite(x)) throw ConfigError(key, "expected a number, got '" + v + "'");
    return x;
}

long to_long(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long x;
    try {
        x = std::stol(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(key, "expected an integer, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError(key, "expected an integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
    return s;
}

// "a,b,c,d;a,b,c,d"
std::vector<std::vector<double>> to_groups(const std::string& key, const std::string& v, std::size_t width) {
    std::vector<std::vector<double>> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (trim(item).empty()) continue;
        auto g = to_list(key, item);
        if (g.size() != width)
            throw ConfigError(key, "each ';'-separated group needs " + std::to_string(width) + " numbers");
        out.push_back(std::move(g));
    }
    return out;
}

// validators phrase their errors as "<key> must ..."
[[noreturn]] void rethrow_keyed(const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto sp = msg.find(' ');
    if (sp == std::string::npos) throw ConfigError("", msg);
    throw ConfigError(msg.substr(0, sp), msg.substr(sp + 1));
}

const char* initial_name(InitialData::Kind k) {
    switch (k) {
    case InitialData::Kind::Zero:
        return "zero";
    case InitialData::Kind::Gaussian:
        return "gaussian";
    case InitialData::Kind::MultiBump:
        return "multi_bump";
    case InitialData::Kind::ModeSum:
        return "mode_sum";
    case InitialData::Kind::FromFile:
        return "from_file";
    }
    return "zero";
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"grid.n", "128", "points per side, even, at least 8"},
        {"grid.l", "32", "side length of the periodic box"},
        {"quad.n_r", "64", "radial nodes"},
        {"quad.n_theta", "32", "angular nodes, even"},
        {"quad.r_min_cells", "0.5", "smallest radius in grid cells"},
        {"quad.r_max_frac", "0.5", "largest radius as a fraction of l, at most 1/2"},
        {"quad.r_split", "4", "radius past which linear parts are integrated exactly"},
        {"quad.far_field", "true", "add the far-field expansion beyond the largest radius"},
        {"quad.padding", "true", "3/2 zero padding for pointwise products"},
        {"weight.kind", "unit", "unit, log_pow, tail_built or from_spectrum"},
        {"weight.a", "0", "exponent of log_pow"},
        {"weight.breakpoints", "", "tail_built radii, comma separated"},
        {"weight.levels", "", "tail_built levels, comma separated"},
        {"weight.spectrum", "", "two-column radial table for from_spectrum"},
        {"sim.epsilon", "0.1", "regularization parameter in (0, 1)"},
        {"sim.dt_initial", "0.1", "largest time step"},
        {"sim.cfl", "0.4", "CFL number of the explicit part"},
        {"sim.t_end", "1", "final time"},
        {"sim.record_every", "1", "steps between diagnostics records"},
        {"sim.checkpoint_every", "0", "steps between checkpoints, 0 disables"},
        {"sim.linear_only", "false", "drop the nonlinear residual"},
        {"sim.beta0", "0.01", "Hoelder exponent of the sup-norm slack monitor"},
        {"initial.kind", "zero", "zero, gaussian, multi_bump, mode_sum or from_file"},
        {"initial.amplitude", "0", "gaussian amplitude"},
        {"initial.width", "1", "gaussian standard deviation"},
        {"initial.center", "16,16", "gaussian center"},
        {"initial.bumps", "", "x,y,sigma,amplitude groups separated by ';'"},
        {"initial.modes", "", "k1,k2,amplitude,phase groups separated by ';'"},
        {"initial.path", "", "n*n samples, row-major, whitespace separated"},
        {"output.dir", "out", "output directory"},
        {"output.plot", "true", "write two-column plot files after a run"},
    };
    return keys;
}

RunConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    for (const ConfigKey& k : config_keys()) kv[k.key] = k.fallback;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("", "line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (!kv.count(key)) throw ConfigError(key, "unknown key");
        kv[key] = val;
    }

    RunConfig c;
    SimConfig& s = c.sim;
    const long n = to_long("grid.n", kv["grid.n"]);
    if (n < 8 || n % 2 || n > (1 << 14)) throw ConfigError("grid.n", "must be even and in [8, 16384]");
    const double l = to_double("grid.l", kv["grid.l"]);
    if (!(l > 0.0)) throw ConfigError("grid.l", "must be positive");
    s.grid = Grid(int(n), l);

    QuadratureSpec& q = s.quad;
    q.n_r = int(to_long("quad.n_r", kv["quad.n_r"]));
    q.n_theta = int(to_long("quad.n_theta", kv["quad.n_theta"]));
    q.r_min_cells = to_double("quad.r_min_cells", kv["quad.r_min_cells"]);
    q.r_max_frac = to_double("quad.r_max_frac", kv["quad.r_max_frac"]);
    q.r_split = to_double("quad.r_split", kv["quad.r_split"]);
    q.far_field = to_bool("quad.far_field", kv["quad.far_field"]);
    q.padding = to_bool("quad.padding", kv["quad.padding"]);
    try {
        q.validate(s.grid);
    } catch (const std::invalid_argument& e) {
        rethrow_keyed(e);
    }

    const std::string wk = kv["weight.kind"];
    try {
        if (wk == "unit") {
            s.weight = Weight::unit();
        } else if (wk == "log_pow") {
            s.weight = Weight::log_pow(to_double("weight.a", kv["weight.a"]));
        } else if (wk == "tail_built") {
            s.weight = Weight::tail_built(to_list("weight.breakpoints", kv["weight.breakpoints"]),
                                          to_list("weight.levels", kv["weight.levels"]));
        } else if (wk == "from_spectrum") {
            if (kv["weight.spectrum"].empty()) throw ConfigError("weight.spectrum", "required for from_spectrum");
            s.weight = build_weight_from_spectrum(read_radial_table(kv["weight.spectrum"]));
        } else {
            throw ConfigError("weight.kind", "unknown kind '" + wk + "'");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("weight." + std::string(wk == "log_pow" ? "a" : "kind"), e.what());
    }

    s.epsilon = to_double("sim.epsilon", kv["sim.epsilon"]);
    s.dt_initial = to_double("sim.dt_initial", kv["sim.dt_initial"]);
    s.cfl = to_double("sim.cfl", kv["sim.cfl"]);
    s.t_end = to_double("sim.t_end", kv["sim.t_end"]);
    s.record_every = int(to_long("sim.record_every", kv["sim.record_every"]));
    s.checkpoint_every = int(to_long("sim.checkpoint_every", kv["sim.checkpoint_every"]));
    s.linear_only = to_bool("sim.linear_only", kv["sim.linear_only"]);
    s.beta0 = to_double("sim.beta0", kv["sim.beta0"]);

    InitialData& in = s.initial;
    const std::string ik = kv["initial.kind"];
    if (ik == "zero")
        in.kind = InitialData::Kind::Zero;
    else if (ik == "gaussian")
        in.kind = InitialData::Kind::Gaussian;
    else if (ik == "multi_bump")
        in.kind = InitialData::Kind::MultiBump;
    else if (ik == "mode_sum")
        in.kind = InitialData::Kind::ModeSum;
    else if (ik == "from_file")
        in.kind = InitialData::Kind::FromFile;
    else
        throw ConfigError("initial.kind", "unknown kind '" + ik + "'");
    in.amplitude = to_double("initial.amplitude", kv["initial.amplitude"]);
    in.width = to_double("initial.width", kv["initial.width"]);
    if (!(in.width > 0.0)) throw ConfigError("initial.width", "must be positive");
    const auto ctr = to_list("initial.center", kv["initial.center"]);
    if (ctr.size() != 2) throw ConfigError("initial.center", "expected two numbers");
    in.center = {ctr[0], ctr[1]};
    for (const auto& g : to_groups("initial.bumps", kv["initial.bumps"], 4)) {
        if (!(g[2] > 0.0)) throw ConfigError("initial.bumps", "sigma must be positive");
        in.bumps.push_back({{g[0], g[1]}, g[2], g[3]});
    }
    for (const auto& g : to_groups("initial.modes", kv["initial.modes"], 4)) {
        if (g[0] != std::floor(g[0]) || g[1] != std::floor(g[1]))
            throw ConfigError("initial.modes", "wave numbers must be integers");
        in.modes.push_back({int(g[0]), int(g[1]), g[2], g[3]});
    }
    in.path = kv["initial.path"];
    if (in.kind == InitialData::Kind::FromFile && in.path.empty())
        throw ConfigError("initial.path", "required for from_file");

    c.out_dir = kv["output.dir"];
    if (c.out_dir.empty()) throw ConfigError("output.dir", "must not be empty");
    c.plot = to_bool("output.plot", kv["output.plot"]);

    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        rethrow_keyed(e);
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize(const RunConfig& c) {
    const SimConfig& s = c.sim;
    const QuadratureSpec& q = s.quad;
    std::map<std::string, std::string> kv;
    kv["grid.n"] = std::to_string(s.grid.n);
    kv["grid.l"] = num(s.grid.l);
    kv["quad.n_r"] = std::to_string(q.n_r);
    kv["quad.n_theta"] = std::to_string(q.n_theta);
    kv["quad.r_min_cells"] = num(q.r_min_cells);
    kv["quad.r_max_frac"] = num(q.r_max_frac);
    kv["quad.r_split"] = num(q.r_split);
    kv["quad.far_field"] = q.far_field ? "true" : "false";
    kv["quad.padding"] = q.padding ? "true" : "false";
    switch (s.weight.kind()) {
    case WeightKind::Unit:
        kv["weight.kind"] = "unit";
        kv["weight.a"] = "0";
        break;
    case WeightKind::LogPow:
        kv["weight.kind"] = "log_pow";
        kv["weight.a"] = num(s.weight.exponent());
        break;
    case WeightKind::TailBuilt:
        kv["weight.kind"] = "tail_built";
        kv["weight.a"] = "0";
        kv["weight.breakpoints"] = join(s.weight.breakpoints());
        kv["weight.levels"] = join(s.weight.levels());
        break;
    }
    kv["sim.epsilon"] = num(s.epsilon);
    kv["sim.dt_initial"] = num(s.dt_initial);
    kv["sim.cfl"] = num(s.cfl);
    kv["sim.t_end"] = num(s.t_end);
    kv["sim.record_every"] = std::to_string(s.record_every);
    kv["sim.checkpoint_every"] = std::to_string(s.checkpoint_every);
    kv["sim.linear_only"] = s.linear_only ? "true" : "false";
    kv["sim.beta0"] = num(s.beta0);
    const InitialData& in = s.initial;
    kv["initial.kind"] = initial_name(in.kind);
    kv["initial.amplitude"] = num(in.amplitude);
    kv["initial.width"] = num(in.width);
    kv["initial.center"] = num(in.center[0]) + "," + num(in.center[1]);
    std::string b, m;
    for (const Bump& x : in.bumps)
        b += (b.empty() ? "" : ";") + join({x.center[0], x.center[1], x.sigma, x.amplitude});
    for (const Mode& x : in.modes)
        m += (m.empty() ? "" : ";") + std::to_string(x.k1) + "," + std::to_string(x.k2) + "," + num(x.amplitude) + "," +
             num(x.phase);
    kv["initial.bumps"] = b;
    kv["initial.modes"] = m;
    kv["initial.path"] = in.path;
    kv["output.dir"] = c.out_dir;
    kv["output.plot"] = c.plot ? "true" : "false";

    std::string out;
    for (const ConfigKey& k : config_keys()) out += std::string(k.key) + " = " + kv[k.key] + "\n";
    return out;
}

}  // namespace muskat
