#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "muskat/config.hpp"
#include "muskat/diagnostics.hpp"
#include "muskat/evolution.hpp"
#include "muskat/ops.hpp"
#include "muskat/verification.hpp"
#include "muskat/weights.hpp"

namespace fs = std::filesystem;
using namespace muskat;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kConfigError = 2 };

struct Global {
    std::string out;
    int threads = 0;
    std::uint64_t seed = SuiteOptions{}.seed;
    std::string resolution = "ref";
};

void set_threads(const Global& g) {
    int t = g.threads;
    if (t <= 0)
        if (const char* env = std::getenv("MUSKATLAB_THREADS")) t = std::atoi(env);
    if (t > 0) omp_set_num_threads(t);
}

RunConfig load(const std::string& path, const Global& g) {
    RunConfig c = load_config(path);
    if (!g.out.empty()) c.out_dir = g.out;
    if (g.resolution == "fine") c.sim.quad = c.sim.quad.refined();
    return c;
}

std::string field_text(const RealField& f) {
    std::ostringstream os;
    os.precision(17);
    for (int i = 0; i < f.grid.n; ++i) {
        for (int j = 0; j < f.grid.n; ++j) os << (j ? " " : "") << f(i, j);
        os << "\n";
    }
    return os.str();
}

std::string out_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

int simulate(const std::string& path, const std::string& resume, const Global& g) {
    const RunConfig c = load(path, g);
    write_file_atomic(out_path(c.out_dir, "config.frozen"), serialize(c));
    RunResult r;
    if (resume.empty()) {
        r = run(c.sim, c.out_dir);
    } else {
        if (checkpoint_weight(resume) != c.sim.weight.spec())
            throw ConfigError("weight.kind", "checkpoint was written with weight '" + checkpoint_weight(resume) + "'");
        r = run_from(checkpoint_load(resume, c.sim.grid), c.sim, c.out_dir);
    }
    if (c.plot) export_plot_data(c.out_dir);
    const auto& last = r.state.history.back();
    std::printf("%s at t = %.6g after %ld steps; A_phi %.6e, lip %.6e\n", r.status.c_str(), r.state.t, r.state.step,
                last.A_phi, last.lip_f);
    if (r.beyond_log_window) std::printf("note: t passed |log eps|\n");
    std::printf("wrote %s\n", out_path(c.out_dir, "diagnostics.csv").c_str());
    return r.aborted ? kCheckFailed : kOk;
}

int verify(const std::string& name, const std::string& config, const Global& g) {
    SuiteOptions o;
    std::string dir = g.out.empty() ? "out" : g.out;
    if (!config.empty()) {
        const RunConfig c = load_config(config);
        o.grid = c.sim.grid;
        o.quad = c.sim.quad;
        if (g.out.empty()) dir = c.out_dir;
    }
    if (g.resolution == "fine") o.quad = o.quad.refined();
    o.seed = g.seed;
    std::vector<Suite> suites;
    if (name == "all")
        suites = all_suites();
    else
        suites.push_back(parse_suite(name));
    bool pass = true;
    for (Suite s : suites) {
        const SuiteReport r = run_suite(s, o);
        std::cout << r.to_table();
        const std::string file = out_path(dir, "verify_" + r.suite + ".json");
        write_file_atomic(file, r.to_json());
        std::cout << "wrote " << file << "\n";
        pass = pass && r.pass();
    }
    return pass ? kOk : kCheckFailed;
}

int decompose(const std::string& path, const Global& g) {
    const RunConfig c = load(path, g);
    const RealField f = c.sim.initial.realize(c.sim.grid);
    const MuskatDecomposition d = decomposition(f, f, c.sim.quad);
    const std::string dir = c.out_dir;
    write_file_atomic(out_path(dir, "f.dat"), field_text(f));
    write_file_atomic(out_path(dir, "total.dat"), field_text(d.total));
    write_file_atomic(out_path(dir, "p_part.dat"), field_text(d.p_part));
    write_file_atomic(out_path(dir, "drift_x.dat"), field_text(d.drift[0]));
    write_file_atomic(out_path(dir, "drift_y.dat"), field_text(d.drift[1]));
    write_file_atomic(out_path(dir, "drift_term.dat"), field_text(d.drift_term));
    write_file_atomic(out_path(dir, "remainder.dat"), field_text(d.remainder));
    nlohmann::ordered_json j;
    j["residual"] = d.residual;
    j["total_l2"] = l2_norm(d.total);
    j["p_part_l2"] = l2_norm(d.p_part);
    j["drift_term_l2"] = l2_norm(d.drift_term);
    j["remainder_l2"] = l2_norm(d.remainder);
    j["low_resolution"] = d.flags.low_resolution;
    j["tail_estimate"] = d.flags.tail_estimate;
    j["flagged"] = d.flags.flagged;
    write_file_atomic(out_path(dir, "decomposition.json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\nwrote " << dir << "\n";
    return d.flags.flagged || !(d.residual < threshold("decomposition_residual")) ? kCheckFailed : kOk;
}

int weights_build(const std::string& path, const Global& g) {
    const RadialTable t = read_radial_table(path);
    const Weight w = build_weight_from_spectrum(t);
    const ValidationReport v = validate_admissible(w, default_radii());
    const auto [weighted, mass] = enhanced_integral(w, t);
    const std::string dir = g.out.empty() ? "out" : g.out;
    write_file_atomic(out_path(dir, "weight.txt"), w.spec() + "\n");
    nlohmann::ordered_json j;
    j["weight"] = w.spec();
    j["monotone"] = v.monotone;
    j["doubling"] = v.doubling;
    j["log_bounded"] = v.log_bounded;
    j["c0"] = v.c0;
    j["weighted_mass"] = weighted;
    j["mass"] = mass;
    write_file_atomic(out_path(dir, "weight.json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\nwrote " << out_path(dir, "weight.txt") << "\n";
    return v.pass() ? kOk : kCheckFailed;
}

int kernels_sweep(const std::string& spec, const std::string& weight, double lo, double hi, int count,
                  const Global& g) {
    const KernelSpec k = KernelSpec::parse(spec, Weight::parse(weight));
    if (!(lo > 0.0 && hi > lo) || count < 2) throw ConfigError("sweep", "need 0 < min < max and count >= 2");
    std::vector<Vec2> xi;
    for (int i = 0; i < count; ++i) xi.push_back({lo * std::pow(hi / lo, double(i) / (count - 1)), 0.0});
    const auto m = difference_kernel_multiplier(k, xi);
    std::ostringstream os;
    os << "# " << k.spec() << " weight " << k.weight.spec() << "\n# |xi| m m/|xi|^2b abserr\n";
    os.precision(12);
    for (int i = 0; i < count; ++i)
        os << xi[i][0] << " " << m[i].m << " " << m[i].m / std::pow(xi[i][0], 2.0 * k.b) << " " << m[i].abserr << "\n";
    const std::string dir = g.out.empty() ? "out" : g.out;
    write_file_atomic(out_path(dir, "kernel_sweep.dat"), os.str());
    std::cout << os.str();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"muskatlab: pseudo-spectral laboratory for the 3D Muskat interface"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--out", g.out, "output directory (overrides output.dir)");
    app.add_option("--threads", g.threads, "worker threads (default: MUSKATLAB_THREADS or all)");
    app.add_option("--seed", g.seed, "seed for random field families");
    app.add_option("--resolution", g.resolution, "quadrature resolution")->check(CLI::IsMember({"ref", "fine"}));

    std::string config, resume, suite, spectrum, kspec, weight = "kind=unit";
    double lo = 0.1, hi = 100.0;
    int count = 13;

    auto* sim = app.add_subcommand("simulate", "run the regularized evolution");
    sim->add_option("config", config, "config file")->required();
    sim->add_option("--resume", resume, "continue from a checkpoint");

    auto* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("suite", suite, "identities, kernels, weights, symmetry, energy, decay or all")->required();
    ver->add_option("--config", config, "take grid and quadrature from a config file");

    auto* dec = app.add_subcommand("decompose", "dump the quasilinear decomposition of the initial data");
    dec->add_option("config", config, "config file")->required();

    auto* wts = app.add_subcommand("weights", "weight tools");
    wts->require_subcommand(1);
    wts->fallthrough();
    auto* build = wts->add_subcommand("build", "build a weight from a radial spectrum");
    build->add_option("spectrum", spectrum, "two-column file: r omega(r)")->required();

    auto* ker = app.add_subcommand("kernels", "difference-kernel tools");
    ker->require_subcommand(1);
    ker->fallthrough();
    auto* sweep = ker->add_subcommand("sweep", "tabulate a kernel multiplier over |xi|");
    sweep->add_option("spec", kspec, "e.g. order=first,b=0.5,gamma=2")->required();
    sweep->add_option("--weight", weight, "weight spec, e.g. kind=log_pow;a=0.375");
    sweep->add_option("--min", lo, "smallest |xi|");
    sweep->add_option("--max", hi, "largest |xi|");
    sweep->add_option("--count", count, "number of samples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        set_threads(g);
        if (*sim) return simulate(config, resume, g);
        if (*ver) return verify(suite, config, g);
        if (*dec) return decompose(config, g);
        if (*build) return weights_build(spectrum, g);
        if (*sweep) return kernels_sweep(kspec, weight, lo, hi, count, g);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheckFailed;
    }
    return kOk;
}
