#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "muskat/evolution.hpp"

using namespace muskat;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("muskat_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

SimConfig small_config() {
    SimConfig c;
    c.grid = Grid(32, 32.0);
    c.epsilon = 0.1;
    c.dt_initial = 0.1;
    c.t_end = 0.4;
    c.initial.kind = InitialData::Kind::Gaussian;
    c.initial.amplitude = 0.05;
    c.initial.width = 2.0;
    c.initial.center = {16.0, 16.0};
    return c;
}

}  // namespace

TEST_CASE("bump transform") {
    CHECK(bump_transform(0.0) == 1.0);
    CHECK(bump_transform(1.7) == doctest::Approx(0.4966437555369614).epsilon(1e-9));
    CHECK(bump_transform(5.0) == doctest::Approx(-0.020089485478726354).epsilon(1e-8));
}

TEST_CASE("mollifier keeps the mean and rejects bad eps") {
    const Grid g(32, 32.0);
    RealField f(g);
    for (double& v : f.v) v = 3.0;
    CHECK(max_abs(mollify_initial(f, 0.5) - f) < 1e-13);
    CHECK_THROWS_AS(mollify_initial(f, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mollify_initial(f, 1.5), std::invalid_argument);
}

TEST_CASE("linear evolution of a single mode is exact") {
    SimConfig c = small_config();
    c.linear_only = true;
    c.t_end = 1.0;
    c.initial.kind = InitialData::Kind::ModeSum;
    c.initial.modes = {{2, 1, 0.01, 0.3}};
    const RunResult r = run(c);
    REQUIRE_FALSE(r.aborted);
    const Grid& g = c.grid;
    const SpectralField F0 = transform(c.initial.realize(g));
    double err = 0.0;
    for (int p = 0; p < g.n; ++p)
        for (int k = 0; k < g.n; ++k) {
            const double xi = std::hypot(g.xi(p), g.xi(k));
            const double decay = std::exp(-(c.viscosity() * xi * xi + xi) * c.t_end);
            const cplx expect = F0(p, k) * bump_transform(c.epsilon * xi) * decay;
            err = std::max(err, std::abs(r.state.fhat(p, k) - expect));
        }
    CHECK(err < 1e-12 * 0.01);
    CHECK(r.state.t == c.t_end);
}

TEST_CASE("zero data stays zero") {
    SimConfig c = small_config();
    c.initial.kind = InitialData::Kind::Zero;
    const RunResult r = run(c);
    for (const auto& h : r.state.history) {
        CHECK(h.A_phi == 0.0);
        CHECK(h.lip_f == 0.0);
    }
}

TEST_CASE("epsilon must lie in (0, 1)") {
    SimConfig c = small_config();
    c.epsilon = 1.0;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("sim.epsilon"), std::invalid_argument);
}

TEST_CASE("small data decays") {
    const RunResult r = run(small_config());
    REQUIRE_FALSE(r.aborted);
    const auto& h = r.state.history;
    REQUIRE(h.size() == 5);
    for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i].A_phi <= h[i - 1].A_phi);
}

TEST_CASE("checkpoints round trip byte for byte") {
    const fs::path dir = scratch("ck");
    const SimConfig c = small_config();
    SimState s = step(initial_state(c), c);
    checkpoint_save(s, c.weight, (dir / "a.bin").string());
    const SimState back = checkpoint_load((dir / "a.bin").string(), c.grid);
    checkpoint_save(back, c.weight, (dir / "b.bin").string());
    CHECK(slurp(dir / "a.bin") == slurp(dir / "b.bin"));
    CHECK(back.t == s.t);
    CHECK(back.step == s.step);
    CHECK(checkpoint_weight((dir / "a.bin").string()) == c.weight.spec());
}

TEST_CASE("checkpoint on the wrong grid is refused") {
    const fs::path dir = scratch("ck_grid");
    const SimConfig c = small_config();
    checkpoint_save(initial_state(c), c.weight, (dir / "a.bin").string());
    CHECK_THROWS_WITH_AS(checkpoint_load((dir / "a.bin").string(), Grid(64, 32.0)), doctest::Contains("grid"),
                         std::runtime_error);
    std::ofstream((dir / "a.bin"), std::ios::app | std::ios::binary) << 'x';
    CHECK_THROWS_AS(checkpoint_load((dir / "a.bin").string(), c.grid), std::runtime_error);
}

TEST_CASE("resuming from a checkpoint is bit exact") {
    const fs::path dir = scratch("resume");
    SimConfig c = small_config();
    const RunResult full = run(c);
    c.t_end = 0.2;
    c.checkpoint_every = 2;
    run(c, dir.string());
    const SimState mid = checkpoint_load((dir / "checkpoint.bin").string(), c.grid);
    CHECK(mid.t == doctest::Approx(0.2));
    c.t_end = 0.4;
    const RunResult rest = run_from(mid, c);
    CHECK(rest.state.t == full.state.t);
    CHECK(rest.state.fhat.c == full.state.fhat.c);
}

TEST_CASE("plot export") {
    const fs::path dir = scratch("export");
    const RunResult r = run(small_config(), dir.string());
    const auto files = export_plot_data(dir.string());
    CHECK(files.size() == 5);
    std::ifstream in(dir / "A_phi.dat");
    double t, v;
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') {
            std::istringstream(line) >> t >> v;
            ++rows;
        }
    CHECK(rows == int(r.state.history.size()));
    CHECK(v == doctest::Approx(r.state.history.back().A_phi));

    const fs::path empty = scratch("export_empty");
    std::ofstream(empty / "diagnostics.csv") << csv_header() << "\n";
    CHECK_THROWS_WITH(export_plot_data(empty.string()), doctest::Contains("empty history"));
    CHECK_THROWS(export_plot_data((empty / "missing").string()));
}

TEST_CASE("atomic writes leave no temporary file") {
    const fs::path dir = scratch("atomic");
    write_file_atomic((dir / "x.txt").string(), "hello");
    CHECK(slurp(dir / "x.txt") == "hello");
    CHECK_FALSE(fs::exists(dir / "x.txt.tmp"));
}
