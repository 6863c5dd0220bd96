#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(MUSKATLAB_EXE) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("muskatlab_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("simulate zero data writes an all-zero history") {
    const fs::path dir = scratch("zero");
    std::ofstream(dir / "run.conf") << "grid.n = 32\nsim.t_end = 0.3\n";
    CHECK(run("simulate " + (dir / "run.conf").string() + " --out " + (dir / "out").string()) == 0);
    CHECK(fs::exists(dir / "out" / "diagnostics.csv"));
    CHECK(fs::exists(dir / "out" / "A_phi.dat"));
    CHECK(fs::exists(dir / "out" / "config.frozen"));
    std::ifstream in(dir / "out" / "A_phi.dat");
    double t, v;
    while (in >> t >> v) CHECK(v == 0.0);
}

TEST_CASE("malformed config exits with 2") {
    const fs::path dir = scratch("bad");
    std::ofstream(dir / "run.conf") << "sim.bogus = 1\n";
    CHECK(run("simulate " + (dir / "run.conf").string()) == 2);
    const std::string cmd = std::string(MUSKATLAB_EXE) + " simulate " + (dir / "run.conf").string() + " 2>&1 | grep -q sim.bogus";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(run("verify nosuch") == 2);
    CHECK(run("frobnicate") == 2);
}

TEST_CASE("verify writes a report") {
    const fs::path dir = scratch("verify");
    CHECK(run("verify weights --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "verify_weights.json"));
}

TEST_CASE("weights build and kernels sweep") {
    const fs::path dir = scratch("tools");
    CHECK(run("weights build " + std::string(MUSKAT_SOURCE_DIR) + "/configs/gaussian_spectrum.txt --out " +
              dir.string()) == 0);
    CHECK(fs::exists(dir / "weight.txt"));
    CHECK(run("kernels sweep order=second,b=1.5 --count 3 --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "kernel_sweep.dat"));
    CHECK(run("kernels sweep order=first,b=3") == 2);
}

TEST_CASE("decompose dumps the split") {
    const fs::path dir = scratch("dec");
    std::ofstream(dir / "run.conf") << "grid.n = 32\ninitial.kind = gaussian\ninitial.amplitude = 0.1\ninitial.width = 2\n";
    CHECK(run("decompose " + (dir / "run.conf").string() + " --out " + dir.string() + " --threads 1") == 0);
    CHECK(fs::exists(dir / "decomposition.json"));
    CHECK(fs::exists(dir / "remainder.dat"));
}
