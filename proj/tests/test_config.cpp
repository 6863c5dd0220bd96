#include <doctest.h>

#include "muskat/config.hpp"

using namespace muskat;

TEST_CASE("defaults parse and every key is documented") {
    const RunConfig c = parse_config("");
    CHECK(c.sim.grid.n == 128);
    CHECK(c.sim.grid.l == 32.0);
    CHECK(c.out_dir == "out");
    for (const ConfigKey& k : config_keys()) CHECK(std::string(k.doc).size() > 0);
}

TEST_CASE("frozen config round trips") {
    const std::string text =
        "grid.n = 64\n"
        "# comment\n"
        "weight.kind = log_pow\nweight.a = 0.375\n"
        "sim.epsilon = 0.03\nsim.t_end = 2.5\n"
        "initial.kind = multi_bump\ninitial.bumps = 14,16,1.5,0.2; 18,15,2,-0.15\n"
        "output.dir = somewhere\n";
    const RunConfig a = parse_config(text);
    const std::string once = serialize(a);
    const RunConfig b = parse_config(once);
    CHECK(serialize(b) == once);
    CHECK(b.sim.epsilon == a.sim.epsilon);
    CHECK(b.sim.weight.spec() == a.sim.weight.spec());
    CHECK(b.sim.initial.bumps.size() == 2);
    CHECK(b.out_dir == "somewhere");
}

TEST_CASE("tail-built weights survive the round trip") {
    const RunConfig a = parse_config("weight.kind = tail_built\nweight.breakpoints = 1,10,100\nweight.levels = 1.5,2,2.5\n");
    CHECK(parse_config(serialize(a)).sim.weight.spec() == a.sim.weight.spec());
}

TEST_CASE("errors name the key") {
    auto key_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return e.key();
        }
        return std::string("none");
    };
    CHECK(key_of("sim.bogus = 1\n") == "sim.bogus");
    CHECK(key_of("sim.epsilon = abc\n") == "sim.epsilon");
    CHECK(key_of("sim.epsilon = 1\n") == "sim.epsilon");
    CHECK(key_of("grid.n = 63\n") == "grid.n");
    CHECK(key_of("quad.n_r = 2\n") == "quad.n_r");
    CHECK(key_of("initial.kind = spiral\n") == "initial.kind");
    CHECK(key_of("initial.bumps = 1,2,3\n") == "initial.bumps");
    CHECK(key_of("just words\n") == "");
    CHECK_THROWS_AS(load_config("/nonexistent/run.conf"), ConfigError);
}
