#include <doctest.h>

#include <set>

#include <json.hpp>

#include "muskat/verification.hpp"

using namespace muskat;

TEST_CASE("threshold table") {
    std::set<std::string> names;
    for (const auto& t : thresholds()) {
        CHECK(names.insert(t.name).second);
        CHECK(threshold(t.name) == t.value);
    }
    CHECK(std::string(kThresholdsVersion) == "1");
    CHECK_THROWS(threshold("nope"));
}

TEST_CASE("suite names") {
    for (Suite s : all_suites()) CHECK(parse_suite(suite_name(s)) == s);
    CHECK_THROWS_AS(parse_suite("nope"), std::invalid_argument);
}

TEST_CASE("weights suite passes and reports in order") {
    const SuiteReport r = run_suite(Suite::Weights);
    CHECK(r.pass());
    for (std::size_t i = 1; i < r.checks.size(); ++i) CHECK(r.checks[i - 1].name <= r.checks[i].name);
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["suite"] == "weights");
    CHECK(j["pass"] == true);
    CHECK(j["checks"].size() == r.checks.size());
    CHECK(r.to_table().find("PASS") != std::string::npos);
}

TEST_CASE("symmetry suite") {
    const SuiteReport r = run_suite(Suite::Symmetry);
    CHECK(r.pass());
    for (const auto& c : r.checks) CHECK_MESSAGE(c.pass, c.name);
}

TEST_CASE("a failing check fails the report") {
    SuiteReport r{"x", "1", {{"a", 0.0, 1.0, "<", true}, {"b", 2.0, 1.0, "<", false}}};
    CHECK_FALSE(r.pass());
}
