#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "muskat/quadrature.hpp"

namespace muskat {

enum class Suite { Identities, Kernels, Weights, Symmetry, Energy, Decay };

std::string suite_name(Suite s);
// throws std::invalid_argument for an unknown name
Suite parse_suite(const std::string& name);
std::vector<Suite> all_suites();

// Every suite threshold lives here; checks look them up by name.
struct Threshold {
    const char* name;
    double value;
    const char* meaning;
};
extern const char* const kThresholdsVersion;
const std::vector<Threshold>& thresholds();
double threshold(const std::string& name);

struct Check {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    std::string relation;   // "<", "<=", ">=", "=="
    bool pass = false;
    std::string resolution;
    std::optional<double> slope;
    std::vector<std::pair<std::string, double>> values;
    std::string note;
};

struct SuiteReport {
    std::string suite;
    std::string version;
    std::vector<Check> checks;   // ordered by name
    bool pass() const;
    std::string to_json() const;
    std::string to_table() const;
};

struct SuiteOptions {
    Grid grid{128, 32.0};
    QuadratureSpec quad = reference_quadrature();
    std::uint64_t seed = 20240601;
    int family_size = 10;
};

SuiteReport run_suite(Suite s, const SuiteOptions& opt = {});

}  // namespace muskat
