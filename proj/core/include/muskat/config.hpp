#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "muskat/evolution.hpp"

namespace muskat {

// Flat key=value run configuration.  Sections: grid.*, quad.*, weight.*,
// sim.*, initial.*, output.*.  Blank lines and lines starting with '#' are
// ignored; unknown keys are errors.
struct RunConfig {
    SimConfig sim;
    std::string out_dir = "out";
    bool plot = true;
};

class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& what)
        : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct ConfigKey {
    const char* key;
    const char* fallback;
    const char* doc;
};
// Every accepted key with its default and a one-line description.
const std::vector<ConfigKey>& config_keys();

// Parses, validates and freezes.  A weight given as weight.kind=from_spectrum
// is built on the spot and stored as tail_built.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// All keys in config_keys() order; parse_config(serialize(c)) reproduces c.
std::string serialize(const RunConfig& c);

}  // namespace muskat
