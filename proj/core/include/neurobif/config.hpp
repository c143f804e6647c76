#pragma once

// Run configuration: a JSON document and/or command-line flags resolved
// against a named preset. Flags win over file values.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "neurobif/model.hpp"
#include "neurobif/scenarios.hpp"

namespace neurobif {

struct RangeSpec {
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;   // 0: analysis default
};

// "lo:hi" or "lo:hi:n".
RangeSpec parse_range(const std::string& text, const std::string& key_path = "range");

// Unresolved inputs, as read from a file or from flags. Every field is
// optional so that a flag only overrides what it names.
struct ConfigInput {
    std::optional<std::string> command;
    std::optional<std::string> model;
    std::optional<std::string> preset;
    std::vector<std::pair<std::string, double>> set;   // applied in order
    std::optional<std::string> param;
    std::optional<RangeSpec> range;
    std::optional<std::pair<std::string, std::string>> pair;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::map<std::string, double> tolerances;
    std::optional<double> noise_mean;
    std::optional<double> noise_std;
    std::optional<double> noise_slope;
    std::optional<double> T;
    std::optional<std::vector<double>> x0;
    std::optional<std::string> input;
};

// Parse a JSON config. Unknown keys and type mismatches raise ConfigError
// with the key path ("params.jj", "range.n", ...).
ConfigInput config_from_json(const std::string& text);
// `over` on top of `base`; parameter overrides are concatenated.
ConfigInput merge(ConfigInput base, const ConfigInput& over);

// "k=v" and "mean=..,std=..,slope=.." flag syntax.
std::pair<std::string, double> parse_assignment(const std::string& text, const std::string& key_path);
void apply_noise_flag(ConfigInput& in, const std::string& text);

// Tolerance names and their defaults.
std::map<std::string, double> default_tolerances();

struct RunConfig {
    std::string command;
    std::string preset;
    ModelParams params;
    std::vector<std::pair<std::string, double>> overrides;
    std::string param = "j";
    std::optional<RangeSpec> range;
    std::pair<std::string, std::string> pair{"j", "P"};
    std::string out = ".";
    std::uint64_t seed = 0;
    std::map<std::string, double> tolerances;   // complete set actually used
    NoiseSpec noise;
    double T = 100.0;
    std::optional<std::vector<double>> x0;
    std::string input;

    ModelKind model() const { return kind_of(params); }
};

std::vector<std::string> command_names();

// Fill defaults from the preset, validate everything.
RunConfig resolve(const ConfigInput& in);

}  // namespace neurobif
