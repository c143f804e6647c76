#include "neurobif/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "json.hpp"
#include "neurobif/errors.hpp"

namespace neurobif {

namespace {

using nlohmann::json;

double parse_number(const std::string& text, const std::string& key_path)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || text.empty())
        throw ConfigError(key_path, "expected a number, got '" + text + "'");
    if (!std::isfinite(v))
        throw ConfigError(key_path, "value must be finite");
    return v;
}

std::string trim(std::string s)
{
    const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string::npos)
            break;
        start = pos + 1;
    }
    return out;
}

double get_number(const json& v, const std::string& key_path)
{
    if (!v.is_number())
        throw ConfigError(key_path, "expected a number, got " + std::string(v.type_name()));
    const double d = v.get<double>();
    if (!std::isfinite(d))
        throw ConfigError(key_path, "value must be finite");
    return d;
}

std::string get_string(const json& v, const std::string& key_path)
{
    if (!v.is_string())
        throw ConfigError(key_path, "expected a string, got " + std::string(v.type_name()));
    return v.get<std::string>();
}

std::pair<std::string, std::string> parse_pair(const std::string& text, const std::string& key_path)
{
    const auto parts = split(text, ',');
    if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
        throw ConfigError(key_path, "expected 'a,b', got '" + text + "'");
    return {parts[0], parts[1]};
}

void check_param(ModelKind kind, const std::string& name, const std::string& key_path)
{
    if (!has_param(kind, name))
        throw ConfigError(key_path, "unknown parameter '" + name + "' for model " + std::string(to_string(kind)));
}

}  // namespace

RangeSpec parse_range(const std::string& text, const std::string& key_path)
{
    const auto parts = split(text, ':');
    if (parts.size() < 2 || parts.size() > 3)
        throw ConfigError(key_path, "expected lo:hi[:n], got '" + text + "'");
    RangeSpec r;
    r.lo = parse_number(parts[0], key_path + ".lo");
    r.hi = parse_number(parts[1], key_path + ".hi");
    if (parts.size() == 3) {
        const double n = parse_number(parts[2], key_path + ".n");
        if (n != std::floor(n))
            throw ConfigError(key_path + ".n", "expected an integer");
        r.n = static_cast<int>(n);
    }
    return r;
}

std::pair<std::string, double> parse_assignment(const std::string& text, const std::string& key_path)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError(key_path, "expected name=value, got '" + text + "'");
    const std::string name = trim(text.substr(0, eq));
    return {name, parse_number(trim(text.substr(eq + 1)), key_path + "." + name)};
}

void apply_noise_flag(ConfigInput& in, const std::string& text)
{
    for (const auto& item : split(text, ',')) {
        const auto [k, v] = parse_assignment(item, "noise");
        if (k == "mean") in.noise_mean = v;
        else if (k == "std") in.noise_std = v;
        else if (k == "slope") in.noise_slope = v;
        else throw ConfigError("noise." + k, "unknown key (expected mean, std or slope)");
    }
}

ConfigInput config_from_json(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ConfigError("", "top level must be an object");

    ConfigInput in;
    for (const auto& [key, v] : doc.items()) {
        if (key == "command") in.command = get_string(v, key);
        else if (key == "model") in.model = get_string(v, key);
        else if (key == "preset") in.preset = get_string(v, key);
        else if (key == "param") in.param = get_string(v, key);
        else if (key == "out") in.out = get_string(v, key);
        else if (key == "input") in.input = get_string(v, key);
        else if (key == "T") in.T = get_number(v, key);
        else if (key == "seed") {
            if (!v.is_number_unsigned())
                throw ConfigError(key, "expected a non-negative integer");
            in.seed = v.get<std::uint64_t>();
        } else if (key == "params") {
            if (!v.is_object())
                throw ConfigError(key, "expected an object of name: value");
            for (const auto& [name, value] : v.items())
                in.set.emplace_back(name, get_number(value, "params." + name));
        } else if (key == "tolerances") {
            if (!v.is_object())
                throw ConfigError(key, "expected an object of name: value");
            for (const auto& [name, value] : v.items())
                in.tolerances[name] = get_number(value, "tolerances." + name);
        } else if (key == "range") {
            if (v.is_string()) {
                in.range = parse_range(v.get<std::string>(), key);
            } else if (v.is_object()) {
                RangeSpec r;
                bool lo = false, hi = false;
                for (const auto& [k, x] : v.items()) {
                    if (k == "lo") { r.lo = get_number(x, "range.lo"); lo = true; }
                    else if (k == "hi") { r.hi = get_number(x, "range.hi"); hi = true; }
                    else if (k == "n") {
                        if (!x.is_number_integer())
                            throw ConfigError("range.n", "expected an integer");
                        r.n = x.get<int>();
                    } else throw ConfigError("range." + k, "unknown key");
                }
                if (!lo || !hi)
                    throw ConfigError(key, "needs both lo and hi");
                in.range = r;
            } else {
                throw ConfigError(key, "expected \"lo:hi[:n]\" or {lo, hi, n}");
            }
        } else if (key == "pair") {
            if (v.is_string()) {
                in.pair = parse_pair(v.get<std::string>(), key);
            } else if (v.is_array() && v.size() == 2) {
                in.pair = std::make_pair(get_string(v[0], "pair[0]"), get_string(v[1], "pair[1]"));
            } else {
                throw ConfigError(key, "expected \"a,b\" or [a, b]");
            }
        } else if (key == "noise") {
            if (!v.is_object())
                throw ConfigError(key, "expected an object {mean, std, slope}");
            for (const auto& [k, x] : v.items()) {
                if (k == "mean") in.noise_mean = get_number(x, "noise.mean");
                else if (k == "std") in.noise_std = get_number(x, "noise.std");
                else if (k == "slope") in.noise_slope = get_number(x, "noise.slope");
                else throw ConfigError("noise." + k, "unknown key");
            }
        } else if (key == "x0") {
            if (!v.is_array())
                throw ConfigError(key, "expected an array of numbers");
            std::vector<double> x;
            for (std::size_t i = 0; i < v.size(); ++i)
                x.push_back(get_number(v[i], "x0[" + std::to_string(i) + "]"));
            in.x0 = std::move(x);
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    return in;
}

ConfigInput merge(ConfigInput base, const ConfigInput& over)
{
    auto take = [](auto& dst, const auto& src) {
        if (src) dst = src;
    };
    take(base.command, over.command);
    take(base.model, over.model);
    take(base.preset, over.preset);
    base.set.insert(base.set.end(), over.set.begin(), over.set.end());
    take(base.param, over.param);
    take(base.range, over.range);
    take(base.pair, over.pair);
    take(base.out, over.out);
    take(base.seed, over.seed);
    for (const auto& [k, v] : over.tolerances)
        base.tolerances[k] = v;
    take(base.noise_mean, over.noise_mean);
    take(base.noise_std, over.noise_std);
    take(base.noise_slope, over.noise_slope);
    take(base.T, over.T);
    take(base.x0, over.x0);
    take(base.input, over.input);
    return base;
}

std::map<std::string, double> default_tolerances()
{
    return {
        {"xtol", 1e-12},        // root location along X
        {"l1", 1e-4},           // |l1| below this: degenerate Hopf
        {"theta", 1e-7},        // curve birth/death bisection
        {"integrate", 1e-10},   // integrator tolerance in shooting
        {"newton", 1e-8},       // periodicity residual
        {"ode", 1e-8},          // deterministic simulation
        {"dt", 1e-3},           // SDE step
    };
}

std::vector<std::string> command_names()
{
    return {"equilibria", "codim2", "cycles", "flc-curve", "simulate", "sde", "seizure", "bands"};
}

RunConfig resolve(const ConfigInput& in)
{
    RunConfig cfg;
    if (in.command) {
        const auto names = command_names();
        if (std::find(names.begin(), names.end(), *in.command) == names.end())
            throw ConfigError("command", "unknown command '" + *in.command + "'");
        cfg.command = *in.command;
    }

    if (in.preset) {
        cfg.params = preset(*in.preset);
        cfg.preset = *in.preset;
        if (in.model && model_kind_from_string(*in.model) != kind_of(cfg.params))
            throw ConfigError("preset", "preset '" + *in.preset + "' does not belong to model '" + *in.model + "'");
    } else if (in.model) {
        const ModelKind kind = model_kind_from_string(*in.model);
        cfg.preset = std::string(default_preset(kind));
        cfg.params = preset(cfg.preset);
    } else {
        throw ConfigError("model", "a model or a preset is required");
    }
    const ModelKind kind = kind_of(cfg.params);

    for (const auto& [name, value] : in.set) {
        check_param(kind, name, "params." + name);
        set_param(cfg.params, name, value);
        cfg.overrides.emplace_back(name, value);
    }
    try {
        std::visit([](const auto& p) { p.validate(); }, cfg.params);
    } catch (const DomainError& e) {
        throw ConfigError("params", e.what());
    }

    const std::string primary(primary_parameter(kind));
    if (in.param) {
        check_param(kind, *in.param, "param");
        cfg.param = *in.param;
    } else {
        cfg.param = kind == ModelKind::dbt ? "beta" : "j";
    }
    if (in.pair) {
        check_param(kind, in.pair->first, "pair[0]");
        check_param(kind, in.pair->second, "pair[1]");
        if (in.pair->first == in.pair->second)
            throw ConfigError("pair", "the two parameters must differ");
        if (in.pair->second != primary)
            throw ConfigError("pair[1]", "second parameter must be the input '" + primary + "'");
        cfg.pair = *in.pair;
    } else {
        cfg.pair = {cfg.param, primary};
    }

    if (in.range) {
        const RangeSpec& r = *in.range;
        if (!(r.lo < r.hi))
            throw ConfigError("range", "empty range: lo must be below hi");
        if (r.n != 0 && r.n < 2)
            throw ConfigError("range.n", "need at least 2 points");
        cfg.range = r;
    }

    if (in.out) {
        if (in.out->empty())
            throw ConfigError("out", "empty output directory");
        cfg.out = *in.out;
    }
    cfg.seed = in.seed.value_or(0);

    cfg.tolerances = default_tolerances();
    for (const auto& [name, value] : in.tolerances) {
        if (!cfg.tolerances.contains(name))
            throw ConfigError("tolerances." + name, "unknown tolerance");
        if (!(value > 0.0))
            throw ConfigError("tolerances." + name, "must be positive");
        cfg.tolerances[name] = value;
    }
    if (cfg.tolerances["dt"] > 1e-3)
        throw ConfigError("tolerances.dt", "SDE step must not exceed 1e-3");

    // The seizure sweep defaults to the drifting-mean protocol; other runs
    // take the mean from the model input.
    const bool seizure = cfg.command == "seizure";
    const double mean_default = seizure ? 1.5 : (kind == ModelKind::dbt ? 0.0 : get_param(cfg.params, "P"));
    cfg.noise.mu0 = in.noise_mean.value_or(mean_default);
    cfg.noise.sigma = in.noise_std.value_or(seizure ? 0.4 : 0.0);
    cfg.noise.slope = in.noise_slope.value_or(seizure ? 1e-3 : 0.0);
    cfg.noise.seed = cfg.seed;
    if (cfg.noise.sigma < 0.0)
        throw ConfigError("noise.std", "must be non-negative");
    if (cfg.noise.slope < 0.0)
        throw ConfigError("noise.slope", "must be non-negative");

    cfg.T = in.T.value_or(seizure ? 4000.0 : cfg.command == "sde" ? 2000.0 : 100.0);
    if (!(cfg.T > 0.0))
        throw ConfigError("T", "must be positive");

    if (in.x0) {
        if (static_cast<int>(in.x0->size()) != dimension(kind))
            throw ConfigError("x0", "expected " + std::to_string(dimension(kind)) + " components");
        cfg.x0 = in.x0;
    }
    if (in.input)
        cfg.input = *in.input;
    if (cfg.command == "bands" && cfg.input.empty())
        throw ConfigError("input", "bands needs an input cycles.csv");
    return cfg;
}

}  // namespace neurobif
