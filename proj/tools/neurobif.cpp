// neurobif: bifurcation analyses and noisy simulations of neural mass models.
//
//   neurobif equilibria --model jr --set j=12.285 --out run1
//   neurobif codim2 --model jr --pair j,P --range 4:16 --out run2
//   neurobif sde --model jr --set j=12.285 --noise mean=1.8,std=0.5 --T 2000 --seed 7
//
// Exit status: 0 success, 1 configuration error, 2 numerical failure.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "neurobif/config.hpp"
#include "neurobif/errors.hpp"
#include "neurobif/run.hpp"
#include "neurobif/serialize.hpp"

namespace {

struct Flags {
    std::string config, model, preset, param, range, pair, out, noise, x0, input;
    std::vector<std::string> set, tol;
    std::uint64_t seed = 0;
    double T = 0.0;
};

void add_options(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--config", f.config, "JSON config file (flags override it)");
    cmd->add_option("--model", f.model, "jr, wc or dbt");
    cmd->add_option("--preset", f.preset, "jr-default, wc-default or dbt-default");
    cmd->add_option("--set", f.set, "parameter override name=value (repeatable)");
    cmd->add_option("--param", f.param, "continuation parameter (flc-curve)");
    cmd->add_option("--range", f.range, "lo:hi[:n] for the swept quantity");
    cmd->add_option("--pair", f.pair, "parameter plane a,P (codim2)");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--seed", f.seed, "noise seed");
    cmd->add_option("--tol", f.tol, "tolerance override NAME=V (repeatable)");
    cmd->add_option("--noise", f.noise, "mean=..,std=..,slope=..");
    cmd->add_option("--T", f.T, "integration horizon, dimensionless time");
    cmd->add_option("--x0", f.x0, "initial state, comma separated");
    cmd->add_option("--input", f.input, "input cycles.csv (bands)");
}

neurobif::ConfigInput to_input(const CLI::App* cmd, const Flags& f)
{
    neurobif::ConfigInput in;
    in.command = cmd->get_name();
    auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--model")) in.model = f.model;
    if (given("--preset")) in.preset = f.preset;
    for (const auto& s : f.set)
        in.set.push_back(neurobif::parse_assignment(s, "params"));
    if (given("--param")) in.param = f.param;
    if (given("--range")) in.range = neurobif::parse_range(f.range);
    if (given("--pair")) {
        const auto c = f.pair.find(',');
        if (c == std::string::npos)
            throw neurobif::ConfigError("pair", "expected 'a,b', got '" + f.pair + "'");
        in.pair = std::make_pair(f.pair.substr(0, c), f.pair.substr(c + 1));
    }
    if (given("--out")) in.out = f.out;
    if (given("--seed")) in.seed = f.seed;
    for (const auto& t : f.tol) {
        const auto [k, v] = neurobif::parse_assignment(t, "tolerances");
        in.tolerances[k] = v;
    }
    if (given("--noise")) neurobif::apply_noise_flag(in, f.noise);
    if (given("--T")) in.T = f.T;
    if (given("--x0")) {
        std::vector<double> x;
        std::size_t s = 0;
        while (true) {
            const auto c = f.x0.find(',', s);
            x.push_back(neurobif::parse_double(f.x0.substr(s, c - s), "x0"));
            if (c == std::string::npos)
                break;
            s = c + 1;
        }
        in.x0 = std::move(x);
    }
    if (given("--input")) in.input = f.input;
    return in;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bifurcation analysis and noisy simulation of neural mass models"};
    app.set_version_flag("--version", neurobif::library_version());
    app.require_subcommand(1);

    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"equilibria", "equilibrium branch and codimension-one points"},
        {"codim2", "saddle-node/Hopf curves and codimension-two points in a plane"},
        {"cycles", "limit-cycle families from every Hopf point"},
        {"flc-curve", "fold-of-cycles curve in (param, P)"},
        {"simulate", "deterministic integration"},
        {"sde", "noise-driven integration with spike detection"},
        {"seizure", "drifting-mean seizure sweep with phase segmentation"},
        {"bands", "EEG band classification of a cycles.csv"},
    };
    for (const auto& [name, help] : commands)
        add_options(app.add_subcommand(name, help), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? neurobif::exit_ok : neurobif::exit_config;
    }

    const CLI::App* cmd = app.get_subcommands().front();
    neurobif::RunConfig cfg;
    try {
        neurobif::ConfigInput in = to_input(cmd, flags);
        if (cmd->count("--config") > 0)
            in = neurobif::merge(neurobif::config_from_json(neurobif::read_file(flags.config)), in);
        cfg = neurobif::resolve(in);
    } catch (const neurobif::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return neurobif::exit_config;
    }
    const auto outcome = neurobif::run(cfg, std::cout);
    return outcome.exit_code;
}
