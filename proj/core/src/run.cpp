#include "neurobif/run.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <ostream>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "json.hpp"
#include "neurobif/codim2.hpp"
#include "neurobif/cycles.hpp"
#include "neurobif/equilibria.hpp"
#include "neurobif/errors.hpp"
#include "neurobif/ode.hpp"
#include "neurobif/scenarios.hpp"
#include "neurobif/serialize.hpp"

#ifndef NEUROBIF_VERSION
#define NEUROBIF_VERSION "0.0.0"
#endif

namespace neurobif {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

class Artifacts {
public:
    Artifacts(fs::path dir, RunOutcome& outcome) : dir_(std::move(dir)), outcome_(outcome) {}

    void write(const std::string& name, const std::string& content)
    {
        write_file_atomic(dir_ / name, content);
        outcome_.files.push_back(name);
    }
    void write(const std::string& name, const CsvTable& table) { write(name, to_csv(table)); }

private:
    fs::path dir_;
    RunOutcome& outcome_;
};

SweepRange x_sweep(const RunConfig& cfg)
{
    SweepRange r = default_sweep(cfg.model());
    if (cfg.range) {
        r.lo = cfg.range->lo;
        r.hi = cfg.range->hi;
        if (cfg.range->n > 0)
            r.n = cfg.range->n;
    }
    return r;
}

DetectOptions detect_options(const RunConfig& cfg)
{
    DetectOptions o;
    o.xtol = cfg.tolerances.at("xtol");
    o.l1_tol = cfg.tolerances.at("l1");
    return o;
}

ContinuationOptions continuation_options(const RunConfig& cfg)
{
    ContinuationOptions o;
    o.shooting.tol = cfg.tolerances.at("integrate");
    o.shooting.newton_tol = cfg.tolerances.at("newton");
    return o;
}

void require_neural_mass(const RunConfig& cfg)
{
    if (cfg.model() == ModelKind::dbt)
        throw ConfigError("model", "'" + cfg.command + "' needs a neural mass model (jr or wc)");
}

void count_kinds(const std::vector<BifurcationPoint>& pts, std::ostream& log)
{
    std::map<std::string, int> n;
    for (const auto& p : pts)
        ++n[std::string(to_string(p.kind))];
    for (const auto& [k, c] : n)
        log << "  " << k << ": " << c << "\n";
}

void run_equilibria(const RunConfig& cfg, Artifacts& out, std::ostream& log)
{
    const Codim1Report rep = codim1_report(cfg.params, x_sweep(cfg), detect_options(cfg));
    out.write("branch.csv", branch_table(rep.branch));
    out.write("bifpoints.json", bifpoints_to_json(rep.points));
    log << "equilibria: " << rep.branch.samples.size() << " samples, " << rep.points.size() << " points\n";
    count_kinds(rep.points, log);
}

void run_codim2(const RunConfig& cfg, Artifacts& out, std::ostream& log)
{
    if (!cfg.range)
        throw ConfigError("range", "codim2 needs a range for " + cfg.pair.first);
    PlaneOptions po;
    po.trace.theta_tol = cfg.tolerances.at("theta");
    const int n = cfg.range->n > 0 ? cfg.range->n : 200;
    const PlaneAnalysis plane = analyze_plane(cfg.params, cfg.pair.first, cfg.range->lo, cfg.range->hi, n, po);
    out.write("curves.csv", curves_table(plane));
    out.write("bifpoints.json", bifpoints_to_json(plane.points));
    log << "codim2 (" << cfg.pair.first << ", " << cfg.pair.second << "): " << plane.sn_curves.size()
        << " saddle-node and " << plane.hopf_curves.size() << " Hopf curves, " << plane.points.size() << " points\n";
    count_kinds(plane.points, log);
}

void run_cycles(const RunConfig& cfg, Artifacts& out, std::ostream& log)
{
    require_neural_mass(cfg);
    ContinuationOptions co = continuation_options(cfg);
    if (cfg.range) {
        co.P_min = cfg.range->lo;
        co.P_max = cfg.range->hi;
        if (cfg.range->n > 0)
            co.max_points = cfg.range->n;
    }
    const CycleSet set = cycle_set(cfg.params, co);
    out.write("cycles.csv", cycles_table(cycle_rows(set)));

    std::vector<BifurcationPoint> pts;
    for (const LimitCycle& f : set.folds) {
        BifurcationPoint bp;
        bp.kind = BifKind::fold_of_cycles;
        bp.plane = {"P"};
        bp.coords = {{"P", f.P}, {"X", f.x_max}};
        bp.diagnostics = {{"period", f.period}, {"x_min", f.x_min}, {"x_max", f.x_max}};
        pts.push_back(std::move(bp));
    }
    pts.insert(pts.end(), set.snic.begin(), set.snic.end());
    out.write("bifpoints.json", bifpoints_to_json(pts));
    log << "cycles: " << set.branches.size() << " families, " << set.folds.size() << " folds, " << set.snic.size()
        << " SNIC ends\n";
    for (const auto& w : set.warnings)
        log << "  warning: " << w << "\n";
}

void run_flc(const RunConfig& cfg, Artifacts& out, std::ostream& log)
{
    require_neural_mass(cfg);
    FlcOptions o = default_flc_options(cfg.model());
    o.theta_name = cfg.param;
    if (cfg.range) {
        o.theta_lo = cfg.range->lo;
        o.theta_hi = cfg.range->hi;
        if (cfg.range->n > 0)
            o.n_theta = cfg.range->n;
    }
    o.continuation = continuation_options(cfg);
    const FlcCurve curve = trace_flc_curve(cfg.params, o);
    out.write("flc.csv", flc_table(curve));
    out.write("bifpoints.json", bifpoints_to_json(curve.points));
    log << "flc-curve: " << curve.samples.size() << " folds over " << o.n_theta << " slices, " << curve.points.size()
        << " special points\n";
    for (const auto& w : curve.warnings)
        log << "  warning: " << w << "\n";
}

Vec initial_state(const RunConfig& cfg)
{
    if (cfg.x0)
        return Eigen::Map<const Vec>(cfg.x0->data(), static_cast<Eigen::Index>(cfg.x0->size()));
    return Vec::Zero(dimension(cfg.model()));
}

void run_simulate(const RunConfig& cfg, Artifacts& out, std::ostream& log)
{
    IntegrateOptions io;
    io.tol = cfg.tolerances.at("ode");
    io.record_dt = std::max(1e-2, cfg.T / 1e5);
    const Trajectory tr = integrate(cfg.params, initial_state(cfg), 0.0, cfg.T, io);
    SdeTrajectory st;
    st.model = cfg.model();
    st.times = tr.times;
    st.states = tr.states;
    const double p = get_param(cfg.params, std::string(primary_parameter(cfg.model())));
    st.P_inst.assign(st.times.size(), p);
    out.write("traj.csv", traj_table(st));
    log << "simulate: " << st.size() << " samples, " << tr.steps << " steps\n";
}

SdeOptions sde_options(const RunConfig& cfg)
{
    SdeOptions o;
    o.dt = cfg.tolerances.at("dt");
    return o;
}

void run_sde(const RunConfig& cfg, Artifacts& out, std::ostream& log)
{
    require_neural_mass(cfg);
    const Vec x0 = cfg.x0 ? initial_state(cfg) : Vec{};
    const SdeTrajectory tr = simulate_sde(cfg.params, cfg.noise, cfg.T, x0, sde_options(cfg));
    out.write("traj.csv", traj_table(tr));
    const SpikeTrain spikes = detect_spikes(tr);
    out.write("spikes.csv", spikes_table(spikes));
    log << "sde: " << tr.size() << " samples, " << spikes.size() << " spikes (" << spikes.pds_count() << " PDS)\n";
}

void run_seizure(const RunConfig& cfg, Artifacts& out, std::ostream& log)
{
    if (cfg.model() != ModelKind::jansen_rit)
        throw ConfigError("model", "seizure runs the Jansen-Rit model");
    const SeizureResult res = seizure_scenario(get_param(cfg.params, "j"), cfg.noise, cfg.T, {}, sde_options(cfg));
    out.write("traj.csv", traj_table(res.trajectory));
    out.write("spikes.csv", spikes_table(res.spikes));
    out.write("phases.json", phases_to_json(res.phases));
    log << "seizure: " << res.spikes.size() << " spikes;";
    for (const auto& p : res.phases)
        log << " " << p.name << " [" << p.start << ", " << p.end << ")";
    log << "\n";
}

void run_bands(const RunConfig& cfg, Artifacts& out, std::ostream& log)
{
    const auto rows = cycles_from_table(parse_csv(read_file(cfg.input)));
    CsvTable t;
    t.columns = {"branch", "P", "period", "freq_hz", "band"};
    std::map<std::string, std::pair<int, std::pair<double, double>>> summary;
    for (const auto& r : rows) {
        const Band b = classify_band(r.period);
        const std::string name(to_string(b));
        t.rows.push_back({std::to_string(r.branch), format_double(r.P), format_double(r.period),
                          format_double(cycle_frequency_hz(r.period)), name});
        auto [it, fresh] = summary.try_emplace(name, 0, std::make_pair(r.P, r.P));
        ++it->second.first;
        it->second.second.first = std::min(it->second.second.first, r.P);
        it->second.second.second = std::max(it->second.second.second, r.P);
    }
    out.write("bands.csv", t);
    ojson doc = ojson::object();
    for (Band b : {Band::sub_delta, Band::delta, Band::theta, Band::alpha, Band::beta, Band::gamma}) {
        const std::string name(to_string(b));
        const auto it = summary.find(name);
        if (it == summary.end())
            continue;
        doc[name] = {{"count", it->second.first}, {"P_min", it->second.second.first}, {"P_max", it->second.second.second}};
    }
    out.write("bands.json", doc.dump(2) + "\n");
    log << "bands: " << rows.size() << " cycles classified\n";
}

std::string manifest(const RunConfig& cfg, const RunOutcome& outcome, double wall)
{
    ojson m;
    m["command"] = cfg.command;
    m["model"] = std::string(to_string(cfg.model()));
    m["preset"] = cfg.preset;
    ojson ov = ojson::object();
    for (const auto& [k, v] : cfg.overrides)
        ov[k] = v;
    m["overrides"] = ov;
    ojson params = ojson::object();
    for (const auto& name : param_names(cfg.model()))
        params[name] = get_param(cfg.params, name);
    m["params"] = params;
    m["seed"] = cfg.seed;
    m["tolerances"] = cfg.tolerances;
    m["param"] = cfg.param;
    m["pair"] = {cfg.pair.first, cfg.pair.second};
    m["range"] = cfg.range ? ojson{{"lo", cfg.range->lo}, {"hi", cfg.range->hi}, {"n", cfg.range->n}} : ojson(nullptr);
    m["noise"] = {{"mean", cfg.noise.mu0}, {"std", cfg.noise.sigma}, {"slope", cfg.noise.slope}};
    m["T"] = cfg.T;
    m["x0"] = cfg.x0 ? ojson(*cfg.x0) : ojson(nullptr);
    m["input"] = cfg.input;
    m["files"] = outcome.files;
    m["versions"] = {{"neurobif", library_version()},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
                                   "." + std::to_string(BOOST_VERSION % 100)},
#if defined(__VERSION__)
                     {"compiler", __VERSION__}
#else
                     {"compiler", "unknown"}
#endif
    };
    m["wall_time_s"] = wall;
    m["partial"] = outcome.partial;
    m["exit_code"] = outcome.exit_code;
    if (!outcome.error.empty())
        m["error"] = outcome.error;
    return m.dump(2) + "\n";
}

}  // namespace

std::string library_version()
{
    return NEUROBIF_VERSION;
}

RunOutcome run(const RunConfig& cfg, std::ostream& log)
{
    RunOutcome outcome;
    const auto t0 = std::chrono::steady_clock::now();
    Artifacts out(cfg.out, outcome);
    try {
        if (cfg.command == "equilibria") run_equilibria(cfg, out, log);
        else if (cfg.command == "codim2") run_codim2(cfg, out, log);
        else if (cfg.command == "cycles") run_cycles(cfg, out, log);
        else if (cfg.command == "flc-curve") run_flc(cfg, out, log);
        else if (cfg.command == "simulate") run_simulate(cfg, out, log);
        else if (cfg.command == "sde") run_sde(cfg, out, log);
        else if (cfg.command == "seizure") run_seizure(cfg, out, log);
        else if (cfg.command == "bands") run_bands(cfg, out, log);
        else throw ConfigError("command", "unknown command '" + cfg.command + "'");
    } catch (const NumericalFailure& e) {
        outcome.exit_code = exit_numerical;
        outcome.error = e.what();
    } catch (const ConfigError& e) {
        outcome.exit_code = exit_config;
        outcome.error = e.what();
    } catch (const DomainError& e) {
        outcome.exit_code = exit_config;
        outcome.error = e.what();
    } catch (const ContractViolation& e) {
        outcome.exit_code = exit_config;
        outcome.error = e.what();
    }
    outcome.partial = outcome.exit_code != exit_ok;
    if (!outcome.error.empty())
        log << "error: " << outcome.error << "\n";

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
        outcome.files.push_back("manifest.json");
        write_file_atomic(fs::path(cfg.out) / "manifest.json", manifest(cfg, outcome, wall));
    } catch (const std::exception& e) {
        outcome.files.pop_back();
        log << "error: manifest not written: " << e.what() << "\n";
        if (outcome.exit_code == exit_ok)
            outcome.exit_code = exit_config;
    }
    return outcome;
}

}  // namespace neurobif
