#include "neurobif/serialize.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "json.hpp"
#include "neurobif/errors.hpp"

namespace neurobif {

namespace {

using ojson = nlohmann::ordered_json;

ojson number_or_null(double v)
{
    return std::isfinite(v) ? ojson(v) : ojson(nullptr);
}

double number_from(const ojson& v, const std::string& where)
{
    if (v.is_null())
        return std::numeric_limits<double>::quiet_NaN();
    if (!v.is_number())
        throw ConfigError(where, "expected a number");
    return v.get<double>();
}

ojson parse_json(const std::string& text, const std::string& what)
{
    try {
        return ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        throw ConfigError(what, std::string("malformed JSON: ") + e.what());
    }
}

std::string dump(const ojson& doc)
{
    return doc.dump(2) + "\n";
}

Band band_from_string(const std::string& s)
{
    for (Band b : {Band::sub_delta, Band::delta, Band::theta, Band::alpha, Band::beta, Band::gamma})
        if (to_string(b) == s)
            return b;
    throw ConfigError("band", "unknown band '" + s + "'");
}

}  // namespace

std::string format_double(double v)
{
    char buf[40];
    const int n = std::snprintf(buf, sizeof buf, "%.16e", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

double parse_double(const std::string& text, const std::string& where)
{
    if (text == "nan" || text == "-nan")
        return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf")
        return std::numeric_limits<double>::infinity();
    if (text == "-inf")
        return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ConfigError(where, "expected a number, got '" + text + "'");
    return v;
}

std::size_t CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name)
            return i;
    throw ConfigError(name, "missing CSV column");
}

std::string to_csv(const CsvTable& table)
{
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].find_first_of(",\"\n\r") != std::string::npos)
                throw ContractViolation("to_csv: cell needs quoting: " + cells[i]);
            if (i)
                out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(table.columns);
    for (const auto& r : table.rows) {
        if (r.size() != table.columns.size())
            throw ContractViolation("to_csv: row width differs from the header");
        line(r);
    }
    return out;
}

CsvTable parse_csv(const std::string& text)
{
    CsvTable t;
    std::size_t pos = 0;
    std::size_t lineno = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos)
            end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::vector<std::string> cells;
        std::size_t s = 0;
        while (true) {
            const auto c = line.find(',', s);
            cells.push_back(line.substr(s, c - s));
            if (c == std::string::npos)
                break;
            s = c + 1;
        }
        if (lineno == 1) {
            t.columns = std::move(cells);
        } else {
            if (cells.size() != t.columns.size())
                throw ConfigError("line " + std::to_string(lineno), "expected " + std::to_string(t.columns.size()) +
                                                                        " cells, got " + std::to_string(cells.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    if (t.columns.empty())
        throw ConfigError("", "empty CSV (no header)");
    return t;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    namespace fs = std::filesystem;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw ConfigError(path.string(), "cannot open for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f)
            throw ConfigError(path.string(), "write failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw ConfigError(path.string(), "rename failed: " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError(path.string(), "cannot open for reading");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// bifpoints.json

std::string bifpoints_to_json(const std::vector<BifurcationPoint>& points)
{
    ojson arr = ojson::array();
    for (const auto& p : points) {
        ojson o;
        o["kind"] = std::string(to_string(p.kind));
        o["plane"] = p.plane;
        ojson coords = ojson::object();
        for (const auto& [k, v] : p.coords)
            coords[k] = number_or_null(v);
        o["coords"] = coords;
        ojson diag = ojson::object();
        for (const auto& [k, v] : p.diagnostics)
            diag[k] = number_or_null(v);
        o["diagnostics"] = diag;
        o["label"] = p.label;
        o["warnings"] = p.warnings;
        arr.push_back(std::move(o));
    }
    return dump(arr);
}

std::vector<BifurcationPoint> bifpoints_from_json(const std::string& text)
{
    const ojson doc = parse_json(text, "bifpoints");
    if (!doc.is_array())
        throw ConfigError("bifpoints", "expected an array");
    std::vector<BifurcationPoint> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string at = "bifpoints[" + std::to_string(i) + "]";
        const ojson& o = doc[i];
        if (!o.is_object() || !o.contains("kind") || !o.contains("coords"))
            throw ConfigError(at, "expected {kind, plane, coords, diagnostics}");
        BifurcationPoint p;
        try {
            p.kind = bif_kind_from_string(o.at("kind").get<std::string>());
        } catch (const std::exception& e) {
            throw ConfigError(at + ".kind", e.what());
        }
        if (o.contains("plane"))
            p.plane = o.at("plane").get<std::vector<std::string>>();
        for (const auto& [k, v] : o.at("coords").items())
            p.coords.emplace_back(k, number_from(v, at + ".coords." + k));
        if (o.contains("diagnostics"))
            for (const auto& [k, v] : o.at("diagnostics").items())
                p.diagnostics[k] = number_from(v, at + ".diagnostics." + k);
        if (o.contains("label"))
            p.label = o.at("label").get<std::string>();
        if (o.contains("warnings"))
            p.warnings = o.at("warnings").get<std::vector<std::string>>();
        out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tables

CsvTable branch_table(const EquilibriumBranch& branch)
{
    CsvTable t;
    t.columns = {"X", "P"};
    for (const auto& c : component_names(branch.model))
        t.columns.push_back(c);
    t.columns.insert(t.columns.end(), {"n_unstable", "stable", "max_real"});
    for (const auto& s : branch.samples) {
        std::vector<std::string> r{format_double(s.X), format_double(s.P)};
        for (Eigen::Index i = 0; i < s.state.size(); ++i)
            r.push_back(format_double(s.state(i)));
        r.push_back(std::to_string(s.n_unstable));
        r.push_back(s.stable ? "1" : "0");
        const double re = s.eigenvalues.size() > 0 ? s.eigenvalues(0).real() : std::numeric_limits<double>::quiet_NaN();
        r.push_back(format_double(re));
        t.rows.push_back(std::move(r));
    }
    return t;
}

CsvTable curves_table(const PlaneAnalysis& plane)
{
    CsvTable t;
    t.columns = {"curve", "kind", "theta", "P", "X", "fold"};
    int id = 0;
    for (const auto* list : {&plane.sn_curves, &plane.hopf_curves}) {
        for (const auto& c : *list) {
            for (const auto& s : c.samples)
                t.rows.push_back({std::to_string(id), std::string(to_string(c.kind)), format_double(s.theta),
                                  format_double(s.P), format_double(s.X), s.fold ? "1" : "0"});
            ++id;
        }
    }
    return t;
}

std::vector<CycleRow> cycle_rows(const CycleSet& set, double a)
{
    std::vector<CycleRow> rows;
    for (std::size_t b = 0; b < set.branches.size(); ++b) {
        const auto& br = set.branches[b];
        for (std::size_t i = 0; i < br.cycles.size(); ++i) {
            const LimitCycle& c = br.cycles[i];
            CycleRow r;
            r.branch = static_cast<int>(b);
            r.P = c.P;
            r.period = c.period;
            r.freq_hz = cycle_frequency_hz(c.period, a);
            r.x_min = c.x_min;
            r.x_max = c.x_max;
            r.max_nontrivial = c.max_nontrivial;
            r.stable = c.stable;
            r.band = c.band;
            for (const auto& e : br.events) {
                if (e.index != i)
                    continue;
                if (!r.event.empty())
                    r.event += '+';
                r.event += to_string(e.kind);
            }
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

CsvTable cycles_table(const std::vector<CycleRow>& rows)
{
    CsvTable t;
    t.columns = {"branch", "P",     "period", "freq_hz", "x_min", "x_max", "max_nontrivial_multiplier_modulus",
                 "stable", "band", "event"};
    for (const auto& r : rows)
        t.rows.push_back({std::to_string(r.branch), format_double(r.P), format_double(r.period),
                          format_double(r.freq_hz), format_double(r.x_min), format_double(r.x_max),
                          format_double(r.max_nontrivial), r.stable ? "1" : "0", std::string(to_string(r.band)),
                          r.event});
    return t;
}

std::vector<CycleRow> cycles_from_table(const CsvTable& t)
{
    const auto cb = t.column("branch"), cp = t.column("P"), cT = t.column("period"), cf = t.column("freq_hz"),
               cmin = t.column("x_min"), cmax = t.column("x_max"),
               cm = t.column("max_nontrivial_multiplier_modulus"), cs = t.column("stable"), cbd = t.column("band"),
               ce = t.column("event");
    std::vector<CycleRow> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        const std::string at = "row " + std::to_string(i + 1);
        CycleRow c;
        c.branch = static_cast<int>(parse_double(r[cb], at + ".branch"));
        c.P = parse_double(r[cp], at + ".P");
        c.period = parse_double(r[cT], at + ".period");
        c.freq_hz = parse_double(r[cf], at + ".freq_hz");
        c.x_min = parse_double(r[cmin], at + ".x_min");
        c.x_max = parse_double(r[cmax], at + ".x_max");
        c.max_nontrivial = parse_double(r[cm], at + ".max_nontrivial_multiplier_modulus");
        if (r[cs] != "0" && r[cs] != "1")
            throw ConfigError(at + ".stable", "expected 0 or 1");
        c.stable = r[cs] == "1";
        c.band = band_from_string(r[cbd]);
        c.event = r[ce];
        out.push_back(std::move(c));
    }
    return out;
}

CsvTable flc_table(const FlcCurve& curve)
{
    CsvTable t;
    t.columns = {curve.theta_name, "P", "period"};
    for (const auto& s : curve.samples)
        t.rows.push_back({format_double(s.theta), format_double(s.P), format_double(s.period)});
    return t;
}

CsvTable traj_table(const SdeTrajectory& traj)
{
    CsvTable t;
    t.columns = {"tau"};
    for (const auto& c : component_names(traj.model))
        t.columns.push_back(c);
    t.columns.push_back("P_inst");
    for (std::size_t i = 0; i < traj.size(); ++i) {
        std::vector<std::string> r{format_double(traj.times[i])};
        for (Eigen::Index k = 0; k < traj.states[i].size(); ++k)
            r.push_back(format_double(traj.states[i](k)));
        r.push_back(format_double(i < traj.P_inst.size() ? traj.P_inst[i] : std::numeric_limits<double>::quiet_NaN()));
        t.rows.push_back(std::move(r));
    }
    return t;
}

SdeTrajectory traj_from_table(const CsvTable& t)
{
    SdeTrajectory traj;
    bool found = false;
    for (ModelKind k : {ModelKind::jansen_rit, ModelKind::wendling_chauvel, ModelKind::dbt}) {
        auto names = component_names(k);
        names.insert(names.begin(), "tau");
        names.push_back("P_inst");
        if (names == t.columns) {
            traj.model = k;
            found = true;
            break;
        }
    }
    if (!found)
        throw ConfigError("traj", "header does not match any model's components");
    const int n = dimension(traj.model);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        const std::string at = "row " + std::to_string(i + 1);
        traj.times.push_back(parse_double(r[0], at + ".tau"));
        Vec x(n);
        for (int k = 0; k < n; ++k)
            x(k) = parse_double(r[static_cast<std::size_t>(k) + 1], at + "." + t.columns[static_cast<std::size_t>(k) + 1]);
        traj.states.push_back(std::move(x));
        traj.P_inst.push_back(parse_double(r.back(), at + ".P_inst"));
    }
    return traj;
}

CsvTable spikes_table(const SpikeTrain& spikes)
{
    CsvTable t;
    t.columns = {"time", "amplitude", "is_pds"};
    for (std::size_t i = 0; i < spikes.size(); ++i)
        t.rows.push_back({format_double(spikes.times[i]), format_double(spikes.amplitudes[i]), spikes.pds[i] ? "1" : "0"});
    return t;
}

SpikeTrain spikes_from_table(const CsvTable& t)
{
    const auto ct = t.column("time"), ca = t.column("amplitude"), cp = t.column("is_pds");
    SpikeTrain s;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        const std::string at = "row " + std::to_string(i + 1);
        s.times.push_back(parse_double(r[ct], at + ".time"));
        s.amplitudes.push_back(parse_double(r[ca], at + ".amplitude"));
        if (r[cp] != "0" && r[cp] != "1")
            throw ConfigError(at + ".is_pds", "expected 0 or 1");
        s.pds.push_back(r[cp] == "1");
    }
    return s;
}

std::string phases_to_json(const std::vector<Phase>& phases)
{
    ojson arr = ojson::array();
    for (const auto& p : phases) {
        ojson o;
        o["phase"] = p.name;
        o["start"] = number_or_null(p.start);
        o["end"] = number_or_null(p.end);
        arr.push_back(std::move(o));
    }
    return dump(arr);
}

std::vector<Phase> phases_from_json(const std::string& text)
{
    const ojson doc = parse_json(text, "phases");
    if (!doc.is_array())
        throw ConfigError("phases", "expected an array");
    std::vector<Phase> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string at = "phases[" + std::to_string(i) + "]";
        const ojson& o = doc[i];
        if (!o.is_object() || !o.contains("phase") || !o.contains("start") || !o.contains("end"))
            throw ConfigError(at, "expected {phase, start, end}");
        out.push_back({o.at("phase").get<std::string>(), number_from(o.at("start"), at + ".start"),
                       number_from(o.at("end"), at + ".end")});
    }
    return out;
}

std::string canonical_json(const std::string& text)
{
    return dump(parse_json(text, "json"));
}

}  // namespace neurobif
