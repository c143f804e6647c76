// One PASS/FAIL line per acceptance criterion. Exit status is non-zero only
// for failures outside the documented known-failure list (see README).
//
//   neurobif_acceptance [--unit <path to neurobif_unit>] [--only N]...

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "neurobif/codim2.hpp"
#include "neurobif/cycles.hpp"
#include "neurobif/equilibria.hpp"
#include "neurobif/scenarios.hpp"

using namespace neurobif;

namespace {

using Clock = std::chrono::steady_clock;

// Sub-items that fail for documented reasons.
const std::set<std::string> known_failures{"7.E", "9a"};

struct Verdict {
    std::vector<std::string> failed;   // sub-item ids
    std::vector<std::string> notes;

    void check(bool ok, const std::string& id, const std::string& note)
    {
        notes.push_back((ok ? "  ok   " : "  FAIL ") + id + ": " + note);
        if (!ok)
            failed.push_back(id);
    }
};

template <typename... A>
std::string fmt(const char* f, A... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Point of the given kind closest to the target.
const BifurcationPoint* nearest(const std::vector<BifurcationPoint>& pts, BifKind kind, const std::string& a,
                                double ta, double tb, double shift = 0.0)
{
    const BifurcationPoint* best = nullptr;
    double bd = 0.0;
    for (const auto& p : pts) {
        if (p.kind != kind)
            continue;
        const double d = std::hypot(p.coord(a) - ta, p.coord("P") - shift - tb);
        if (!best || d < bd) {
            best = &p;
            bd = d;
        }
    }
    return best;
}

void expect_point(Verdict& v, const std::vector<BifurcationPoint>& pts, BifKind kind, const std::string& id,
                  const std::string& a, double ta, double tb, double tol, double shift = 0.0)
{
    const BifurcationPoint* p = nearest(pts, kind, a, ta, tb, shift);
    if (!p) {
        v.check(false, id, "not detected");
        return;
    }
    const double x = p->coord(a), y = p->coord("P") - shift;
    const bool ok = std::abs(x - ta) <= tol && std::abs(y - tb) <= tol;
    v.check(ok, id, fmt("(%.4f, %.4f)", x, y) + fmt(" vs (%.3f, %.3f)", ta, tb) + fmt(" tol %.2f", tol));
}

void time_limit(Verdict& v, Clock::time_point t0, double limit_s)
{
    const double s = seconds_since(t0);
    v.check(s < limit_s, "time", fmt("%.1f s (limit %.0f s)", s, limit_s));
}

const PlaneAnalysis& jr_jP()
{
    static const PlaneAnalysis a = analyze_plane(preset("jr-default"), "j", 4.0, 16.0, 200);
    return a;
}

const FlcCurve& jr_flc()
{
    static const FlcCurve c = trace_flc_curve(preset("jr-default"), default_flc_options(ModelKind::jansen_rit));
    return c;
}

double log_k0()
{
    return get_param(preset("jr-default"), "log_k0");
}

std::vector<double> hopf_turning_points()
{
    std::vector<double> t;
    for (const auto& f : jr_jP().folds)
        if (f.kind == CurveKind::hopf)
            t.push_back(f.theta);
    std::sort(t.begin(), t.end());
    return t;
}

const BifurcationPoint* flc_point(const std::string& label)
{
    for (const auto& p : jr_flc().points)
        if (p.label == label)
            return &p;
    return nullptr;
}

Verdict criterion1()
{
    Verdict v;
    const auto t0 = Clock::now();
    const auto& pts = jr_jP().points;
    const double s = log_k0();   // table inputs are P - ln k0
    expect_point(v, pts, BifKind::cusp, "C", "j", 5.38, -0.29, 0.1, s);
    expect_point(v, pts, BifKind::bogdanov_takens, "BT", "j", 10.05, -3.07, 0.1, s);
    expect_point(v, pts, BifKind::bautin, "GH", "j", 12.48, -2.58, 0.1, s);
    time_limit(v, t0, 300);
    return v;
}

Verdict criterion2()
{
    Verdict v;
    const auto t0 = Clock::now();
    ModelParams p = preset("jr-default");
    set_param(p, "j", 14.0);
    const PlaneAnalysis a = analyze_plane(p, "G", 2.0, 25.0, 200);
    expect_point(v, a.points, BifKind::cusp, "C", "G", 20.51, 7.29, 0.3);
    expect_point(v, a.points, BifKind::bogdanov_takens, "BT", "G", 3.06, -4.53, 0.15);
    expect_point(v, a.points, BifKind::bautin, "GH", "G", 5.07, -1.34, 0.15);
    time_limit(v, t0, 300);
    return v;
}

Verdict criterion3()
{
    Verdict v;
    const auto t0 = Clock::now();
    const PlaneAnalysis a = analyze_plane(preset("jr-default"), "alpha2", 0.2, 0.6, 200);
    expect_point(v, a.points, BifKind::degenerate_bt, "DBT", "alpha2", 0.365, 3.236, 0.05);
    time_limit(v, t0, 300);
    return v;
}

Verdict criterion4()
{
    Verdict v;
    const auto t0 = Clock::now();
    const ModelParams wc = preset("wc-default");
    const PlaneAnalysis a = analyze_plane(wc, "j", 4.0, 14.0, 200);
    expect_point(v, a.points, BifKind::degenerate_bt, "DBT", "j", 6.13, 4.03, 0.15);
    expect_point(v, a.points, BifKind::bautin, "GH", "j", 10.59, 7.59, 0.2);
    const FlcCurve flc = trace_flc_curve(wc, default_flc_options(ModelKind::wendling_chauvel));
    std::vector<BifurcationPoint> clc;
    for (const auto& p : flc.points)
        if (p.label == "CLC")
            clc.push_back(p);
    if (clc.empty())
        v.check(false, "CLC", "not detected");
    else
        expect_point(v, clc, clc.front().kind, "CLC", "j", 11.71, 12.15, 0.3);
    time_limit(v, t0, 1200);
    return v;
}

Verdict criterion5()
{
    Verdict v;
    const auto t0 = Clock::now();
    struct Zone {
        double j;
        int sn, sub, super;
    };
    for (const Zone z : {Zone{12.285, 2, 1, 2}, Zone{4.0, 0, 0, 0}, Zone{8.0, 2, 0, 0}, Zone{11.0, 2, 1, 0},
                         Zone{14.0, 2, 0, 1}}) {
        ModelParams p = preset("jr-default");
        set_param(p, "j", z.j);
        std::map<BifKind, int> n;
        for (const auto& pt : codim1_report(p, default_sweep(ModelKind::jansen_rit)).points)
            ++n[pt.kind];
        const int total = static_cast<int>(std::accumulate(n.begin(), n.end(), 0,
                                                           [](int s, const auto& kv) { return s + kv.second; }));
        const bool ok = n[BifKind::saddle_node] == z.sn && n[BifKind::hopf_subcritical] == z.sub &&
                        n[BifKind::hopf_supercritical] == z.super && total == z.sn + z.sub + z.super;
        std::ostringstream s;
        s << n[BifKind::saddle_node] << " SN, " << n[BifKind::hopf_subcritical] << " sub, "
          << n[BifKind::hopf_supercritical] << " super, " << total << " total";
        v.check(ok, fmt("j=%g", z.j), s.str());
    }
    time_limit(v, t0, 120);
    return v;
}

Verdict criterion6()
{
    Verdict v;
    const auto t0 = Clock::now();
    const CycleSet set = cycle_set(preset("jr-default"));
    double alpha_lo = 1e9, alpha_hi = 0.0;
    double epi_fmin = 1e9, epi_fmax = 0.0, epi_tmax = 0.0;
    bool have_alpha = false, have_epi = false;
    for (const auto& br : set.branches) {
        double tmax = 0.0;
        for (const auto& c : br.cycles)
            tmax = std::max(tmax, c.period);
        if (tmax < 20.0) {
            have_alpha = true;
            for (const auto& c : br.cycles) {
                alpha_lo = std::min(alpha_lo, c.period);
                alpha_hi = std::max(alpha_hi, c.period);
            }
        } else {
            have_epi = true;
            for (const auto& c : br.cycles) {
                if (!c.stable)
                    continue;
                epi_fmin = std::min(epi_fmin, cycle_frequency_hz(c.period));
                epi_fmax = std::max(epi_fmax, cycle_frequency_hz(c.period));
                epi_tmax = std::max(epi_tmax, c.period);
            }
        }
    }
    v.check(have_alpha && alpha_lo >= 8.8 && alpha_hi <= 9.8, "alpha",
            fmt("periods [%.3f, %.3f] within [8.8, 9.8]", alpha_lo, alpha_hi));
    v.check(have_epi && epi_fmin <= 1.0 && epi_fmax >= 4.5, "epileptic",
            fmt("stable frequencies [%.2f, %.2f] Hz cover [1, 4.5]", epi_fmin, epi_fmax));
    v.check(epi_tmax > 100.0 && set.snic.size() == 1, "SNIC",
            fmt("period blow-up to %.1f, %zu SNIC", epi_tmax, set.snic.size()));
    time_limit(v, t0, 600);
    return v;
}

Verdict criterion7()
{
    Verdict v;
    const auto t0 = Clock::now();
    const auto* clc = flc_point("CLC");
    const auto* e = flc_point("E");
    if (clc)
        expect_point(v, {*clc}, clc->kind, "7.CLC", "j", 12.93, 3.75, 0.15);
    else
        v.check(false, "7.CLC", "not detected");
    if (e)
        expect_point(v, {*e}, e->kind, "7.E", "j", 12.38, 1.21, 0.15);
    else
        v.check(false, "7.E", "not detected");
    time_limit(v, t0, 1200);
    return v;
}

Verdict criterion8()
{
    Verdict v;
    const auto t0 = Clock::now();
    const auto& pts = jr_jP().points;
    const auto j_of = [&](BifKind k, double target) {
        double best = NAN;
        for (const auto& p : pts)
            if (p.kind == k && !(std::abs(p.coord("j") - target) >= std::abs(best - target)))
                best = p.coord("j");
        return best;
    };
    const auto turns = hopf_turning_points();
    const auto* e = flc_point("E");
    const auto* clc = flc_point("CLC");
    const std::vector<std::pair<std::string, double>> got{
        {"C", j_of(BifKind::cusp, 5.38)},
        {"BT", j_of(BifKind::bogdanov_takens, 10.05)},
        {"H2", turns.empty() ? NAN : turns.front()},
        {"E", e ? e->coord("j") : NAN},
        {"GH", j_of(BifKind::bautin, 12.48)},
        {"H1", turns.size() < 2 ? NAN : turns.back()},
        {"CLC", clc ? clc->coord("j") : NAN}};
    const double table[] = {5.38, 10.05, 12.10, 12.38, 12.48, 12.55, 12.93};
    std::ostringstream order;
    bool ordered = true;
    for (std::size_t i = 0; i < got.size(); ++i) {
        order << (i ? " < " : "") << got[i].first << " " << got[i].second;
        if (i && !(got[i - 1].second < got[i].second))
            ordered = false;
        v.check(std::abs(got[i].second - table[i]) <= 0.15, got[i].first,
                fmt("j = %.4f vs %.2f", got[i].second, table[i]));
    }
    v.check(ordered, "order", order.str());
    time_limit(v, t0, 1200);
    return v;
}

Verdict criterion9()
{
    Verdict v;
    const auto t0 = Clock::now();
    const ModelParams jr = preset("jr-default");
    const int xi = x_index(ModelKind::jansen_rit);

    int a_ok = 0;
    std::ostringstream a_detail;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto tr = simulate_sde(jr, NoiseSpec{1.8, 0.0, 0.5, seed}, 2000.0);
        const SpikeTrain sp = detect_spikes(tr);
        const auto ep = detect_oscillations(tr.times, tr.component(xi), sp);
        a_ok += (sp.size() >= 1 && !ep.empty()) ? 1 : 0;
        a_detail << " " << sp.size() << "/" << ep.size();
    }
    v.check(a_ok >= 8, "9a", std::to_string(a_ok) + "/10 seeds with spike and epoch (spikes/epochs:" +
                                 a_detail.str() + ")");

    int b_ok = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
        b_ok += seizure_scenario(12.7, NoiseSpec{1.5, 1e-3, 0.4, seed}, 4000.0).has_all_phases() ? 1 : 0;
    v.check(b_ok >= 8, "9b", std::to_string(b_ok) + "/10 seeds with normal, onset, seizure, post in order");

    ModelParams p = jr;
    set_param(p, "j", 12.7);
    std::vector<double> rates;
    std::ostringstream c_detail;
    for (double mu : {0.5, 1.0, 1.5, 1.8, 2.1}) {
        double total = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed)
            total += static_cast<double>(detect_spikes(simulate_sde(p, NoiseSpec{mu, 0.0, 0.4, seed}, 2000.0)).size());
        rates.push_back(total / 10.0 / 2000.0);
        c_detail << " " << total / 10.0;
    }
    bool mono = rates.back() > rates.front();
    for (std::size_t i = 1; i < rates.size(); ++i)
        mono = mono && rates[i] >= rates[i - 1];
    v.check(mono, "9c", "mean spikes per trajectory at mu = 0.5..2.1:" + c_detail.str());
    time_limit(v, t0, 600);
    return v;
}

Verdict criterion10(const std::string& unit)
{
    Verdict v;
    if (unit.empty()) {
        v.check(false, "runner", "no --unit binary given");
        return v;
    }
    for (const std::string suite : {"ModelProperty", "LinalgProperty", "EquilibriaProperty", "CyclesProperty"}) {
        const auto t0 = Clock::now();
        const std::string cmd = "\"" + unit + "\" --gtest_filter=" + suite + ".* 2>&1";
        std::string out;
        int rc = -1;
        if (FILE* pipe = ::popen(cmd.c_str(), "r")) {
            char buf[512];
            while (std::fgets(buf, sizeof buf, pipe))
                out += buf;
            rc = ::pclose(pipe);
        }
        const double s = seconds_since(t0);
        // An empty filter also exits 0: require at least one passed test.
        int passed = 0;
        const auto at = out.find("[  PASSED  ] ");
        if (at != std::string::npos)
            passed = std::atoi(out.c_str() + at + 13);
        v.check(rc == 0 && passed > 0 && s < 120.0, suite,
                fmt("exit %d, %d tests passed, %.1f s (limit 120 s)", rc, passed, s));
    }
    return v;
}

}  // namespace

int main(int argc, char** argv)
{
    std::string unit;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--unit" && i + 1 < argc)
            unit = argv[++i];
        else if (a == "--only" && i + 1 < argc)
            only.insert(std::atoi(argv[++i]));
        else {
            std::fprintf(stderr, "usage: %s [--unit PATH] [--only N]...\n", argv[0]);
            return 2;
        }
    }

    const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
        {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, [&] { return criterion10(unit); }}};

    int unexpected = 0;
    const auto start = Clock::now();
    for (const auto& [id, fn] : criteria) {
        if (!only.empty() && !only.count(id))
            continue;
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v.check(false, "exception", e.what());
        }
        bool all_known = true;
        for (const auto& f : v.failed)
            all_known = all_known && known_failures.count(f);
        const bool pass = v.failed.empty();
        std::printf("CRITERION %d %s%s (%.1f s)\n", id, pass ? "PASS" : "FAIL",
                    !pass && all_known ? " [known failure]" : "", seconds_since(t0));
        for (const auto& n : v.notes)
            std::printf("%s\n", n.c_str());
        std::fflush(stdout);
        if (!pass && !all_known)
            ++unexpected;
    }
    std::printf("total %.1f s, %d unexpected failure(s)\n", seconds_since(start), unexpected);
    return unexpected == 0 ? 0 : 1;
}
