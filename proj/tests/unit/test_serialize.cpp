#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>

#include "neurobif/errors.hpp"
#include "neurobif/serialize.hpp"

using namespace neurobif;

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("neurobif_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

SdeTrajectory small_trajectory()
{
    SdeTrajectory tr;
    tr.model = ModelKind::jansen_rit;
    for (int i = 0; i < 5; ++i) {
        tr.times.push_back(0.01 * i);
        Vec x(6);
        x << 0.1 * i, 1.0 / 3.0, -2e-17, 1e300, std::sqrt(2.0) * i, -7.25;
        tr.states.push_back(x);
        tr.P_inst.push_back(1.5 + 0.1 / 7.0 * i);
    }
    return tr;
}

}  // namespace

TEST(Serialize, DoublesRoundTripExactly)
{
    for (double v : {0.0, -0.0, 1.0 / 3.0, 1e-308, 6.02214076e23, -std::numbers::pi, 5e-324})
        EXPECT_EQ(parse_double(format_double(v)), v);
    EXPECT_TRUE(std::isnan(parse_double("nan")));
    EXPECT_EQ(parse_double("inf"), std::numeric_limits<double>::infinity());
    EXPECT_THROW(parse_double("1.0x"), ConfigError);
}

TEST(Serialize, BifpointsRoundTrip)
{
    BifurcationPoint a;
    a.kind = BifKind::bautin;
    a.plane = {"j", "P"};
    a.coords = {{"j", 12.481}, {"P", 0.7804}, {"X", 3.1}};
    a.diagnostics = {{"l2", -0.25}, {"omega", std::numeric_limits<double>::quiet_NaN()}};
    a.label = "GH";
    a.warnings = {"near fold"};
    BifurcationPoint b;
    b.kind = BifKind::saddle_node;
    b.plane = {"P"};
    b.coords = {{"P", 2.0672}, {"X", 1.2}};
    const std::string text = bifpoints_to_json({a, b});
    const auto back = bifpoints_from_json(text);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].kind, BifKind::bautin);
    EXPECT_EQ(back[0].label, "GH");
    EXPECT_EQ(back[0].coords, a.coords);
    EXPECT_TRUE(std::isnan(back[0].diagnostics.at("omega")));
    EXPECT_EQ(back[0].warnings, a.warnings);
    EXPECT_EQ(bifpoints_to_json(back), text);
}

TEST(Serialize, TrajectoryAndSpikesRoundTrip)
{
    const SdeTrajectory tr = small_trajectory();
    const std::string csv = to_csv(traj_table(tr));
    const SdeTrajectory back = traj_from_table(parse_csv(csv));
    EXPECT_EQ(back.model, ModelKind::jansen_rit);
    ASSERT_EQ(back.size(), tr.size());
    EXPECT_EQ(back.states[3], tr.states[3]);
    EXPECT_EQ(back.P_inst, tr.P_inst);
    EXPECT_EQ(to_csv(traj_table(back)), csv);

    SpikeTrain s;
    s.times = {10.5, 40.25};
    s.amplitudes = {6.1, 7.0 / 3.0};
    s.pds = {false, true};
    const std::string scsv = to_csv(spikes_table(s));
    const SpikeTrain sb = spikes_from_table(parse_csv(scsv));
    EXPECT_EQ(sb.times, s.times);
    EXPECT_EQ(sb.amplitudes, s.amplitudes);
    EXPECT_EQ(sb.pds, s.pds);
    EXPECT_EQ(to_csv(spikes_table(sb)), scsv);
}

TEST(Serialize, CyclesAndPhasesRoundTrip)
{
    CycleRow r;
    r.branch = 1;
    r.P = 2.3;
    r.period = 28.7;
    r.freq_hz = 100.0 / 28.7;
    r.x_min = -1.0 / 3.0;
    r.x_max = 9.5;
    r.max_nontrivial = 0.42;
    r.stable = true;
    r.band = Band::delta;
    r.event = "snic_candidate";
    CycleRow q = r;
    q.branch = 0;
    q.event = "";
    q.band = Band::alpha;
    const std::string csv = to_csv(cycles_table({r, q}));
    const auto back = cycles_from_table(parse_csv(csv));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].branch, 1);
    EXPECT_EQ(back[0].band, Band::delta);
    EXPECT_EQ(back[0].event, "snic_candidate");
    EXPECT_EQ(back[0].x_min, r.x_min);
    EXPECT_EQ(to_csv(cycles_table(back)), csv);

    const std::vector<Phase> ph{{"normal", 0.0, 512.5}, {"onset", 512.5, 600.0}};
    const std::string js = phases_to_json(ph);
    const auto pb = phases_from_json(js);
    ASSERT_EQ(pb.size(), 2u);
    EXPECT_EQ(pb[1].name, "onset");
    EXPECT_EQ(pb[1].end, 600.0);
    EXPECT_EQ(phases_to_json(pb), js);
}

TEST(Serialize, CanonicalJsonIsIdempotent)
{
    const std::string messy = R"({ "b":1, "a" : [1,2.5,{"z":null}] })";
    const std::string c = canonical_json(messy);
    EXPECT_EQ(canonical_json(c), c);
    EXPECT_EQ(c.back(), '\n');
}

TEST(Serialize, CsvErrors)
{
    CsvTable t{{"a", "b"}, {{"1", "2"}}};
    EXPECT_EQ(t.column("b"), 1u);
    EXPECT_THROW(t.column("c"), ConfigError);
    t.rows.push_back({"x,y", "1"});
    EXPECT_ANY_THROW(to_csv(t));
    EXPECT_THROW(parse_csv("a,b\n1\n"), ConfigError);
    EXPECT_THROW(spikes_from_table(parse_csv("time,amplitude\n1,2\n")), ConfigError);
}

TEST(Serialize, AtomicWriteReplacesWholeFile)
{
    const fs::path d = scratch_dir("atomic");
    const fs::path f = d / "sub" / "out.txt";
    write_file_atomic(f, "first version, longer\n");
    write_file_atomic(f, "second\n");
    EXPECT_EQ(read_file(f), "second\n");
    std::size_t n = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(f.parent_path()))
        ++n;
    EXPECT_EQ(n, 1u);   // no temp file left behind
    EXPECT_ANY_THROW(read_file(d / "missing"));
    fs::remove_all(d);
}
