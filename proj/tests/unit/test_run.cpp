#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "json.hpp"

#include "neurobif/run.hpp"
#include "neurobif/serialize.hpp"

using namespace neurobif;

namespace fs = std::filesystem;

namespace {

RunConfig config(const std::string& json, const fs::path& out)
{
    ConfigInput in = config_from_json(json);
    in.out = out.string();
    return resolve(in);
}

fs::path fresh(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("neurobif_run_" + name);
    fs::remove_all(d);
    return d;
}

nlohmann::json manifest(const fs::path& d)
{
    return nlohmann::json::parse(read_file(d / "manifest.json"));
}

}  // namespace

TEST(Run, EquilibriaWritesArtifactsAndManifest)
{
    const fs::path d = fresh("eq");
    std::ostringstream log;
    const RunOutcome r = run(config(R"({"command":"equilibria","model":"jr","seed":5})", d), log);
    ASSERT_EQ(r.exit_code, exit_ok) << r.error;
    EXPECT_FALSE(r.partial);
    EXPECT_TRUE(fs::exists(d / "branch.csv"));
    EXPECT_TRUE(fs::exists(d / "bifpoints.json"));
    ASSERT_FALSE(r.files.empty());
    EXPECT_EQ(r.files.back(), "manifest.json");

    const auto pts = bifpoints_from_json(read_file(d / "bifpoints.json"));
    EXPECT_EQ(pts.size(), 5u);
    const auto m = manifest(d);
    EXPECT_EQ(m.at("command"), "equilibria");
    EXPECT_EQ(m.at("preset"), "jr-default");
    EXPECT_EQ(m.at("seed"), 5);
    EXPECT_EQ(m.at("partial"), false);
    EXPECT_EQ(m.at("exit_code"), 0);
    EXPECT_TRUE(m.at("versions").contains("neurobif"));
    EXPECT_TRUE(m.at("tolerances").contains("xtol"));
    EXPECT_DOUBLE_EQ(m.at("params").at("j").get<double>(), 12.285);
    EXPECT_EQ(canonical_json(read_file(d / "manifest.json")), read_file(d / "manifest.json"));
    fs::remove_all(d);
}

TEST(Run, Codim2WritesCurves)
{
    const fs::path d = fresh("c2");
    std::ostringstream log;
    const RunOutcome r = run(config(R"({"command":"codim2","model":"jr","range":"4:16:120"})", d), log);
    ASSERT_EQ(r.exit_code, exit_ok) << r.error;
    const CsvTable t = parse_csv(read_file(d / "curves.csv"));
    EXPECT_GT(t.rows.size(), 100u);
    bool cusp = false;
    for (const auto& p : bifpoints_from_json(read_file(d / "bifpoints.json")))
        cusp = cusp || p.kind == BifKind::cusp;
    EXPECT_TRUE(cusp);
    fs::remove_all(d);
}

TEST(Run, NumericalFailureIsPartial)
{
    const fs::path d = fresh("blowup");
    std::ostringstream log;
    const RunOutcome r = run(config(R"({"command":"sde","model":"jr","noise":{"mean":0,"std":1e9},"T":10})", d), log);
    EXPECT_EQ(r.exit_code, exit_numerical);
    EXPECT_TRUE(r.partial);
    EXPECT_FALSE(r.error.empty());
    const auto m = manifest(d);
    EXPECT_EQ(m.at("partial"), true);
    EXPECT_EQ(m.at("exit_code"), 2);
    fs::remove_all(d);
}

TEST(Run, MissingBandsInputIsConfigError)
{
    const fs::path d = fresh("bands_missing");
    std::ostringstream log;
    RunConfig cfg = config(R"({"command":"bands","model":"jr","input":"/nonexistent/cycles.csv"})", d);
    const RunOutcome r = run(cfg, log);
    EXPECT_EQ(r.exit_code, exit_config);
    fs::remove_all(d);
}

TEST(Run, BandsFromCyclesTable)
{
    const fs::path d = fresh("bands");
    fs::create_directories(d);
    CycleRow a;
    a.branch = 0;
    a.P = 2.3;
    a.period = 28.0;
    a.freq_hz = 100.0 / 28.0;
    a.band = Band::delta;
    CycleRow b = a;
    b.branch = 1;
    b.period = 9.3;
    b.freq_hz = 100.0 / 9.3;
    b.band = Band::alpha;
    write_file_atomic(d / "cycles_in.csv", to_csv(cycles_table({a, b})));
    std::ostringstream log;
    const std::string json =
        R"({"command":"bands","model":"jr","input":")" + (d / "cycles_in.csv").string() + R"("})";
    const RunOutcome r = run(config(json, d), log);
    ASSERT_EQ(r.exit_code, exit_ok) << r.error;
    EXPECT_TRUE(fs::exists(d / "bands.csv"));
    EXPECT_TRUE(fs::exists(d / "bands.json"));
    fs::remove_all(d);
}
