#include <gtest/gtest.h>

#include "neurobif/config.hpp"
#include "neurobif/errors.hpp"

using namespace neurobif;

namespace {

std::string error_of(const std::string& json)
{
    try {
        resolve(config_from_json(json));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, ModelSelectsDefaultPreset)
{
    RunConfig c = resolve(config_from_json(R"({"command":"equilibria","model":"jr"})"));
    EXPECT_EQ(c.preset, "jr-default");
    EXPECT_EQ(c.model(), ModelKind::jansen_rit);
    EXPECT_DOUBLE_EQ(get_param(c.params, "j"), 12.285);

    c = resolve(config_from_json(R"({"command":"equilibria","model":"wc"})"));
    EXPECT_EQ(c.preset, "wc-default");
    EXPECT_EQ(c.model(), ModelKind::wendling_chauvel);
}

TEST(Config, OverridesAndFlagsWinOverFile)
{
    ConfigInput file = config_from_json(
        R"({"command":"codim2","model":"jr","params":{"j":10},"range":"4:16:50","seed":7})");
    ConfigInput flags;
    flags.set.push_back(parse_assignment("j=14", "--set"));
    flags.range = parse_range("5:6");
    const RunConfig c = resolve(merge(file, flags));
    EXPECT_DOUBLE_EQ(get_param(c.params, "j"), 14.0);
    ASSERT_TRUE(c.range);
    EXPECT_DOUBLE_EQ(c.range->lo, 5.0);
    EXPECT_DOUBLE_EQ(c.range->hi, 6.0);
    EXPECT_EQ(c.range->n, 0);
    EXPECT_EQ(c.seed, 7u);
}

TEST(Config, RangeParsing)
{
    const RangeSpec r = parse_range("-1.5:2:30");
    EXPECT_DOUBLE_EQ(r.lo, -1.5);
    EXPECT_DOUBLE_EQ(r.hi, 2.0);
    EXPECT_EQ(r.n, 30);
    EXPECT_THROW(parse_range("1"), ConfigError);
    EXPECT_THROW(parse_range("a:b"), ConfigError);
    const ConfigInput in = config_from_json(R"({"range":{"lo":1,"hi":3,"n":5}})");
    ASSERT_TRUE(in.range);
    EXPECT_EQ(in.range->n, 5);
}

TEST(Config, NoiseFlag)
{
    ConfigInput in;
    in.command = "sde";
    in.model = "jr";
    apply_noise_flag(in, "mean=1.2,std=0.3");
    const RunConfig c = resolve(in);
    EXPECT_DOUBLE_EQ(c.noise.mu0, 1.2);
    EXPECT_DOUBLE_EQ(c.noise.sigma, 0.3);
    EXPECT_THROW(apply_noise_flag(in, "mean"), ConfigError);
}

TEST(Config, ErrorsCarryKeyPaths)
{
    EXPECT_NE(error_of(R"({"command":"equilibria","model":"jr","params":{"jj":1}})").find("params.jj"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"command":"codim2","model":"jr","range":"5:4"})").find("range"), std::string::npos);
    EXPECT_NE(error_of(R"({"command":"sde","model":"jr","noise":{"x":1}})").find("noise.x"), std::string::npos);
    EXPECT_NE(error_of(R"({"command":"sde","model":"jr","tolerances":{"foo":1}})").find("tolerances.foo"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"command":"sde","model":"jr","seed":"abc"})").find("seed"), std::string::npos);
    EXPECT_NE(error_of(R"({"command":"sde","model":"jr","tolerances":{"dt":0.01}})").find("dt"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"command":"equilibria","model":"jr","bogus":1})").find("bogus"), std::string::npos);
    EXPECT_FALSE(error_of(R"({"command":"equilibria","model":"nope"})").empty());
    EXPECT_FALSE(error_of(R"({"command":"frobnicate","model":"jr"})").empty());
    EXPECT_FALSE(error_of(R"({"command":"equilibria","model":"jr","params":{"d":-1}})").empty());
    EXPECT_THROW(config_from_json("{not json"), ConfigError);
}

TEST(Config, ToleranceDefaultsAreComplete)
{
    const RunConfig c = resolve(config_from_json(R"({"command":"equilibria","model":"jr","tolerances":{"xtol":1e-10}})"));
    EXPECT_EQ(c.tolerances.size(), default_tolerances().size());
    EXPECT_DOUBLE_EQ(c.tolerances.at("xtol"), 1e-10);
}
