#include <gtest/gtest.h>

#include <cmath>

#include "neurobif/cycles.hpp"
#include "neurobif/errors.hpp"

using namespace neurobif;

namespace {

const CycleSet& jr_default_cycles()
{
    static const CycleSet set = cycle_set(preset("jr-default"));
    return set;
}

}  // namespace

TEST(Cycles, BandClassification)
{
    EXPECT_DOUBLE_EQ(cycle_frequency_hz(10.0), 10.0);
    EXPECT_EQ(classify_band(100.0 / 0.4), Band::sub_delta);
    EXPECT_EQ(classify_band(100.0 / 0.5), Band::delta);
    EXPECT_EQ(classify_band(100.0 / 3.9), Band::delta);
    EXPECT_EQ(classify_band(100.0 / 4.0), Band::theta);
    EXPECT_EQ(classify_band(100.0 / 7.5), Band::theta);   // 7-8 Hz gap -> theta
    EXPECT_EQ(classify_band(100.0 / 8.0), Band::alpha);
    EXPECT_EQ(classify_band(100.0 / 12.9), Band::alpha);
    EXPECT_EQ(classify_band(100.0 / 13.0), Band::beta);
    EXPECT_EQ(classify_band(100.0 / 30.0), Band::beta);
    EXPECT_EQ(classify_band(100.0 / 31.0), Band::gamma);
    EXPECT_THROW(classify_band(-1.0), DomainError);
}

// Property: the trivial multiplier of every continued cycle is 1.
TEST(CyclesProperty, TrivialMultiplierOnEveryCycle)
{
    const auto& set = jr_default_cycles();
    ASSERT_FALSE(set.branches.empty());
    std::size_t n = 0;
    for (const auto& br : set.branches) {
        for (const auto& c : br.cycles) {
            EXPECT_LT(c.trivial_error, 1e-3) << "P=" << c.P << " T=" << c.period;
            EXPECT_EQ(c.stable, c.max_nontrivial < 1.0);
            ++n;
        }
    }
    EXPECT_GT(n, 50u);
}

TEST(Cycles, AlphaFamilyPeriodsAndEpilepticBlowup)
{
    const auto& set = jr_default_cycles();
    bool alpha_family = false, epileptic = false;
    for (const auto& br : set.branches) {
        bool all_alpha = !br.cycles.empty();
        double tmax = 0.0, fmax = 0.0;
        for (const auto& c : br.cycles) {
            if (c.amplitude() < 0.05)
                continue;
            all_alpha = all_alpha && c.period >= 8.8 && c.period <= 9.8;
            tmax = std::max(tmax, c.period);
            fmax = std::max(fmax, cycle_frequency_hz(c.period));
        }
        alpha_family = alpha_family || all_alpha;
        epileptic = epileptic || tmax > 100.0;
    }
    EXPECT_TRUE(alpha_family);
    EXPECT_TRUE(epileptic);
    ASSERT_EQ(set.snic.size(), 1u);
    ASSERT_EQ(set.sn_P.size(), 2u);
    EXPECT_NEAR(set.snic.front().coord("P"), set.sn_P.front(), 2e-3);
    ASSERT_EQ(set.folds.size(), 1u);
    EXPECT_NEAR(set.folds.front().P, 2.50, 0.01);
}

TEST(Cycles, MonodromyMatchesFiniteDifferences)
{
    const auto& set = jr_default_cycles();
    const LimitCycle* c = nullptr;
    for (const auto& br : set.branches)
        for (const auto& x : br.cycles)
            if (!c && x.stable && x.period < 10 && x.amplitude() > 1.0)
                c = &x;
    ASSERT_TRUE(c);
    const ModelParams p = with_primary(preset("jr-default"), c->P);
    const FlowDerivatives d = flow_derivatives(p, c->anchor, c->period, 1e-11);
    const Mat fd = monodromy_fd(p, c->anchor, c->period, 1e-11);
    EXPECT_LT((d.monodromy - fd).cwiseAbs().maxCoeff(), 1e-4 * std::max(1.0, fd.cwiseAbs().maxCoeff()));
    EXPECT_LT((d.end - c->anchor).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Cycles, RefineRecoversPerturbedCycle)
{
    const auto& set = jr_default_cycles();
    const LimitCycle* seed = nullptr;
    for (const auto& br : set.branches)
        for (const auto& x : br.cycles)
            if (x.stable && x.period > 20 && x.period < 60 && (!seed || std::abs(x.P - 2.3) < std::abs(seed->P - 2.3)))
                seed = &x;
    ASSERT_TRUE(seed);
    const ModelParams p = with_primary(preset("jr-default"), seed->P);
    Vec x0 = seed->anchor;
    x0.array() += 1e-3;
    x0(x_index(ModelKind::jansen_rit)) = seed->anchor(x_index(ModelKind::jansen_rit));
    const LimitCycle c = refine_cycle(p, x0, 1.01 * seed->period);
    EXPECT_NEAR(c.period, seed->period, 1e-6 * seed->period);
    EXPECT_TRUE(c.stable);
    EXPECT_LT(c.trivial_error, 1e-3);
    EXPECT_GT(c.amplitude(), 4.0);
}

TEST(Cycles, FindCycleConvergesFromNearbyState)
{
    const ModelParams p = with_primary(preset("jr-default"), 3.0);
    const LimitCycle c = find_cycle(p, equilibrium_from_X(p, 4.3).state.values, {});
    EXPECT_NEAR(c.period, 9.34, 0.05);
    EXPECT_EQ(c.band, Band::alpha);
    EXPECT_TRUE(c.stable);
}
