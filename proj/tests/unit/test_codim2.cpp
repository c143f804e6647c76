#include <gtest/gtest.h>

#include <cmath>

#include "neurobif/codim2.hpp"

using namespace neurobif;

namespace {

const PlaneAnalysis& jr_jP()
{
    static const PlaneAnalysis plane = analyze_plane(preset("jr-default"), "j", 4.0, 16.0, 200);
    return plane;
}

const BifurcationPoint* find(const PlaneAnalysis& a, BifKind kind)
{
    for (const auto& p : a.points)
        if (p.kind == kind)
            return &p;
    return nullptr;
}

}  // namespace

// Regression constants on the field-consistent P scale (the table lists
// P - ln k0).
TEST(Codim2, JansenRitPlanePoints)
{
    const auto& a = jr_jP();
    const auto* c = find(a, BifKind::cusp);
    const auto* bt = find(a, BifKind::bogdanov_takens);
    const auto* gh = find(a, BifKind::bautin);
    ASSERT_TRUE(c && bt && gh);
    EXPECT_NEAR(c->coord("j"), 5.3794, 2e-3);
    EXPECT_NEAR(c->coord("P"), 3.0704, 2e-3);
    EXPECT_NEAR(bt->coord("j"), 10.0414, 2e-3);
    EXPECT_NEAR(bt->coord("P"), 0.2900, 2e-3);
    EXPECT_NEAR(gh->coord("j"), 12.4810, 2e-3);
    EXPECT_NEAR(gh->coord("P"), 0.7804, 2e-3);
    EXPECT_EQ(c->label, "C");
    EXPECT_EQ(bt->label, "BT");
    EXPECT_EQ(gh->label, "GH");
    EXPECT_EQ(find(a, BifKind::degenerate_bt), nullptr);

    // j-turning points of the Hopf curve (H2 < GH < H1).
    std::vector<double> turns;
    for (const auto& f : a.folds)
        if (f.kind == CurveKind::hopf)
            turns.push_back(f.theta);
    std::sort(turns.begin(), turns.end());
    ASSERT_GE(turns.size(), 2u);
    EXPECT_NEAR(turns.front(), 12.10, 0.05);
    EXPECT_NEAR(turns.back(), 12.55, 0.05);
}

// Property: every SN-curve sample is a fold of the manifold, every Hopf
// sample carries a genuine imaginary pair.
TEST(Codim2Property, CurveSamplesSolveTheirTestFunctions)
{
    const auto& a = jr_jP();
    ModelParams p = preset("jr-default");
    for (const auto& c : a.sn_curves) {
        for (std::size_t i = 0; i < c.samples.size(); i += 7) {
            const auto& s = c.samples[i];
            set_param(p, "j", s.theta);
            EXPECT_LT(std::abs(sn_test(p, s.X)), 1e-6) << "j=" << s.theta;
            EXPECT_NEAR(input_from_X(p, s.X), s.P, 1e-9);
        }
    }
    for (const auto& c : a.hopf_curves) {
        for (std::size_t i = 0; i < c.samples.size(); i += 7) {
            const auto& s = c.samples[i];
            set_param(p, "j", s.theta);
            EXPECT_GT(genuine_hopf_frequency(jacobian_at_X(p, s.X), 1e-5), 0.0) << "j=" << s.theta;
        }
    }
}

TEST(Codim2, CurvesAreMonotoneBetweenFolds)
{
    for (const auto* list : {&jr_jP().sn_curves, &jr_jP().hopf_curves}) {
        for (const auto& c : *list) {
            auto folds = c.fold_indices();
            folds.insert(folds.begin(), 0);
            folds.push_back(c.samples.size() - 1);
            for (std::size_t f = 0; f + 1 < folds.size(); ++f) {
                int dir = 0;
                for (std::size_t i = folds[f]; i < folds[f + 1]; ++i) {
                    const double d = c.samples[i + 1].theta - c.samples[i].theta;
                    if (d == 0.0)
                        continue;
                    const int s = d > 0 ? 1 : -1;
                    if (dir == 0)
                        dir = s;
                    EXPECT_EQ(s, dir);
                }
            }
        }
    }
}

TEST(Codim2, DbtCoincidenceIsSymmetricAndRadiusBound)
{
    BifurcationPoint cusp, bt;
    cusp.kind = BifKind::cusp;
    cusp.plane = {"alpha2", "P"};
    cusp.coords = {{"alpha2", 0.365}, {"P", 3.236}, {"X", 2.33}};
    bt = cusp;
    bt.kind = BifKind::bogdanov_takens;
    bt.coords = {{"alpha2", 0.389}, {"P", 3.076}, {"X", 2.52}};
    const auto d1 = detect_dbt(cusp, bt);
    const auto d2 = detect_dbt(bt, cusp);
    ASSERT_TRUE(d1 && d2);
    EXPECT_EQ(d1->kind, BifKind::degenerate_bt);
    EXPECT_DOUBLE_EQ(d1->coord("alpha2"), d2->coord("alpha2"));
    EXPECT_FALSE(detect_dbt(cusp, bt, 0.01));
    BifurcationPoint far = bt;
    far.coords = {{"alpha2", 2.0}, {"P", 3.0}, {"X", 2.5}};
    EXPECT_FALSE(detect_dbt(cusp, far));
}

TEST(Codim2, WendlingChauvelDbtAndBautin)
{
    const PlaneAnalysis a = analyze_plane(preset("wc-default"), "j", 4.0, 14.0, 200);
    const BifurcationPoint* dbt = find(a, BifKind::degenerate_bt);
    ASSERT_TRUE(dbt);
    EXPECT_NEAR(dbt->coord("j"), 6.13, 0.15);
    EXPECT_NEAR(dbt->coord("P"), 4.03, 0.15);
    bool gh = false;
    for (const auto& p : a.points)
        gh = gh || (p.kind == BifKind::bautin && std::abs(p.coord("j") - 10.59) < 0.2 && std::abs(p.coord("P") - 7.59) < 0.2);
    EXPECT_TRUE(gh);
}
