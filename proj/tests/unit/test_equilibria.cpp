#include <gtest/gtest.h>

#include <map>

#include "neurobif/equilibria.hpp"

using namespace neurobif;

namespace {

std::map<BifKind, int> census(ModelParams p, double j)
{
    set_param(p, "j", j);
    const Codim1Report rep = codim1_report(p, default_sweep(kind_of(p)));
    std::map<BifKind, int> n;
    for (const auto& pt : rep.points)
        ++n[pt.kind];
    return n;
}

// x' = mu x - w y + s x r^2, y' = w x + mu y + s y r^2 (+ a decoupled
// stable direction when n = 3). With <q, q> = 1 the complex coordinate z of
// x = z q + conj(z q) has |x|^2 = 2 |z|^2, so c1 = 2 s and l1 = 2 s / w.
std::function<Vec(const Vec&)> hopf_normal_form(double s, double w, int n)
{
    return [=](const Vec& x) {
        Vec r(n);
        const double r2 = x(0) * x(0) + x(1) * x(1);
        r(0) = -w * x(1) + s * x(0) * r2;
        r(1) = w * x(0) + s * x(1) * r2;
        if (n == 3)
            r(2) = -2.0 * x(2) + x(0) * x(0);
        return r;
    };
}

}  // namespace

TEST(Equilibria, JansenRitCensusMatchesZones)
{
    const ModelParams jr = preset("jr-default");
    using K = BifKind;
    auto n = census(jr, 12.285);
    EXPECT_EQ(n[K::saddle_node], 2);
    EXPECT_EQ(n[K::hopf_subcritical], 1);
    EXPECT_EQ(n[K::hopf_supercritical], 2);
    EXPECT_EQ(n[K::hopf_degenerate], 0);

    n = census(jr, 4.0);
    EXPECT_TRUE(n.empty());

    n = census(jr, 8.0);
    EXPECT_EQ(n[K::saddle_node], 2);
    EXPECT_EQ(n[K::hopf_subcritical] + n[K::hopf_supercritical] + n[K::hopf_degenerate], 0);

    n = census(jr, 11.0);
    EXPECT_EQ(n[K::saddle_node], 2);
    EXPECT_EQ(n[K::hopf_subcritical], 1);
    EXPECT_EQ(n[K::hopf_supercritical], 0);

    n = census(jr, 14.0);
    EXPECT_EQ(n[K::saddle_node], 2);
    EXPECT_EQ(n[K::hopf_subcritical], 0);
    EXPECT_EQ(n[K::hopf_supercritical], 1);
}

TEST(Equilibria, WendlingChauvelCensus)
{
    const ModelParams wc = preset("wc-default");
    auto n = census(wc, 12.285);
    EXPECT_EQ(n[BifKind::saddle_node], 2);
    EXPECT_EQ(n[BifKind::hopf_subcritical], 1);
    EXPECT_EQ(n[BifKind::hopf_supercritical], 1);
    // Second subcritical Hopf at j = 8 sits on a branch leaving a second BT
    // point, 0.003 from the upper fold (see README).
    n = census(wc, 8.0);
    EXPECT_EQ(n[BifKind::saddle_node], 2);
    EXPECT_EQ(n[BifKind::hopf_subcritical], 2);
}

TEST(Equilibria, SaddleNodesAreNondegenerate)
{
    const Codim1Report rep = codim1_report(preset("jr-default"), default_sweep(ModelKind::jansen_rit));
    int sn = 0;
    for (const auto& p : rep.points) {
        if (p.kind != BifKind::saddle_node)
            continue;
        ++sn;
        EXPECT_GT(std::abs(p.diagnostics.at("sn2")), 1e-6);
        EXPECT_GT(std::abs(p.diagnostics.at("sn3")), 1e-4);
        EXPECT_LT(std::abs(p.diagnostics.at("lambda0")), 1e-8);
        EXPECT_LT(std::abs(sn_test(preset("jr-default"), p.coord("X"))), 1e-8);
    }
    EXPECT_EQ(sn, 2);
    for (std::size_t i = 1; i < rep.points.size(); ++i)
        EXPECT_LE(rep.points[i - 1].coord("P"), rep.points[i].coord("P"));
}

TEST(Equilibria, HopfPointsHaveImaginaryPair)
{
    const ModelParams p = preset("jr-default");
    const Codim1Report rep = codim1_report(p, default_sweep(ModelKind::jansen_rit));
    for (const auto& pt : rep.points) {
        if (!is_hopf(pt.kind))
            continue;
        const double X = pt.coord("X");
        const Spectrum s = eigen(jacobian_at_X(p, X));
        const double w = pt.diagnostics.at("omega");
        EXPECT_GT(w, 0.0);
        bool found = false;
        for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k)
            found = found || (std::abs(s.eigenvalues(k) - Complex(0.0, w)) < 1e-6);
        EXPECT_TRUE(found);
        EXPECT_EQ(pt.kind == BifKind::hopf_subcritical, pt.diagnostics.at("l1") > 0);
    }
}

// Property: l1 sign (and value) on the textbook Hopf normal forms.
TEST(EquilibriaProperty, FirstLyapunovSignOracle)
{
    for (int n : {2, 3}) {
        for (double s : {-1.0, 1.0}) {
            for (double w : {1.0, 2.5}) {
                const auto f = hopf_normal_form(s, w, n);
                const Vec x0 = Vec::Zero(n);
                Mat A = Mat::Zero(n, n);
                A(0, 1) = -w;
                A(1, 0) = w;
                if (n == 3)
                    A(2, 2) = -2.0;
                const HopfData h = first_lyapunov(f, x0, A, w);
                EXPECT_EQ(h.l1 > 0, s > 0) << "n=" << n << " s=" << s;
                EXPECT_NEAR(h.l1, 2.0 * s / w, 1e-6) << "n=" << n << " w=" << w;
            }
        }
    }
}

TEST(Equilibria, BranchStabilityFarFromFolds)
{
    const EquilibriumBranch br = sweep_branch(preset("jr-default"), default_sweep(ModelKind::jansen_rit));
    ASSERT_FALSE(br.samples.empty());
    // Very negative input: the single equilibrium is stable.
    const auto& lo = br.samples.front();
    EXPECT_LT(lo.P, -5.0);
    EXPECT_TRUE(lo.stable);
    EXPECT_EQ(lo.n_unstable, 0);
    for (const auto& s : br.samples)
        EXPECT_EQ(s.stable, s.n_unstable == 0 && s.eigenvalues(0).real() < 0) << "X=" << s.X;
}

TEST(Equilibria, GenuineHopfFrequencyRejectsNeutralSaddle)
{
    Mat J = Mat::Zero(3, 3);
    J(0, 0) = 1.0;
    J(1, 1) = -1.0;
    J(2, 2) = -3.0;
    EXPECT_EQ(genuine_hopf_frequency(J), 0.0);
    Mat H = Mat::Zero(3, 3);
    H(0, 1) = -2.0;
    H(1, 0) = 2.0;
    H(2, 2) = -1.0;
    EXPECT_NEAR(genuine_hopf_frequency(H), 2.0, 1e-12);
}
