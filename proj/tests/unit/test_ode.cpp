#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "neurobif/errors.hpp"
#include "neurobif/ode.hpp"

using namespace neurobif;

namespace {

const Rhs oscillator = [](const State& x, State& dx, double) {
    dx[0] = x[1];
    dx[1] = -x[0];
};

}  // namespace

TEST(Ode, HarmonicOscillatorPeriod)
{
    Vec x0(2);
    x0 << 1.0, 0.0;
    IntegrateOptions o;
    o.tol = 1e-11;
    const Trajectory tr = integrate(oscillator, x0, 0.0, 2 * std::numbers::pi, o);
    EXPECT_NEAR(tr.states.back()(0), 1.0, 1e-8);
    EXPECT_NEAR(tr.states.back()(1), 0.0, 1e-8);
    EXPECT_DOUBLE_EQ(tr.times.back(), 2 * std::numbers::pi);
    EXPECT_GT(tr.steps, 0);
}

TEST(Ode, DenseSamplesOnRequestedGrid)
{
    Vec x0(2);
    x0 << 0.0, 1.0;
    IntegrateOptions o;
    o.tol = 1e-10;
    o.record_dt = 0.1;
    const Trajectory tr = integrate(oscillator, x0, 0.0, 5.0, o);
    ASSERT_EQ(tr.times.size(), 51u);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        EXPECT_NEAR(tr.times[i], 0.1 * static_cast<double>(i), 1e-12);
        EXPECT_NEAR(tr.states[i](0), std::sin(tr.times[i]), 1e-7);
    }
}

TEST(Ode, SectionCrossingLocated)
{
    Dopri5 s(oscillator, {1.0, 0.0}, 0.0, IntegrateOptions{});
    const SectionWatcher down(0, 0.0, -1);
    std::optional<Crossing> hit;
    while (!hit && s.step(10.0))
        hit = down.check(s);
    ASSERT_TRUE(hit);
    EXPECT_NEAR(hit->t, std::numbers::pi / 2, 1e-7);
    EXPECT_NEAR(hit->x(0), 0.0, 1e-9);
}

TEST(Ode, BlowupRaisesIntegrationError)
{
    const Rhs quad = [](const State& x, State& dx, double) { dx[0] = x[0] * x[0]; };
    Vec x0(1);
    x0 << 1.0;
    try {
        integrate(quad, x0, 0.0, 2.0);
        FAIL() << "expected IntegrationError";
    } catch (const IntegrationError& e) {
        EXPECT_LT(e.time(), 1.0);
        EXPECT_GT(e.time(), 0.99);
    }
}

TEST(Ode, ModelRhsMatchesField)
{
    const ModelParams p = preset("jr-default");
    const Rhs f = model_rhs(p);
    State x{0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, dx(6);
    f(x, dx, 0.0);
    const Vec ref = field(p, Eigen::Map<const Vec>(x.data(), 6));
    for (int i = 0; i < 6; ++i)
        EXPECT_DOUBLE_EQ(dx[static_cast<std::size_t>(i)], ref(i));
}
