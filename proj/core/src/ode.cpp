#include "neurobif/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "neurobif/errors.hpp"

namespace neurobif {

namespace odeint = boost::numeric::odeint;

using Dp5 = odeint::runge_kutta_dopri5<State>;
using Controlled = odeint::controlled_runge_kutta<Dp5>;

struct Dopri5::Impl {
    Controlled stepper;
};

Dopri5::Dopri5(Rhs rhs, State x0, double t0, const IntegrateOptions& opt)
    : rhs_(std::move(rhs)), x_(std::move(x0)), t_(t0), t_prev_(t0), dt_(opt.dt0), opt_(opt)
{
    if (!(opt.tol >= 1e-13 && opt.tol <= 1e-3)) {
        throw DomainError("integrate: tol must lie in [1e-13, 1e-3]");
    }
    impl_ = std::make_unique<Impl>(Impl{Controlled(odeint::default_error_checker<double, odeint::range_algebra, odeint::default_operations>(
                                    opt.tol, opt.tol, 1.0, 1.0),
                                odeint::default_step_adjuster<double, double>(opt.max_dt))});
    dxdt_.resize(x_.size());
    rhs_(x_, dxdt_, t_);
    x_prev_ = x_;
    dxdt_prev_ = dxdt_;
}

Dopri5::~Dopri5() = default;

bool Dopri5::step(double t_end)
{
    if (t_ >= t_end) return false;
    State x = x_, dxdt = dxdt_;
    double t = t_;
    for (;;) {
        double dt = std::min(dt_, t_end - t_);
        const bool clipped = dt < dt_;
        const double dt_try = dt;
        const auto res = impl_->stepper.try_step(rhs_, x, dxdt, t, dt);
        if (res == odeint::success) {
            // a clipped final step must not shrink the carried step size
            dt_ = clipped ? std::max(dt, dt_) : dt;
            if (t_end - t < 1e-14 * std::max(1.0, std::abs(t_end))) t = t_end;
            break;
        }
        ++rejected_;
        dt_ = dt;
        if (dt < 1e-14 * std::max(1.0, std::abs(t_)) || dt_try == dt) {
            throw IntegrationError("integrate: step size underflow (stiff or singular problem)", t_);
        }
    }
    for (double v : x) {
        if (!std::isfinite(v) || std::abs(v) > opt_.blowup) {
            throw IntegrationError("integrate: solution diverged", t);
        }
    }
    x_prev_.swap(x_);
    dxdt_prev_.swap(dxdt_);
    x_ = std::move(x);
    dxdt_ = std::move(dxdt);
    t_prev_ = t_;
    t_ = t;
    if (++steps_ > opt_.max_steps) {
        throw IntegrationError("integrate: step budget exhausted", t_);
    }
    return true;
}

State Dopri5::dense(double t) const
{
    if (t <= t_prev_) return x_prev_;
    if (t >= t_) return x_;
    State out(x_.size());
    impl_->stepper.stepper().calc_state(t, out, x_prev_, dxdt_prev_, t_prev_, x_, dxdt_, t_);
    return out;
}

Rhs model_rhs(const ModelParams& params)
{
    const int n = dimension(params);
    return [params, n](const State& x, State& dxdt, double) {
        field(params, std::span<const double>(x.data(), static_cast<std::size_t>(n)),
              std::span<double>(dxdt.data(), static_cast<std::size_t>(n)));
    };
}

Trajectory integrate(const Rhs& rhs, const Vec& x0, double t0, double t1, const IntegrateOptions& opt)
{
    if (!(t1 >= t0)) {
        throw DomainError("integrate: t1 must not precede t0");
    }
    if (!x0.allFinite()) {
        throw DomainError("integrate: non-finite initial state");
    }
    Trajectory tr;
    tr.tol = opt.tol;
    Dopri5 s(rhs, State(x0.data(), x0.data() + x0.size()), t0, opt);
    auto push = [&](double t, const State& x) {
        tr.times.push_back(t);
        tr.states.emplace_back(Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size())));
    };
    push(t0, s.x());
    double next_record = t0 + opt.record_dt;
    while (s.step(t1)) {
        if (opt.record_dt > 0.0) {
            while (next_record <= s.t() + 1e-12 * std::abs(s.t())) {
                push(next_record, s.dense(next_record));
                next_record = t0 + static_cast<double>(tr.times.size()) * opt.record_dt;
            }
        } else {
            push(s.t(), s.x());
        }
    }
    if (opt.record_dt > 0.0 && tr.times.back() < t1) push(t1, s.x());
    tr.steps = s.steps();
    tr.rejected = s.rejected();
    return tr;
}

Trajectory integrate(const ModelParams& params, const Vec& x0, double t0, double t1, const IntegrateOptions& opt)
{
    if (x0.size() != dimension(params)) {
        throw ContractViolation("integrate: initial state has the wrong dimension");
    }
    return integrate(model_rhs(params), x0, t0, t1, opt);
}

std::optional<Crossing> SectionWatcher::check(const Dopri5& s) const
{
    const auto idx = static_cast<std::size_t>(index_);
    const double ga = s.x_prev()[idx] - level_;
    const double gb = s.x()[idx] - level_;
    const bool crosses = dir_ >= 0 ? (ga < 0.0 && gb >= 0.0) : (ga > 0.0 && gb <= 0.0);
    if (!crosses) return std::nullopt;
    double lo = s.t_prev(), hi = s.t();
    double glo = ga;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g = s.dense(mid)[idx] - level_;
        if (std::signbit(g) == std::signbit(glo) && g != 0.0) {
            lo = mid;
            glo = g;
        } else {
            hi = mid;
        }
    }
    const State x = s.dense(hi);
    return Crossing{hi, Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size()))};
}

}  // namespace neurobif
