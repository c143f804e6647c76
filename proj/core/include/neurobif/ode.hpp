#pragma once

// Adaptive Dormand-Prince 5(4) integration with dense output and
// section-crossing location.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "neurobif/model.hpp"

namespace neurobif {

using State = std::vector<double>;
using Rhs = std::function<void(const State& x, State& dxdt, double t)>;

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    long steps = 0;
    long rejected = 0;
    double tol = 0.0;
};

struct IntegrateOptions {
    double tol = 1e-8;          // absolute and relative
    double dt0 = 1e-2;
    double max_dt = 0.5;
    double record_dt = 0.0;     // 0: every accepted step; > 0: dense samples on this grid
    long max_steps = 20'000'000;
    double blowup = 1e6;        // |component| above this aborts
};

// Step-wise driver around odeint's controlled dopri5 stepper.
class Dopri5 {
public:
    Dopri5(Rhs rhs, State x0, double t0, const IntegrateOptions& opt);
    ~Dopri5();
    Dopri5(const Dopri5&) = delete;
    Dopri5& operator=(const Dopri5&) = delete;

    // One accepted step, never beyond t_end. Returns false once t() == t_end.
    bool step(double t_end);
    double t() const { return t_; }
    double t_prev() const { return t_prev_; }
    const State& x() const { return x_; }
    const State& x_prev() const { return x_prev_; }
    // Interpolated state for t in [t_prev(), t()].
    State dense(double t) const;

    long steps() const { return steps_; }
    long rejected() const { return rejected_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    Rhs rhs_;
    State x_, x_prev_, dxdt_, dxdt_prev_;
    double t_, t_prev_, dt_;
    IntegrateOptions opt_;
    long steps_ = 0, rejected_ = 0;
};

Rhs model_rhs(const ModelParams& params);

Trajectory integrate(const ModelParams& params, const Vec& x0, double t0, double t1, const IntegrateOptions& opt = {});
Trajectory integrate(const Rhs& rhs, const Vec& x0, double t0, double t1, const IntegrateOptions& opt = {});

// Crossing of the hyperplane x[index] = level in the given direction (+1 up,
// -1 down). Located on the dense output to |dt| <= 1e-13 (relative).
struct Crossing {
    double t;
    Vec x;
};

class SectionWatcher {
public:
    SectionWatcher(int index, double level, int direction) : index_(index), level_(level), dir_(direction) {}
    // Checks the last step of `s`; returns the crossing if one occurred.
    std::optional<Crossing> check(const Dopri5& s) const;

private:
    int index_;
    double level_;
    int dir_;
};

}  // namespace neurobif
