#pragma once

// Limit cycles: shooting on a section, Floquet multipliers, one-parameter
// families in the primary input, their folds and SNIC ends, and EEG bands.

#include <optional>
#include <string>
#include <vector>

#include "neurobif/equilibria.hpp"
#include "neurobif/ode.hpp"

namespace neurobif {

enum class Band { sub_delta, delta, theta, alpha, beta, gamma };
std::string_view to_string(Band band);

// Physical frequency a / T in Hz.
double cycle_frequency_hz(double period, double a = 100.0);
// delta [0.5, 4), theta [4, 8), alpha [8, 13), beta [13, 30], gamma above,
// sub_delta below 0.5.
Band classify_band(double period, double a = 100.0);

struct LimitCycle {
    double P = 0.0;
    Vec anchor;            // point of the orbit used by the shooting
    double period = 0.0;   // dimensionless
    CVec multipliers;      // sorted by descending modulus
    double x_min = 0.0;
    double x_max = 0.0;
    bool stable = false;
    double trivial_error = 0.0;      // |mu_trivial - 1|
    double max_nontrivial = 0.0;     // largest nontrivial |mu|
    Band band = Band::alpha;

    double amplitude() const { return x_max - x_min; }
};

struct ShootingOptions {
    double tol = 1e-10;          // integrator tolerance
    double newton_tol = 1e-8;    // residual of the periodicity condition
    int max_newton = 25;
    double a = 100.0;            // physical rate for band labels
};

// Periodic orbit through a point near `guess` at the model's current input.
// The section is X = level with increasing X; without a level the middle of
// the X range seen over a probe integration is used.
struct FindCycleOptions {
    ShootingOptions shooting;
    double transient = 0.0;
    double probe_time = 200.0;
    std::optional<double> level;
};

LimitCycle find_cycle(const ModelParams& params, const Vec& guess, const FindCycleOptions& opt = {});

// Newton on (x0, T) from a close initial guess, section x_X = x0_X.
LimitCycle refine_cycle(const ModelParams& params, const Vec& x0, double period, const ShootingOptions& opt = {});

// Monodromy matrix and end point of the flow over [0, T].
struct FlowDerivatives {
    Vec end;
    Mat monodromy;
    Vec d_param;   // d phi / d(primary parameter)
};
FlowDerivatives flow_derivatives(const ModelParams& params, const Vec& x0, double T, double tol);
// Column-wise central differences of the flow; slow, kept as a cross-check.
Mat monodromy_fd(const ModelParams& params, const Vec& x0, double T, double tol, double h = 1e-6);

enum class CycleEventKind { fold_of_cycles, snic_candidate, hopf_endpoint, period_blowup, range_end, failure, max_points };
std::string_view to_string(CycleEventKind kind);

struct CycleEvent {
    CycleEventKind kind;
    std::size_t index;   // branch point at or just before the event
    double P;
    std::string detail;
};

struct CycleBranch {
    std::vector<LimitCycle> cycles;
    std::vector<double> arclength;
    std::vector<double> tangent_p;     // dP/ds at each point
    std::vector<CycleEvent> events;
    std::vector<LimitCycle> folds;     // refined turning points, same order as the fold events

    bool has_event(CycleEventKind kind) const;
};

struct ContinuationOptions {
    ShootingOptions shooting;
    double P_min = -20.0;
    double P_max = 40.0;
    double ds = 0.05;
    double ds_min = 1e-5;
    double ds_max = 0.4;
    int max_points = 600;
    double period_max = 400.0;
    double amplitude_min = 2e-3;   // Hopf end when the X amplitude falls below this
    double period_weight = 5.0;    // weight of the relative period change in the step norm
};

// Pseudo-arclength continuation in (x0, T, P) from a known cycle; direction
// +1 starts towards increasing P.
CycleBranch continue_cycles(const ModelParams& params, const LimitCycle& seed, int direction,
                            const ContinuationOptions& opt = {});
// Same, starting at a Hopf point of the equilibrium manifold (X, omega).
CycleBranch continue_from_hopf(const ModelParams& params, double X_hopf, double omega,
                               const ContinuationOptions& opt = {});

std::vector<BifurcationPoint> detect_fold_of_cycles(const CycleBranch& branch);

struct SnicOptions {
    double period_threshold = 100.0;
    int monotone_steps = 5;
    double p_tol = 1e-3;
};
std::vector<BifurcationPoint> detect_snic(const CycleBranch& branch, const std::vector<double>& sn_P,
                                          const SnicOptions& opt = {});

// Cycle families from every Hopf point of the equilibrium manifold at the
// model's current parameters, with their folds merged (duplicates reached
// from both ends of one family are dropped).
struct CycleSet {
    std::vector<CycleBranch> branches;
    std::vector<LimitCycle> folds;   // sorted by P
    std::vector<double> sn_P;
    std::vector<BifurcationPoint> snic;
    std::vector<std::string> warnings;
};
CycleSet cycle_set(const ModelParams& params, const ContinuationOptions& opt = {});

struct FlcSample {
    double theta;
    double P;
    double period;
};

struct FlcOptions {
    std::string theta_name = "j";
    double theta_lo = 12.0;
    double theta_hi = 13.1;
    int n_theta = 23;
    double theta_tol = 1e-3;   // bisection width on fold births and deaths
    ContinuationOptions continuation;
};

// Folds of cycles in the (theta, P) plane. Special points: CLC (pair of
// folds merging as theta increases), E (pair born as theta increases, a
// turning point of theta along the curve) and S (fold meeting the
// saddle-node manifold).
struct FlcCurve {
    std::string theta_name;
    std::vector<FlcSample> samples;   // by theta, then P
    std::vector<BifurcationPoint> points;
    std::vector<std::string> warnings;
};
FlcCurve trace_flc_curve(const ModelParams& base, const FlcOptions& opt = {});
FlcOptions default_flc_options(ModelKind kind);

}  // namespace neurobif
