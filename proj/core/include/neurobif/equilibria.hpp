#pragma once

// Codimension-one analysis along the X-parametrized equilibrium manifold.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "neurobif/linalg.hpp"
#include "neurobif/model.hpp"

namespace neurobif {

enum class BifKind {
    saddle_node,
    hopf_subcritical,
    hopf_supercritical,
    hopf_degenerate,
    cusp,
    bogdanov_takens,
    bautin,
    degenerate_bt,
    fold_of_cycles,
    cusp_of_cycles,
    snic_candidate,
};

std::string_view to_string(BifKind kind);
BifKind bif_kind_from_string(std::string_view name);
bool is_hopf(BifKind kind);

struct BifurcationPoint {
    BifKind kind = BifKind::saddle_node;
    std::vector<std::string> plane;                       // parameter names
    std::vector<std::pair<std::string, double>> coords;   // plane values, then X when defined
    std::map<std::string, double> diagnostics;
    std::vector<std::string> warnings;
    std::string label;   // short name in figures (C, BT, GH, CLC, ...); may be empty

    double coord(std::string_view name) const;
    bool has_coord(std::string_view name) const;
};

struct BranchSample {
    double X = 0.0;
    double P = 0.0;
    Vec state;
    CVec eigenvalues;
    int n_unstable = 0;
    bool stable = false;
    bool failed = false;  // eigensolver failure at this sample
};

struct EquilibriumBranch {
    ModelKind model = ModelKind::jansen_rit;
    ModelParams params;
    std::vector<BranchSample> samples;
};

struct SweepRange {
    double lo = -12.0;
    double hi = 20.0;
    int n = 2000;
};

SweepRange default_sweep(ModelKind kind);

EquilibriumBranch sweep_branch(const ModelParams& params, const SweepRange& range);

// Test functions along the manifold.
double sn_test(const ModelParams& params, double X);
double hopf_test(const ModelParams& params, double X);

struct HopfData {
    double omega = 0.0;
    double l1 = 0.0;
    std::vector<std::string> warnings;
};

struct DetectOptions {
    double xtol = 1e-12;
    double l1_tol = 1e-4;        // |l1| below this: hopf_degenerate
    double sn2_tol = 1e-6;
    double sn3_tol = 1e-4;
    double imag_tol = 1e-6;      // pure-imaginary pair / other-eigenvalue separation
    bool lyapunov = true;        // skip l1 when only locations are needed
};

// Field of `params` as a plain function of the state, for multilinear forms.
std::function<Vec(const Vec&)> field_function(const ModelParams& params);

// First Lyapunov coefficient at an equilibrium x with Jacobian A and a Hopf
// pair +-i omega (invariant projection formula).
HopfData first_lyapunov(const std::function<Vec(const Vec&)>& f, const Vec& x, const Mat& A, double omega);
HopfData first_lyapunov(const ModelParams& params, double X, double omega);

// SN diagnostics at a fold of the manifold.
struct SaddleNodeData {
    double lambda0 = 0.0;    // eigenvalue nearest zero
    double lambda2 = 0.0;    // real part of the next eigenvalue nearest zero, signed
    double lambda2_imag = 0.0;
    double sn2 = 0.0;        // <w, df/dP>, unit w
    double sn3 = 0.0;        // <w, B(v,v)>, unit v (v_X > 0) and unit w with <w, df/dP> > 0
    double wv = 0.0;         // <w, v>
    bool simple = true;
};

SaddleNodeData saddle_node_data(const ModelParams& params, double X);

// Frequency of a genuine Hopf pair of J (an imaginary pair with |Re| within
// 1e-6 scale and no other eigenvalue near the imaginary axis), or 0.
double genuine_hopf_frequency(const Mat& J, double imag_tol = 1e-6);

std::vector<BifurcationPoint> detect_saddle_nodes(const EquilibriumBranch& branch, const DetectOptions& opt = {});
std::vector<BifurcationPoint> detect_hopf(const EquilibriumBranch& branch, const DetectOptions& opt = {});

// Location-only variants used by curve tracing: roots of the test functions
// along X, already filtered (Hopf: genuine imaginary pair).
std::vector<double> saddle_node_roots(const ModelParams& params, const SweepRange& range, double xtol = 1e-12);
struct HopfRoot {
    double X;
    double omega;
};
std::vector<HopfRoot> hopf_roots(const ModelParams& params, const SweepRange& range, double xtol = 1e-12,
                                 double imag_tol = 1e-6);

struct Codim1Report {
    EquilibriumBranch branch;
    std::vector<BifurcationPoint> points;  // ordered by P
};

Codim1Report codim1_report(const ModelParams& params, const SweepRange& range, const DetectOptions& opt = {});

}  // namespace neurobif
