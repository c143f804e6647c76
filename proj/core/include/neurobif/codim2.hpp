#pragma once

// Two-parameter curves of saddle-nodes and Hopf points over a plane
// (theta, P), built from per-slice detection along X and threaded into
// connected curves, plus the codimension-2/3 point detectors.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "neurobif/equilibria.hpp"

namespace neurobif {

enum class CurveKind { saddle_node, hopf };
std::string_view to_string(CurveKind kind);

struct CurveSample {
    double theta = 0.0;
    double P = 0.0;
    double X = 0.0;
    std::map<std::string, double> diagnostics;  // SN: sn2, sn3, lambda2, lambda2_imag; Hopf: omega, l1
    bool fold = false;                          // turning point of the curve in theta
};

enum class CurveEndKind { theta_range, x_range, fold, vanish };
std::string_view to_string(CurveEndKind kind);

struct CurveEnd {
    CurveEndKind kind = CurveEndKind::theta_range;
    double theta = 0.0;
    double P = 0.0;
    double X = 0.0;
};

// A connected curve. Samples are ordered along the curve; theta is monotone
// between consecutive fold samples.
struct BifCurve {
    CurveKind kind = CurveKind::saddle_node;
    std::string theta_name;
    std::string p_name;
    std::vector<CurveSample> samples;
    CurveEnd start;
    CurveEnd end;

    std::vector<std::size_t> fold_indices() const;
};

struct TraceOptions {
    SweepRange x_range;         // n <= 0: model default
    double gap_cost = 0.75;     // threading: cost of leaving a point unmatched
    double theta_tol = 1e-7;    // bisection tolerance for births/deaths
    double imag_tol = 1e-6;
    bool diagnostics = true;    // compute l1 / SN coefficients on every sample
};

std::vector<BifCurve> trace_curve(const ModelParams& base, CurveKind kind, const std::string& theta_name,
                                  double theta_lo, double theta_hi, int n_theta, const TraceOptions& opt = {});

// Codim-2 detectors. Each returns every occurrence on the curve (possibly none).
std::vector<BifurcationPoint> detect_cusp(const BifCurve& sn_curve, const ModelParams& base,
                                          const TraceOptions& opt = {});
std::vector<BifurcationPoint> detect_bt(const BifCurve& sn_curve, const ModelParams& base,
                                        const TraceOptions& opt = {});
std::vector<BifurcationPoint> detect_bautin(const BifCurve& hopf_curve, const ModelParams& base,
                                            const TraceOptions& opt = {});

// Coincidence of a cusp with a Bogdanov-Takens point (or with the omega -> 0
// end of a Hopf curve). Symmetric in its arguments.
std::optional<BifurcationPoint> detect_dbt(const BifurcationPoint& a, const BifurcationPoint& b,
                                           double radius = 0.2);

// End of a Hopf curve where omega -> 0, as a bogdanov_takens point.
std::vector<BifurcationPoint> hopf_curve_bt_ends(const BifCurve& hopf_curve);

struct CurveFoldEvent {
    CurveKind kind;
    double theta, P, X;
};

struct PlaneAnalysis {
    std::string theta_name;
    std::string p_name;
    std::vector<BifCurve> sn_curves;
    std::vector<BifCurve> hopf_curves;
    std::vector<BifurcationPoint> points;  // cusp, bogdanov_takens, bautin, degenerate_bt
    std::vector<CurveFoldEvent> folds;     // theta-turning points of Hopf curves
};

struct PlaneOptions {
    TraceOptions trace;
    double dbt_radius = 0.2;
};

PlaneAnalysis analyze_plane(const ModelParams& base, const std::string& theta_name, double theta_lo,
                            double theta_hi, int n_theta, const PlaneOptions& opt = {});

}  // namespace neurobif
