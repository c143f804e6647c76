#include "neurobif/codim2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "neurobif/errors.hpp"
#include "neurobif/parallel.hpp"

namespace neurobif {

std::string_view to_string(CurveKind kind)
{
    return kind == CurveKind::saddle_node ? "saddle_node" : "hopf";
}

std::string_view to_string(CurveEndKind kind)
{
    switch (kind) {
    case CurveEndKind::theta_range: return "theta_range";
    case CurveEndKind::x_range: return "x_range";
    case CurveEndKind::fold: return "fold";
    case CurveEndKind::vanish: return "vanish";
    }
    return "?";
}

std::vector<std::size_t> BifCurve::fold_indices() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].fold) out.push_back(i);
    }
    return out;
}

namespace {

ModelParams at_theta(const ModelParams& base, const std::string& name, double theta)
{
    ModelParams p = base;
    set_param(p, name, theta);
    return p;
}

SweepRange resolved_range(const ModelParams& base, const TraceOptions& opt)
{
    return opt.x_range.n > 0 ? opt.x_range : default_sweep(kind_of(base));
}

double curve_test(const ModelParams& p, CurveKind kind, double X)
{
    return kind == CurveKind::saddle_node ? sn_test(p, X) : hopf_test(p, X);
}

// Roots of the curve's test function in [xlo, xhi] (genuine Hopf only).
std::vector<double> window_roots(const ModelParams& p, CurveKind kind, double xlo, double xhi, int n,
                                 double imag_tol)
{
    SweepRange r{xlo, xhi, n};
    if (kind == CurveKind::saddle_node) return saddle_node_roots(p, r);
    std::vector<double> out;
    for (const auto& h : hopf_roots(p, r, 1e-12, imag_tol)) out.push_back(h.X);
    return out;
}

// Order-preserving alignment of two sorted root lists; match[i] = j or -1.
std::vector<int> align(const std::vector<double>& a, const std::vector<double>& b, double gap)
{
    const std::size_t m = a.size(), n = b.size();
    std::vector<std::vector<double>> D(m + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 1; i <= m; ++i) D[i][0] = i * gap;
    for (std::size_t j = 1; j <= n; ++j) D[0][j] = j * gap;
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            D[i][j] = std::min({D[i - 1][j - 1] + std::abs(a[i - 1] - b[j - 1]), D[i - 1][j] + gap, D[i][j - 1] + gap});
        }
    }
    std::vector<int> match(m, -1);
    std::size_t i = m, j = n;
    while (i > 0 && j > 0) {
        if (D[i][j] == D[i - 1][j - 1] + std::abs(a[i - 1] - b[j - 1])) {
            match[i - 1] = static_cast<int>(j - 1);
            --i;
            --j;
        } else if (D[i][j] == D[i - 1][j] + gap) {
            --i;
        } else {
            --j;
        }
    }
    return match;
}

struct Link {
    int piece = -1;
    int end = 0;  // 0 = start, 1 = end
    CurveSample fold;
};

struct Piece {
    std::vector<int> k;      // slice indices
    std::vector<double> X;
    CurveEnd ends[2];
    Link link[2];
};

struct Tracer {
    const ModelParams& base;
    CurveKind kind;
    const std::string& name;
    const TraceOptions& opt;
    SweepRange range;
    std::vector<double> thetas;

    ModelParams p(double theta) const { return at_theta(base, name, theta); }

    // Bisection between a theta where `exists` holds and one where it fails.
    double bisect(double yes, double no, const std::function<bool(double)>& exists) const
    {
        for (int it = 0; it < 80 && std::abs(yes - no) > opt.theta_tol; ++it) {
            const double mid = 0.5 * (yes + no);
            (exists(mid) ? yes : no) = mid;
        }
        return yes;
    }

    // Pair of roots near (xa, xb) vanishes between theta `yes` and `no`.
    CurveSample fold_between(double yes, double no, double xa, double xb) const
    {
        double lo = std::min(xa, xb), hi = std::max(xa, xb);
        std::vector<double> last{lo, hi};
        auto exists = [&](double th) {
            const double sep = last[1] - last[0];
            const double margin = 0.5 * sep + 0.02;
            const auto r = window_roots(p(th), kind, last[0] - margin, last[1] + margin, 401, opt.imag_tol);
            if (r.size() < 2) return false;
            // keep the adjacent pair closest to the previous midpoint
            const double mid = 0.5 * (last[0] + last[1]);
            std::size_t best = 0;
            for (std::size_t i = 0; i + 1 < r.size(); ++i) {
                if (std::abs(0.5 * (r[i] + r[i + 1]) - mid) < std::abs(0.5 * (r[best] + r[best + 1]) - mid)) best = i;
            }
            last = {r[best], r[best + 1]};
            return true;
        };
        exists(yes);
        const double th = bisect(yes, no, exists);
        CurveSample s;
        s.theta = th;
        s.X = 0.5 * (last[0] + last[1]);
        s.P = input_from_X(p(th), s.X);
        s.fold = true;
        return s;
    }

    // Single root near x vanishes between `yes` and `no`.
    CurveEnd vanish_between(double yes, double no, double x, double dx) const
    {
        if (x - range.lo < 3 * (range.hi - range.lo) / range.n || range.hi - x < 3 * (range.hi - range.lo) / range.n) {
            return {CurveEndKind::x_range, yes, input_from_X(p(yes), x), x};
        }
        double last = x;
        auto exists = [&](double th) {
            const double w = std::max(0.1, 3 * dx);
            const auto r = window_roots(p(th), kind, last - w, last + w, 401, opt.imag_tol);
            if (r.empty()) return false;
            last = *std::min_element(r.begin(), r.end(), [&](double a, double b) {
                return std::abs(a - last) < std::abs(b - last);
            });
            return true;
        };
        exists(yes);
        const double th = bisect(yes, no, exists);
        return {CurveEndKind::vanish, th, input_from_X(p(th), last), last};
    }
};

void fill_diagnostics(const ModelParams& base, CurveKind kind, const std::string& name, double imag_tol,
                      CurveSample& s)
{
    const ModelParams p = at_theta(base, name, s.theta);
    s.P = input_from_X(p, s.X);
    if (kind == CurveKind::saddle_node) {
        const auto d = saddle_node_data(p, s.X);
        s.diagnostics = {{"sn2", d.sn2}, {"sn3", d.sn3}, {"lambda2", d.lambda2}, {"lambda2_imag", d.lambda2_imag}};
        return;
    }
    const Mat J = jacobian_at_X(p, s.X);
    double omega = genuine_hopf_frequency(J, imag_tol);
    if (omega <= 0.0) {
        // fold samples and ends: take the eigenvalue closest to the imaginary axis
        const CVec ev = eigen(J).eigenvalues;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (ev(i).imag() > 0 && (omega <= 0.0 || std::abs(ev(i).real()) < 1e-3)) omega = std::max(omega, ev(i).imag());
        }
    }
    s.diagnostics["omega"] = omega;
    if (omega > 0.0) {
        try {
            s.diagnostics["l1"] = first_lyapunov(p, s.X, omega).l1;
        } catch (const NumericalFailure&) {
            s.diagnostics["l1"] = std::numeric_limits<double>::quiet_NaN();
        }
    }
}

}  // namespace

std::vector<BifCurve> trace_curve(const ModelParams& base, CurveKind kind, const std::string& theta_name,
                                  double theta_lo, double theta_hi, int n_theta, const TraceOptions& opt)
{
    if (!has_param(kind_of(base), theta_name)) {
        throw ConfigError("pair", "unknown parameter '" + theta_name + "'");
    }
    if (theta_name == primary_parameter(kind_of(base))) {
        throw ConfigError("pair", "the swept parameter cannot be the primary input");
    }
    if (theta_lo > theta_hi) std::swap(theta_lo, theta_hi);
    if (n_theta < 2 || !(theta_lo < theta_hi)) {
        throw ContractViolation("trace_curve: need n_theta >= 2 and a non-empty range");
    }
    Tracer tr{base, kind, theta_name, opt, resolved_range(base, opt), linspace(theta_lo, theta_hi, n_theta)};

    // per-slice roots
    std::vector<std::vector<double>> roots(tr.thetas.size());
    parallel_for(tr.thetas.size(), [&](std::size_t k) {
        try {
            roots[k] = window_roots(tr.p(tr.thetas[k]), kind, tr.range.lo, tr.range.hi, tr.range.n, opt.imag_tol);
        } catch (const NumericalFailure&) {
            roots[k].clear();  // skipped slice
        }
    });

    // threading
    std::vector<Piece> pieces;
    std::vector<int> active;  // piece id per root of the previous slice
    for (std::size_t k = 0; k < roots.size(); ++k) {
        const auto& cur = roots[k];
        std::vector<int> next(cur.size(), -1);
        if (k == 0) {
            for (std::size_t j = 0; j < cur.size(); ++j) {
                Piece pc;
                pc.ends[0] = {CurveEndKind::theta_range, tr.thetas[0], 0.0, cur[j]};
                pieces.push_back(pc);
                next[j] = static_cast<int>(pieces.size() - 1);
            }
        } else {
            const auto& prev = roots[k - 1];
            const auto match = align(prev, cur, opt.gap_cost);
            std::vector<bool> taken(cur.size(), false);
            std::vector<std::size_t> dead;
            for (std::size_t i = 0; i < prev.size(); ++i) {
                if (match[i] >= 0) {
                    next[static_cast<std::size_t>(match[i])] = active[i];
                    taken[static_cast<std::size_t>(match[i])] = true;
                } else {
                    dead.push_back(i);
                }
            }
            std::vector<std::size_t> born;
            for (std::size_t j = 0; j < cur.size(); ++j) {
                if (!taken[j]) born.push_back(j);
            }
            const double th_prev = tr.thetas[k - 1], th_cur = tr.thetas[k];
            // deaths: adjacent pairs fold, singles vanish
            auto adjacent = [](const std::vector<std::size_t>& v, std::size_t a, const std::vector<int>* m) {
                if (v[a + 1] != v[a] + 1) return false;
                (void)m;
                return true;
            };
            for (std::size_t a = 0; a < dead.size();) {
                const int pa = active[dead[a]];
                if (a + 1 < dead.size() && adjacent(dead, a, nullptr)) {
                    const int pb = active[dead[a + 1]];
                    const CurveSample f = tr.fold_between(th_prev, th_cur, prev[dead[a]], prev[dead[a + 1]]);
                    pieces[static_cast<std::size_t>(pa)].link[1] = {pb, 1, f};
                    pieces[static_cast<std::size_t>(pb)].link[1] = {pa, 1, f};
                    pieces[static_cast<std::size_t>(pa)].ends[1] = {CurveEndKind::fold, f.theta, f.P, f.X};
                    pieces[static_cast<std::size_t>(pb)].ends[1] = {CurveEndKind::fold, f.theta, f.P, f.X};
                    a += 2;
                } else {
                    const auto& pc = pieces[static_cast<std::size_t>(pa)];
                    const double dx = pc.X.size() > 1 ? std::abs(pc.X.back() - pc.X[pc.X.size() - 2]) : 0.0;
                    pieces[static_cast<std::size_t>(pa)].ends[1] = tr.vanish_between(th_prev, th_cur, prev[dead[a]], dx);
                    a += 1;
                }
            }
            for (std::size_t a = 0; a < born.size();) {
                Piece pc;
                pieces.push_back(pc);
                const int pa = static_cast<int>(pieces.size() - 1);
                next[born[a]] = pa;
                if (a + 1 < born.size() && adjacent(born, a, nullptr)) {
                    pieces.push_back(Piece{});
                    const int pb = static_cast<int>(pieces.size() - 1);
                    next[born[a + 1]] = pb;
                    const CurveSample f = tr.fold_between(th_cur, th_prev, cur[born[a]], cur[born[a + 1]]);
                    pieces[static_cast<std::size_t>(pa)].link[0] = {pb, 0, f};
                    pieces[static_cast<std::size_t>(pb)].link[0] = {pa, 0, f};
                    pieces[static_cast<std::size_t>(pa)].ends[0] = {CurveEndKind::fold, f.theta, f.P, f.X};
                    pieces[static_cast<std::size_t>(pb)].ends[0] = {CurveEndKind::fold, f.theta, f.P, f.X};
                    a += 2;
                } else {
                    pieces[static_cast<std::size_t>(pa)].ends[0] = tr.vanish_between(th_cur, th_prev, cur[born[a]], 0.0);
                    a += 1;
                }
            }
        }
        for (std::size_t j = 0; j < cur.size(); ++j) {
            auto& pc = pieces[static_cast<std::size_t>(next[j])];
            pc.k.push_back(static_cast<int>(k));
            pc.X.push_back(cur[j]);
        }
        active = next;
    }
    for (int id : active) {
        pieces[static_cast<std::size_t>(id)].ends[1] = {CurveEndKind::theta_range, tr.thetas.back(), 0.0,
                                                         pieces[static_cast<std::size_t>(id)].X.back()};
    }

    // chain pieces through their folds
    std::vector<bool> used(pieces.size(), false);
    std::vector<BifCurve> curves;
    auto emit_chain = [&](int first, int entry_end) {
        BifCurve c;
        c.kind = kind;
        c.theta_name = theta_name;
        c.p_name = std::string(primary_parameter(kind_of(base)));
        int id = first;
        int entry = entry_end;
        c.start = pieces[static_cast<std::size_t>(id)].ends[entry];
        for (;;) {
            used[static_cast<std::size_t>(id)] = true;
            const Piece& pc = pieces[static_cast<std::size_t>(id)];
            std::vector<std::size_t> order(pc.k.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = entry == 0 ? i : order.size() - 1 - i;
            for (std::size_t i : order) {
                CurveSample s;
                s.theta = tr.thetas[static_cast<std::size_t>(pc.k[i])];
                s.X = pc.X[i];
                c.samples.push_back(s);
            }
            const int exit = 1 - entry;
            const Link& l = pc.link[exit];
            if (l.piece < 0 || used[static_cast<std::size_t>(l.piece)]) {
                c.end = pc.ends[exit];
                if (l.piece >= 0) {
                    c.samples.push_back(l.fold);  // closed loop: close it
                }
                break;
            }
            c.samples.push_back(l.fold);
            id = l.piece;
            entry = l.end;
        }
        curves.push_back(std::move(c));
    };
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (used[i]) continue;
        if (pieces[i].link[0].piece < 0) emit_chain(static_cast<int>(i), 0);
        else if (pieces[i].link[1].piece < 0) emit_chain(static_cast<int>(i), 1);
    }
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (!used[i]) emit_chain(static_cast<int>(i), 0);  // closed loops
    }

    // endpoints' P and per-sample diagnostics
    for (auto& c : curves) {
        c.start.P = input_from_X(tr.p(c.start.theta), c.start.X);
        c.end.P = input_from_X(tr.p(c.end.theta), c.end.X);
        if (!opt.diagnostics) {
            for (auto& s : c.samples) s.P = input_from_X(tr.p(s.theta), s.X);
            continue;
        }
        parallel_for(c.samples.size(), [&](std::size_t i) {
            fill_diagnostics(base, kind, theta_name, opt.imag_tol, c.samples[i]);
        });
    }
    return curves;
}

namespace {

using CurveFn = std::function<double(const ModelParams&, double)>;

// Nearest root of g in [guess - w, guess + w], scanning then bisecting.
std::optional<double> local_root(const std::function<double(double)>& g, double guess, double w)
{
    for (int attempt = 0; attempt < 3; ++attempt, w *= 3) {
        const auto grid = linspace(guess - w, guess + w, 41);
        std::optional<double> best;
        for (const auto& b : bracket_scan(g, grid)) {
            const double r = dichotomy(g, b, {1e-13, 0.0, 200, true}).root;
            if (!best || std::abs(r - guess) < std::abs(*best - guess)) best = r;
        }
        if (best) return best;
    }
    return std::nullopt;
}

struct CurvePoint {
    double theta, X;
};

// Locates a zero of `test` on the curve between samples i and i+1.
std::optional<CurvePoint> refine_on_curve(const BifCurve& c, std::size_t i, const ModelParams& base,
                                          const CurveFn& test)
{
    const auto& a = c.samples[i];
    const auto& b = c.samples[i + 1];
    const std::string& name = c.theta_name;
    const CurveKind kind = c.kind;
    const double dth = std::abs(b.theta - a.theta), dX = std::abs(b.X - a.X);
    const bool near_fold = a.fold || b.fold || (i > 0 && c.samples[i - 1].fold)
                           || (i + 2 < c.samples.size() && c.samples[i + 2].fold);
    const bool theta_param = !near_fold && dth > 0.0;

    std::optional<CurvePoint> last;
    auto eval = [&](double s) -> double {
        // s in [0,1] along the segment
        if (theta_param) {
            const double th = a.theta + s * (b.theta - a.theta);
            const ModelParams p = at_theta(base, name, th);
            const auto X = local_root([&](double x) { return curve_test(p, kind, x); }, a.X + s * (b.X - a.X),
                                      dX + 0.02);
            if (!X) throw NumericalFailure("refine_on_curve: lost the curve");
            last = CurvePoint{th, *X};
            return test(p, *X);
        }
        const double X = a.X + s * (b.X - a.X);
        const auto th = local_root([&](double t) { return curve_test(at_theta(base, name, t), kind, X); },
                                   a.theta + s * (b.theta - a.theta), dth + 1e-3);
        if (!th) throw NumericalFailure("refine_on_curve: lost the curve");
        last = CurvePoint{*th, X};
        return test(at_theta(base, name, *th), X);
    };
    try {
        const double fa = eval(0.0);
        const CurvePoint pa = *last;
        const double fb = eval(1.0);
        // a sample sitting on the zero itself (typically a fold sample at a cusp)
        const double big = std::max(std::abs(fa), std::abs(fb));
        if (std::abs(fa) <= 1e-3 * big) return pa;
        if (std::abs(fb) <= 1e-3 * big) return last;
        if (std::signbit(fa) == std::signbit(fb)) return std::nullopt;
        const double s = dichotomy(eval, {0.0, 1.0, fa, fb}, {1e-10, 0.0, 100, false}).root;
        eval(s);
        return last;
    } catch (const NumericalFailure&) {
        return std::nullopt;
    }
}

BifurcationPoint make_point(BifKind kind, const BifCurve& c, const ModelParams& base, const CurvePoint& cp)
{
    BifurcationPoint bp;
    bp.kind = kind;
    bp.plane = {c.theta_name, c.p_name};
    bp.coords = {{c.theta_name, cp.theta}, {c.p_name, input_from_X(at_theta(base, c.theta_name, cp.theta), cp.X)},
                 {"X", cp.X}};
    return bp;
}

double diag_or_nan(const CurveSample& s, const char* key)
{
    const auto it = s.diagnostics.find(key);
    return it == s.diagnostics.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
}

template <class Accept>
std::vector<BifurcationPoint> sign_change_points(const BifCurve& c, const ModelParams& base, const char* key,
                                                 const CurveFn& test, BifKind kind, Accept accept)
{
    std::vector<BifurcationPoint> out;
    for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
        const double va = diag_or_nan(c.samples[i], key), vb = diag_or_nan(c.samples[i + 1], key);
        if (!std::isfinite(va) || !std::isfinite(vb) || std::signbit(va) == std::signbit(vb)) continue;
        if (!accept(c.samples[i], c.samples[i + 1])) continue;
        const auto cp = refine_on_curve(c, i, base, test);
        BifurcationPoint bp;
        if (cp) {
            bp = make_point(kind, c, base, *cp);
        } else {
            // fall back to linear interpolation of the bracketing samples
            const double t = va / (va - vb);
            const CurvePoint lin{c.samples[i].theta + t * (c.samples[i + 1].theta - c.samples[i].theta),
                                 c.samples[i].X + t * (c.samples[i + 1].X - c.samples[i].X)};
            bp = make_point(kind, c, base, lin);
            bp.warnings.emplace_back("refinement failed; coordinates interpolated");
        }
        out.push_back(std::move(bp));
    }
    return out;
}

}  // namespace

std::vector<BifurcationPoint> detect_cusp(const BifCurve& c, const ModelParams& base, const TraceOptions&)
{
    if (c.kind != CurveKind::saddle_node) throw ContractViolation("detect_cusp: needs a saddle-node curve");
    if (c.samples.size() < 3) throw ContractViolation("detect_cusp: curve needs >= 3 samples");
    const CurveFn test = [](const ModelParams& p, double X) { return saddle_node_data(p, X).sn3; };
    auto pts = sign_change_points(c, base, "sn3", test, BifKind::cusp, [](const auto&, const auto&) { return true; });
    for (auto& bp : pts) {
        const auto d = saddle_node_data(at_theta(base, c.theta_name, bp.coord(c.theta_name)), bp.coord("X"));
        bp.diagnostics = {{"sn2", d.sn2}, {"sn3", d.sn3}, {"lambda2", d.lambda2}};
    }
    return pts;
}

std::vector<BifurcationPoint> detect_bt(const BifCurve& c, const ModelParams& base, const TraceOptions& opt)
{
    if (c.kind != CurveKind::saddle_node) throw ContractViolation("detect_bt: needs a saddle-node curve");
    if (c.samples.size() < 3) throw ContractViolation("detect_bt: curve needs >= 3 samples");
    const CurveFn test = [](const ModelParams& p, double X) { return saddle_node_data(p, X).lambda2; };
    auto pts = sign_change_points(c, base, "lambda2", test, BifKind::bogdanov_takens,
                                  [](const CurveSample& a, const CurveSample& b) {
                                      // a real eigenvalue through zero, not a complex pair (zero-Hopf)
                                      return diag_or_nan(a, "lambda2_imag") < 0.05
                                             || diag_or_nan(b, "lambda2_imag") < 0.05;
                                  });
    std::vector<BifurcationPoint> out;
    for (auto& bp : pts) {
        const auto d = saddle_node_data(at_theta(base, c.theta_name, bp.coord(c.theta_name)), bp.coord("X"));
        // reject jumps of the eigenvalue ordering that are not a zero crossing
        if (d.lambda2_imag > 1e-4 + opt.imag_tol || std::abs(d.lambda2) > 1e-6) continue;
        bp.diagnostics = {{"sn2", d.sn2}, {"sn3", d.sn3}, {"lambda2", d.lambda2}};
        out.push_back(std::move(bp));
    }
    return out;
}

std::vector<BifurcationPoint> detect_bautin(const BifCurve& c, const ModelParams& base, const TraceOptions& opt)
{
    if (c.kind != CurveKind::hopf) throw ContractViolation("detect_bautin: needs a Hopf curve");
    const double imag_tol = opt.imag_tol;
    const CurveFn test = [imag_tol](const ModelParams& p, double X) {
        const double omega = genuine_hopf_frequency(jacobian_at_X(p, X), imag_tol);
        if (omega <= 0.0) throw NumericalFailure("detect_bautin: no Hopf pair on the curve");
        return first_lyapunov(p, X, omega).l1;
    };
    auto pts = sign_change_points(c, base, "l1", test, BifKind::bautin, [](const auto&, const auto&) { return true; });
    for (auto& bp : pts) {
        const ModelParams p = at_theta(base, c.theta_name, bp.coord(c.theta_name));
        const double omega = genuine_hopf_frequency(jacobian_at_X(p, bp.coord("X")), imag_tol);
        bp.diagnostics["omega"] = omega;
        if (omega > 0.0) bp.diagnostics["l1"] = first_lyapunov(p, bp.coord("X"), omega).l1;
    }
    return pts;
}

std::vector<BifurcationPoint> hopf_curve_bt_ends(const BifCurve& c)
{
    std::vector<BifurcationPoint> out;
    if (c.kind != CurveKind::hopf || c.samples.size() < 2) return out;
    auto check = [&](const CurveEnd& e, bool at_start) {
        if (e.kind != CurveEndKind::vanish) return;
        // omega must decrease towards the end over the last few samples
        const std::size_t n = std::min<std::size_t>(5, c.samples.size());
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < n; ++m) {
            const auto& s = at_start ? c.samples[n - 1 - m] : c.samples[c.samples.size() - n + m];
            const double w = diag_or_nan(s, "omega");
            if (!(w < prev)) return;
            prev = w;
        }
        BifurcationPoint bp;
        bp.kind = BifKind::bogdanov_takens;
        bp.plane = {c.theta_name, c.p_name};
        bp.coords = {{c.theta_name, e.theta}, {c.p_name, e.P}, {"X", e.X}};
        bp.diagnostics["omega_last_sample"] = prev;
        bp.diagnostics["hopf_end"] = 1.0;
        out.push_back(std::move(bp));
    };
    check(c.start, true);
    check(c.end, false);
    return out;
}

std::optional<BifurcationPoint> detect_dbt(const BifurcationPoint& a, const BifurcationPoint& b, double radius)
{
    const BifurcationPoint* cusp = nullptr;
    const BifurcationPoint* bt = nullptr;
    if (a.kind == BifKind::cusp && b.kind == BifKind::bogdanov_takens) {
        cusp = &a;
        bt = &b;
    } else if (b.kind == BifKind::cusp && a.kind == BifKind::bogdanov_takens) {
        cusp = &b;
        bt = &a;
    } else {
        return std::nullopt;
    }
    if (cusp->plane != bt->plane) return std::nullopt;
    for (const auto& name : cusp->plane) {
        if (std::abs(cusp->coord(name) - bt->coord(name)) > radius) return std::nullopt;
    }
    BifurcationPoint out = *cusp;
    out.kind = BifKind::degenerate_bt;
    out.warnings.clear();
    out.diagnostics.clear();
    for (const auto& name : cusp->plane) {
        out.diagnostics["cusp_" + name] = cusp->coord(name);
        out.diagnostics["bt_" + name] = bt->coord(name);
    }
    out.diagnostics["radius"] = radius;
    return out;
}

PlaneAnalysis analyze_plane(const ModelParams& base, const std::string& theta_name, double theta_lo,
                            double theta_hi, int n_theta, const PlaneOptions& opt)
{
    PlaneAnalysis out;
    out.theta_name = theta_name;
    out.p_name = std::string(primary_parameter(kind_of(base)));
    out.sn_curves = trace_curve(base, CurveKind::saddle_node, theta_name, theta_lo, theta_hi, n_theta, opt.trace);
    out.hopf_curves = trace_curve(base, CurveKind::hopf, theta_name, theta_lo, theta_hi, n_theta, opt.trace);

    std::vector<BifurcationPoint> cusps, bts;
    for (const auto& c : out.sn_curves) {
        if (c.samples.size() < 3) continue;
        for (auto& p : detect_cusp(c, base, opt.trace)) cusps.push_back(p);
        for (auto& p : detect_bt(c, base, opt.trace)) bts.push_back(p);
    }
    std::vector<BifurcationPoint> bautins, hopf_ends;
    for (const auto& c : out.hopf_curves) {
        for (auto& p : detect_bautin(c, base, opt.trace)) bautins.push_back(p);
        for (auto& p : hopf_curve_bt_ends(c)) hopf_ends.push_back(p);
        for (std::size_t i : c.fold_indices()) {
            const auto& s = c.samples[i];
            out.folds.push_back({CurveKind::hopf, s.theta, s.P, s.X});
        }
    }
    std::vector<BifurcationPoint> dbts;
    for (const auto& c : cusps) {
        std::optional<BifurcationPoint> best;
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto* list : {&bts, &hopf_ends}) {
            for (const auto& b : *list) {
                if (auto d = detect_dbt(c, b, opt.dbt_radius)) {
                    const double dist = std::hypot(c.coord(theta_name) - b.coord(theta_name),
                                                   c.coord(out.p_name) - b.coord(out.p_name));
                    if (dist < best_d) {
                        best_d = dist;
                        best = d;
                    }
                }
            }
        }
        if (best) dbts.push_back(*best);
    }
    // A Hopf-curve end is only reported when no SN-curve BT explains it.
    for (const auto& h : hopf_ends) {
        const bool dup = std::any_of(bts.begin(), bts.end(), [&](const BifurcationPoint& b) {
            return std::abs(b.coord(theta_name) - h.coord(theta_name)) < opt.dbt_radius
                   && std::abs(b.coord(out.p_name) - h.coord(out.p_name)) < opt.dbt_radius;
        });
        if (!dup) bts.push_back(h);
    }
    for (auto* list : {&cusps, &bts, &bautins, &dbts}) {
        out.points.insert(out.points.end(), list->begin(), list->end());
    }
    for (auto& p : out.points) {
        switch (p.kind) {
        case BifKind::cusp: p.label = "C"; break;
        case BifKind::bogdanov_takens: p.label = "BT"; break;
        case BifKind::bautin: p.label = "GH"; break;
        case BifKind::degenerate_bt: p.label = "DBT"; break;
        default: break;
        }
    }
    std::stable_sort(out.points.begin(), out.points.end(), [&](const BifurcationPoint& a, const BifurcationPoint& b) {
        return a.coord(theta_name) < b.coord(theta_name);
    });
    return out;
}

}  // namespace neurobif
