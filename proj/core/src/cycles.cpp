#include "neurobif/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "neurobif/errors.hpp"
#include "neurobif/linalg.hpp"
#include "neurobif/parallel.hpp"

namespace neurobif {

std::string_view to_string(Band band)
{
    switch (band) {
    case Band::sub_delta: return "sub_delta";
    case Band::delta: return "delta";
    case Band::theta: return "theta";
    case Band::alpha: return "alpha";
    case Band::beta: return "beta";
    case Band::gamma: return "gamma";
    }
    return "?";
}

double cycle_frequency_hz(double period, double a)
{
    if (!(period > 0.0) || !std::isfinite(period)) throw DomainError("period must be positive");
    if (!(a > 0.0)) throw DomainError("rate a must be positive");
    return a / period;
}

Band classify_band(double period, double a)
{
    const double f = cycle_frequency_hz(period, a);
    if (f < 0.5) return Band::sub_delta;
    if (f < 4.0) return Band::delta;
    if (f < 8.0) return Band::theta;
    if (f < 13.0) return Band::alpha;
    if (f <= 30.0) return Band::beta;
    return Band::gamma;
}

std::string_view to_string(CycleEventKind kind)
{
    switch (kind) {
    case CycleEventKind::fold_of_cycles: return "fold_of_cycles";
    case CycleEventKind::snic_candidate: return "snic_candidate";
    case CycleEventKind::hopf_endpoint: return "hopf_endpoint";
    case CycleEventKind::period_blowup: return "period_blowup";
    case CycleEventKind::range_end: return "range_end";
    case CycleEventKind::failure: return "failure";
    case CycleEventKind::max_points: return "max_points";
    }
    return "?";
}

bool CycleBranch::has_event(CycleEventKind kind) const
{
    return std::any_of(events.begin(), events.end(), [&](const CycleEvent& e) { return e.kind == kind; });
}

namespace {

IntegrateOptions flow_options(double tol)
{
    IntegrateOptions o;
    o.tol = tol;
    o.max_dt = 0.25;
    return o;
}

// State, fundamental matrix and parameter sensitivity, packed.
Rhs variational_rhs(const ModelParams& params, int n)
{
    return [params, n](const State& y, State& dy, double) {
        Eigen::Map<const Vec> x(y.data(), n);
        Eigen::Map<const Mat> Phi(y.data() + n, n, n);
        Eigen::Map<const Vec> z(y.data() + n + n * n, n);
        const Vec xv = x;
        const Mat J = jacobian(params, xv);
        field(params, std::span<const double>(y.data(), n), std::span<double>(dy.data(), n));
        Eigen::Map<Mat>(dy.data() + n, n, n).noalias() = J * Phi;
        Eigen::Map<Vec>(dy.data() + n + n * n, n) = J * z + primary_parameter_derivative(params, xv);
    };
}

void check_state(const ModelParams& params, const Vec& x)
{
    if (x.size() != dimension(params)) throw ContractViolation("cycle: state has the wrong dimension");
    if (!x.allFinite()) throw DomainError("cycle: non-finite state");
}

double param_of(const ModelParams& params) { return get_param(params, primary_parameter(kind_of(params))); }

struct Extent {
    double lo, hi;
};

Extent x_extent(const ModelParams& params, const Vec& x0, double T, double tol)
{
    const int ix = x_index(kind_of(params));
    IntegrateOptions o = flow_options(tol);
    o.record_dt = T / 400.0;
    const Trajectory tr = integrate(params, x0, 0.0, T, o);
    Extent e{x0[ix], x0[ix]};
    for (const auto& s : tr.states) {
        e.lo = std::min(e.lo, s[ix]);
        e.hi = std::max(e.hi, s[ix]);
    }
    return e;
}

LimitCycle make_cycle(const ModelParams& params, const Vec& x0, double T, const Mat& M, const ShootingOptions& opt)
{
    LimitCycle c;
    c.P = param_of(params);
    c.anchor = x0;
    c.period = T;
    const Spectrum sp = eigen(M);
    c.multipliers = sp.eigenvalues;
    std::sort(c.multipliers.begin(), c.multipliers.end(),
              [](const Complex& a, const Complex& b) { return std::abs(a) > std::abs(b); });
    Eigen::Index trivial = 0;
    for (Eigen::Index i = 1; i < c.multipliers.size(); ++i) {
        if (std::abs(c.multipliers[i] - 1.0) < std::abs(c.multipliers[trivial] - 1.0)) trivial = i;
    }
    c.trivial_error = std::abs(c.multipliers[trivial] - 1.0);
    c.max_nontrivial = 0.0;
    for (Eigen::Index i = 0; i < c.multipliers.size(); ++i) {
        if (i != trivial) c.max_nontrivial = std::max(c.max_nontrivial, std::abs(c.multipliers[i]));
    }
    c.stable = c.max_nontrivial < 1.0 - 1e-6;
    const Extent e = x_extent(params, x0, T, opt.tol);
    c.x_min = e.lo;
    c.x_max = e.hi;
    c.band = classify_band(T, opt.a);
    return c;
}

// Integration error amplified by the flow bounds how small the periodicity
// residual can get; long near-homoclinic orbits hit this well above 1e-8.
double residual_floor(const Mat& M, double tol)
{
    return 100.0 * tol * (1.0 + M.lpNorm<Eigen::Infinity>());
}

}  // namespace

FlowDerivatives flow_derivatives(const ModelParams& params, const Vec& x0, double T, double tol)
{
    const int n = dimension(params);
    check_state(params, x0);
    if (!(T > 0.0)) throw DomainError("flow: non-positive time");
    State y(static_cast<std::size_t>(n + n * n + n), 0.0);
    std::copy(x0.data(), x0.data() + n, y.begin());
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(n + i * n + i)] = 1.0;
    Dopri5 s(variational_rhs(params, n), std::move(y), 0.0, flow_options(tol));
    while (s.step(T)) {
    }
    FlowDerivatives out;
    const State& e = s.x();
    out.end = Eigen::Map<const Vec>(e.data(), n);
    out.monodromy = Eigen::Map<const Mat>(e.data() + n, n, n);
    out.d_param = Eigen::Map<const Vec>(e.data() + n + n * n, n);
    return out;
}

Mat monodromy_fd(const ModelParams& params, const Vec& x0, double T, double tol, double h)
{
    const int n = dimension(params);
    check_state(params, x0);
    Mat M(n, n);
    const IntegrateOptions o = flow_options(tol);
    for (int k = 0; k < n; ++k) {
        Vec xp = x0, xm = x0;
        xp[k] += h;
        xm[k] -= h;
        const Vec ep = integrate(params, xp, 0.0, T, o).states.back();
        const Vec em = integrate(params, xm, 0.0, T, o).states.back();
        M.col(k) = (ep - em) / (2 * h);
    }
    return M;
}

LimitCycle refine_cycle(const ModelParams& params, const Vec& x0_in, double period, const ShootingOptions& opt)
{
    check_state(params, x0_in);
    if (!(period > 0.0)) throw DomainError("refine_cycle: non-positive period guess");
    const int n = dimension(params);
    const int ix = x_index(kind_of(params));
    const double level = x0_in[ix];
    Vec u(n + 1);
    u << x0_in, period;

    auto residual = [&](const Vec& v, FlowDerivatives* fd) {
        FlowDerivatives d = flow_derivatives(params, v.head(n), v[n], opt.tol);
        Vec r(n + 1);
        r.head(n) = d.end - v.head(n);
        r[n] = v[ix] - level;
        if (fd) *fd = std::move(d);
        return r;
    };

    FlowDerivatives fd;
    Vec r = residual(u, &fd);
    bool stalled = false;
    double prev_norm = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= opt.max_newton; ++it) {
        const double nr = r.lpNorm<Eigen::Infinity>();
        if (nr <= opt.newton_tol || (stalled && nr <= residual_floor(fd.monodromy, opt.tol))) {
            return make_cycle(params, u.head(n), u[n], fd.monodromy, opt);
        }
        if (it == opt.max_newton) break;
        Mat A = Mat::Zero(n + 1, n + 1);
        A.topLeftCorner(n, n) = fd.monodromy - Mat::Identity(n, n);
        A.block(0, n, n, 1) = field(params, Vec(fd.end));
        A(n, ix) = 1.0;
        const Vec du = A.fullPivLu().solve(-r);
        if (!du.allFinite()) throw NoConvergence("find_cycle: singular shooting system", u);
        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h < 10; ++h, lambda *= 0.5) {
            Vec trial = u + lambda * du;
            if (!(trial[n] > 0.0)) continue;
            try {
                FlowDerivatives ft;
                const Vec rt = residual(trial, &ft);
                if (rt.norm() < r.norm() || h == 9) {
                    stalled = rt.lpNorm<Eigen::Infinity>() > 0.5 * prev_norm;
                    prev_norm = rt.lpNorm<Eigen::Infinity>();
                    u = trial;
                    r = rt;
                    fd = std::move(ft);
                    accepted = true;
                    break;
                }
            } catch (const IntegrationError&) {
            }
        }
        if (!accepted) throw NoConvergence("find_cycle: shooting Newton diverged", u);
    }
    throw NoConvergence("find_cycle: shooting Newton did not reach the residual tolerance", u);
}

LimitCycle find_cycle(const ModelParams& params, const Vec& guess, const FindCycleOptions& opt)
{
    check_state(params, guess);
    const int ix = x_index(kind_of(params));
    IntegrateOptions io = flow_options(opt.shooting.tol);
    Vec x = guess;
    if (opt.transient > 0) x = integrate(params, x, 0.0, opt.transient, io).states.back();

    double level;
    if (opt.level) {
        level = *opt.level;
    } else {
        const Trajectory probe = integrate(params, x, 0.0, opt.probe_time, io);
        double lo = x[ix], hi = x[ix];
        for (const auto& s : probe.states) {
            lo = std::min(lo, s[ix]);
            hi = std::max(hi, s[ix]);
        }
        if (hi - lo < 1e-7) throw NumericalFailure("find_cycle: not a cycle (no oscillation in X)");
        level = 0.5 * (lo + hi);
    }

    // two successive upward crossings give the anchor and a period estimate
    Dopri5 s(model_rhs(params), State(x.data(), x.data() + x.size()), 0.0, io);
    const SectionWatcher watch(ix, level, +1);
    std::optional<Crossing> first;
    double t_end = opt.probe_time;
    while (s.step(t_end)) {
        const auto c = watch.check(s);
        if (!c) continue;
        if (!first) {
            first = c;
            t_end = c->t + opt.probe_time;
            continue;
        }
        const double T0 = c->t - first->t;
        const double dev = (c->x - first->x).norm();
        // accept the estimate only if the orbit came back near its start
        if (dev < 0.1 * (1.0 + first->x.norm()) || s.t() > first->t + 10 * T0) {
            return refine_cycle(params, c->x, T0, opt.shooting);
        }
        first = c;
        t_end = c->t + std::max(opt.probe_time, 10 * T0);
    }
    throw NumericalFailure("find_cycle: not a cycle (no return to the section)");
}

namespace {

struct ContState {
    Vec u;     // (x0, T, P)
    Mat M;
    Vec tangent;
};

class Continuer {
public:
    Continuer(const ModelParams& params, const ContinuationOptions& opt)
        : params_(params), opt_(opt), n_(dimension(params)), pname_(primary_parameter(kind_of(params)))
    {
    }

    ModelParams at(double P) const
    {
        ModelParams p = params_;
        set_param(p, pname_, P);
        return p;
    }

    Vec weights(double T) const
    {
        Vec w = Vec::Ones(n_ + 2);
        w[n_] = std::pow(opt_.period_weight / std::max(T, 1.0), 2);
        return w;
    }

    // Rows of the periodicity and phase conditions, plus the residual.
    struct Linear {
        Mat A;   // (n + 1) x (n + 2)
        Vec r;   // n + 1
        Mat M;
    };

    Linear linearize(const Vec& u, const Vec& xhat, const Vec& g) const
    {
        const ModelParams p = at(u[n_ + 1]);
        const FlowDerivatives fd = flow_derivatives(p, u.head(n_), u[n_], opt_.shooting.tol);
        Linear L;
        L.A = Mat::Zero(n_ + 1, n_ + 2);
        L.A.topLeftCorner(n_, n_) = fd.monodromy - Mat::Identity(n_, n_);
        L.A.col(n_).head(n_) = field(p, Vec(fd.end));
        L.A.col(n_ + 1).head(n_) = fd.d_param;
        L.A.row(n_).head(n_) = g.transpose();
        L.r.resize(n_ + 1);
        L.r.head(n_) = fd.end - u.head(n_);
        L.r[n_] = g.dot(u.head(n_) - xhat);
        L.M = fd.monodromy;
        return L;
    }

    Vec tangent(const Mat& A, const Vec& prev, const Vec& w) const
    {
        Mat B(n_ + 2, n_ + 2);
        B.topRows(n_ + 1) = A;
        B.row(n_ + 1) = w.cwiseProduct(prev).transpose();
        Vec rhs = Vec::Zero(n_ + 2);
        rhs[n_ + 1] = 1.0;
        Vec t = B.fullPivLu().solve(rhs);
        t /= std::sqrt(t.cwiseProduct(w).dot(t));
        if (t.cwiseProduct(w).dot(prev) < 0) t = -t;
        return t;
    }

    // Corrector from `base` along `dir` at arclength ds.
    std::optional<ContState> correct(const Vec& base, const Vec& dir, double ds, const Vec& xhat, const Vec& g,
                                     const Vec& w, int* iterations) const
    {
        Vec u = base + ds * dir;
        const int max_it = 8;
        struct Best {
            Vec u;
            Linear L;
            double nr = std::numeric_limits<double>::infinity();
            int it = 0;
        } best;
        auto accept = [&](const Best& b) {
            if (iterations) *iterations = b.it;
            return ContState{b.u, b.L.M, tangent(b.L.A, dir, w)};
        };
        double last = std::numeric_limits<double>::infinity();
        for (int it = 0; it < max_it; ++it) {
            if (!(u[n_] > 0.0)) return std::nullopt;
            Linear L;
            try {
                L = linearize(u, xhat, g);
            } catch (const NumericalFailure&) {
                return std::nullopt;
            }
            Vec r(n_ + 2);
            r.head(n_ + 1) = L.r;
            r[n_ + 1] = (u - base).cwiseProduct(w).dot(dir) - ds;
            const double nr = r.lpNorm<Eigen::Infinity>();
            const double floor = residual_floor(L.M, opt_.shooting.tol);
            if (nr < best.nr) best = Best{u, L, nr, it};
            if (nr <= std::max(opt_.shooting.newton_tol, floor)) return accept(best);
            if (it > 1 && nr > 0.5 * last) {
                // stagnation at the noise level of the flow is convergence too
                if (best.nr <= 10 * residual_floor(best.L.M, opt_.shooting.tol)) return accept(best);
                return std::nullopt;
            }
            last = nr;
            Mat B(n_ + 2, n_ + 2);
            B.topRows(n_ + 1) = L.A;
            B.row(n_ + 1) = w.cwiseProduct(dir).transpose();
            const Vec du = B.fullPivLu().solve(-r);
            if (!du.allFinite()) return std::nullopt;
            u += du;
        }
        return std::nullopt;
    }

    LimitCycle cycle_of(const ContState& s) const
    {
        return make_cycle(at(s.u[n_ + 1]), s.u.head(n_), s.u[n_], s.M, opt_.shooting);
    }

    CycleBranch run(ContState start, const Vec& xhat0, const Vec& g0, double ds0, bool from_hopf) const
    {
        CycleBranch br;
        double ds = ds0;
        double s_acc = 0.0;
        ContState cur = std::move(start);
        Vec xhat = xhat0, g = g0;
        bool have_point = false;
        double max_amp = 0.0;
        struct Pending {
            ContState state;
            double ds;
            std::size_t k;
        };
        std::optional<Pending> pending;

        auto push = [&](const ContState& st, const LimitCycle& c) {
            br.cycles.push_back(c);
            br.arclength.push_back(s_acc);
            br.tangent_p.push_back(st.tangent[n_ + 1]);
        };

        if (!from_hopf) {
            push(cur, cycle_of(cur));
            have_point = true;
            max_amp = br.cycles.back().amplitude();
        }

        for (int guard = 0; guard < 100000; ++guard) {
            if (static_cast<int>(br.cycles.size()) >= opt_.max_points) {
                br.events.push_back({CycleEventKind::max_points, br.cycles.size() - 1, br.cycles.back().P, ""});
                break;
            }
            const Vec w = weights(cur.u[n_]);
            int iters = 0;
            auto next = correct(cur.u, cur.tangent, ds, xhat, g, w, &iters);
            bool ok = next.has_value();
            LimitCycle c;
            if (ok) {
                // keep adjacent periods close and the step on one sheet
                const double ratio = next->u[n_] / cur.u[n_];
                if (have_point && (ratio > 1.3 || ratio < 1.0 / 1.3)) ok = false;
            }
            if (ok) {
                try {
                    c = cycle_of(*next);
                } catch (const NumericalFailure&) {
                    ok = false;
                }
            }
            if (!ok) {
                ds *= 0.5;
                if (ds < opt_.ds_min) {
                    const bool small = have_point && br.cycles.back().amplitude() < 10 * opt_.amplitude_min;
                    const bool slow = have_point && br.cycles.back().period > 100.0;
                    const auto kind = small  ? CycleEventKind::hopf_endpoint
                                      : slow ? CycleEventKind::period_blowup
                                             : CycleEventKind::failure;
                    if (have_point) br.events.push_back({kind, br.cycles.size() - 1, br.cycles.back().P, "step size underflow"});
                    break;
                }
                continue;
            }

            // a cycle shrinking onto the equilibrium ends the family at a Hopf point
            const bool have_two = br.cycles.size() >= 2;
            if (have_point && c.amplitude() < opt_.amplitude_min && max_amp > 4 * opt_.amplitude_min) {
                const std::size_t k = br.cycles.size() - 1;
                const double ph = have_two ? hopf_estimate(br.cycles[k - 1], br.cycles[k]) : br.cycles[k].P;
                br.events.push_back({CycleEventKind::hopf_endpoint, k, ph, ""});
                pending.reset();
                break;
            }
            if (have_two) {
                const std::size_t k = br.cycles.size() - 1;
                const double a0 = br.cycles[k - 1].amplitude(), a1 = br.cycles[k].amplitude();
                const bool turned = pending && pending->k == k;
                // amplitude minimum at the turn: at k, or at k - 1 with the turn after it
                const bool min_at_k = a1 < a0 && c.amplitude() > a1;
                const bool min_before = k >= 2 && br.cycles[k - 2].amplitude() > a0 && a1 > a0;
                if ((turned && (min_at_k || min_before)) || (min_at_k && a1 < 0.1 * max_amp)) {
                    const std::size_t i = min_before && turned ? k - 1 : k;
                    const double ph = hopf_estimate(br.cycles[i - 1], br.cycles[i]);
                    if (turned) {
                        // the last point already sits on the mirrored sheet
                        br.cycles.pop_back();
                        br.arclength.pop_back();
                        br.tangent_p.pop_back();
                    }
                    br.events.push_back({CycleEventKind::hopf_endpoint, br.cycles.size() - 1, ph,
                                         "passed through the Hopf point"});
                    pending.reset();
                    break;
                }
            }

            const ContState prev = cur;
            cur = std::move(*next);
            s_acc += ds;
            push(cur, c);
            have_point = true;
            const std::size_t k = br.cycles.size() - 1;
            max_amp = std::max(max_amp, c.amplitude());
            xhat = cur.u.head(n_);
            g = field(at(cur.u[n_ + 1]), xhat);
            g /= g.norm();

            // a turning point is confirmed one step later, once it is clear the
            // branch did not just pass through a Hopf point
            if (pending) {
                refine_fold(br, pending->state, pending->ds, pending->k);
                pending.reset();
            }
            if (k > 0 && std::signbit(br.tangent_p[k]) != std::signbit(br.tangent_p[k - 1])) {
                pending = Pending{prev, ds, k};
            }
            if (c.P < opt_.P_min || c.P > opt_.P_max) {
                br.events.push_back({CycleEventKind::range_end, k, c.P, ""});
                break;
            }
            if (c.period > opt_.period_max) {
                br.events.push_back({CycleEventKind::period_blowup, k, c.P, ""});
                break;
            }
            if (iters <= 3) ds = std::min(ds * 1.5, opt_.ds_max);
        }
        if (pending) refine_fold(br, pending->state, pending->ds, pending->k);
        std::stable_sort(br.events.begin(), br.events.end(),
                         [](const CycleEvent& a, const CycleEvent& b) { return a.index < b.index; });
        return br;
    }

    // Amplitude squared is linear in P near a Hopf point.
    static double hopf_estimate(const LimitCycle& a, const LimitCycle& b)
    {
        const double qa = a.amplitude() * a.amplitude(), qb = b.amplitude() * b.amplitude();
        if (qa == qb) return b.P;
        return b.P - qb * (b.P - a.P) / (qb - qa);
    }

    // Turning point between the last two points: root of dP/ds on re-solved
    // points along the previous tangent.
    void refine_fold(CycleBranch& br, const ContState& prev, double ds, std::size_t k) const
    {
        const Vec w = weights(prev.u[n_]);
        const Vec xhat = prev.u.head(n_);
        Vec g = field(at(prev.u[n_ + 1]), xhat);
        g /= g.norm();
        std::optional<ContState> best;
        auto tp = [&](double s) {
            auto st = correct(prev.u, prev.tangent, s, xhat, g, w, nullptr);
            if (!st) throw NoConvergence("fold refinement", prev.u);
            const double v = st->tangent[n_ + 1];
            best = std::move(st);
            return v;
        };
        std::string detail;
        LimitCycle fold;
        try {
            DichotomyOptions o;
            o.xtol = 1e-7;
            o.max_iter = 60;
            const double root = dichotomy_solve(tp, Bracket{0.0, ds}, o);
            tp(root);
            fold = cycle_of(*best);
        } catch (const NumericalFailure&) {
            // fall back on the parabola through the last three points
            detail = "fold beyond resolution; parabolic estimate";
            fold = br.cycles[k];
            if (k >= 2) {
                const double s0 = br.arclength[k - 2], s1 = br.arclength[k - 1], s2 = br.arclength[k];
                const double p0 = br.cycles[k - 2].P, p1 = br.cycles[k - 1].P, p2 = br.cycles[k].P;
                const double d1 = (p1 - p0) / (s1 - s0), d2 = (p2 - p1) / (s2 - s1);
                const double c2 = (d2 - d1) / (s2 - s0);
                if (c2 != 0.0) {
                    const double sv = 0.5 * (s0 + s1) - d1 / (2 * c2);
                    fold.P = p1 + d1 * (sv - s1) + c2 * (sv - s0) * (sv - s1);
                }
            }
        }
        br.events.push_back({CycleEventKind::fold_of_cycles, k - 1, fold.P, detail});
        br.folds.push_back(fold);
    }

private:
    ModelParams params_;
    ContinuationOptions opt_;
    int n_;
    std::string pname_;
};

}  // namespace

CycleBranch continue_cycles(const ModelParams& params, const LimitCycle& seed, int direction,
                            const ContinuationOptions& opt)
{
    const int n = dimension(params);
    check_state(params, seed.anchor);
    if (direction != 1 && direction != -1) throw DomainError("continue_cycles: direction must be +1 or -1");
    Continuer cont(params, opt);
    ContState st;
    st.u.resize(n + 2);
    st.u << seed.anchor, seed.period, seed.P;
    const ModelParams p = cont.at(seed.P);
    Vec g = field(p, seed.anchor);
    g /= g.norm();
    const auto L = cont.linearize(st.u, seed.anchor, g);
    st.M = L.M;
    Vec guess = Vec::Zero(n + 2);
    guess[n + 1] = direction;
    st.tangent = cont.tangent(L.A, guess, cont.weights(seed.period));
    if (st.tangent[n + 1] * direction < 0) st.tangent = -st.tangent;
    return cont.run(std::move(st), seed.anchor, g, opt.ds, false);
}

CycleBranch continue_from_hopf(const ModelParams& params, double X_hopf, double omega,
                               const ContinuationOptions& opt)
{
    const int n = dimension(params);
    if (!(omega > 0.0)) throw DomainError("continue_from_hopf: omega must be positive");
    const Equilibrium eq = equilibrium_from_X(params, X_hopf);
    Continuer cont(params, opt);
    const ModelParams p = cont.at(eq.P);
    const Mat J = jacobian(p, eq.state.values);
    CVec q = eigenvector(J, Complex(0.0, omega));
    Vec a = q.real(), b = q.imag();
    const double phi = 0.5 * std::atan2(-2 * a.dot(b), a.squaredNorm() - b.squaredNorm());
    q *= std::polar(1.0, phi);
    a = q.real();
    b = q.imag();
    if (a.norm() < 1e-12 || b.norm() < 1e-12) throw NumericalFailure("continue_from_hopf: degenerate eigenvector", J);
    a /= a.norm();
    b /= b.norm();
    ContState st;
    st.u.resize(n + 2);
    st.u << eq.state.values, 2 * std::numbers::pi / omega, eq.P;
    st.M = Mat::Identity(n, n);
    st.tangent = Vec::Zero(n + 2);
    st.tangent.head(n) = a;
    return cont.run(std::move(st), eq.state.values, b, opt.ds, true);
}

std::vector<BifurcationPoint> detect_fold_of_cycles(const CycleBranch& branch)
{
    std::vector<BifurcationPoint> out;
    if (branch.cycles.size() < 3) return out;
    const std::string pname = "P";
    std::size_t fold_i = 0;
    for (const auto& e : branch.events) {
        if (e.kind != CycleEventKind::fold_of_cycles) continue;
        const LimitCycle& f = branch.folds.at(fold_i++);
        const LimitCycle& before = branch.cycles[e.index];
        const LimitCycle& after = branch.cycles[std::min(e.index + 1, branch.cycles.size() - 1)];
        BifurcationPoint bp;
        bp.kind = BifKind::fold_of_cycles;
        bp.plane = {pname};
        bp.coords = {{pname, e.P}, {"X", f.x_max}};
        bp.diagnostics["period"] = f.period;
        bp.diagnostics["x_min"] = f.x_min;
        bp.diagnostics["x_max"] = f.x_max;
        bp.diagnostics["mu_max_before"] = before.max_nontrivial;
        bp.diagnostics["mu_max_after"] = after.max_nontrivial;
        bp.diagnostics["stable_before"] = before.stable ? 1.0 : 0.0;
        bp.diagnostics["stable_after"] = after.stable ? 1.0 : 0.0;
        if (!e.detail.empty()) bp.warnings.push_back(e.detail);
        if (before.stable == after.stable) bp.warnings.push_back("no stability change across the turning point");
        out.push_back(std::move(bp));
    }
    return out;
}

std::vector<BifurcationPoint> detect_snic(const CycleBranch& branch, const std::vector<double>& sn_P,
                                          const SnicOptions& opt)
{
    std::vector<BifurcationPoint> out;
    const auto& c = branch.cycles;
    const std::size_t m = static_cast<std::size_t>(opt.monotone_steps);
    for (std::size_t k = m; k < c.size(); ++k) {
        if (c[k].period <= opt.period_threshold) continue;
        bool monotone = true;
        for (std::size_t i = k - m; i < k; ++i) monotone = monotone && c[i + 1].period > c[i].period;
        if (!monotone) continue;
        for (double psn : sn_P) {
            if (std::abs(c[k].P - psn) > opt.p_tol) continue;
            // P must be closing in on the saddle-node over the same steps
            if (std::abs(c[k].P - psn) > std::abs(c[k - m].P - psn)) continue;
            BifurcationPoint bp;
            bp.kind = BifKind::snic_candidate;
            bp.plane = {"P"};
            bp.coords = {{"P", psn}};
            bp.diagnostics["period"] = c[k].period;
            bp.diagnostics["P_last"] = c[k].P;
            bp.diagnostics["distance"] = std::abs(c[k].P - psn);
            out.push_back(std::move(bp));
            return out;
        }
    }
    return out;
}

}  // namespace neurobif

namespace neurobif {

CycleSet cycle_set(const ModelParams& params, const ContinuationOptions& opt)
{
    CycleSet out;
    const ModelKind kind = kind_of(params);
    const SweepRange range = default_sweep(kind);
    for (double X : saddle_node_roots(params, range)) out.sn_P.push_back(input_from_X(params, X));
    for (const auto& h : hopf_roots(params, range)) {
        const double ph = input_from_X(params, h.X);
        // a family already followed from its other Hopf end
        const bool seen = std::any_of(out.branches.begin(), out.branches.end(), [&](const CycleBranch& b) {
            return std::any_of(b.events.begin(), b.events.end(), [&](const CycleEvent& e) {
                return e.kind == CycleEventKind::hopf_endpoint && std::abs(e.P - ph) < 1e-3 * (1.0 + std::abs(ph));
            });
        });
        if (seen) continue;
        try {
            out.branches.push_back(continue_from_hopf(params, h.X, h.omega, opt));
        } catch (const NumericalFailure& e) {
            out.warnings.push_back("cycle family from the Hopf point at P = " + std::to_string(ph) + ": " + e.what());
        }
    }
    for (const auto& b : out.branches) {
        for (const auto& f : b.folds) {
            const bool dup = std::any_of(out.folds.begin(), out.folds.end(), [&](const LimitCycle& g) {
                return std::abs(g.P - f.P) < 1e-5 * (1.0 + std::abs(f.P)) && std::abs(g.period - f.period) < 1e-3 * f.period;
            });
            if (!dup) out.folds.push_back(f);
        }
        for (auto& s : detect_snic(b, out.sn_P)) out.snic.push_back(std::move(s));
    }
    std::sort(out.folds.begin(), out.folds.end(), [](const LimitCycle& a, const LimitCycle& b) { return a.P < b.P; });
    return out;
}

FlcOptions default_flc_options(ModelKind kind)
{
    FlcOptions o;
    switch (kind) {
    case ModelKind::jansen_rit:
        o.theta_lo = 12.0;
        o.theta_hi = 13.1;
        o.n_theta = 23;
        break;
    case ModelKind::wendling_chauvel:
        o.theta_lo = 10.6;
        o.theta_hi = 12.2;
        o.n_theta = 17;
        break;
    case ModelKind::dbt:
        throw ContractViolation("trace_flc_curve: the normal form has no default plane");
    }
    return o;
}

namespace {

struct Slice {
    double theta;
    std::vector<LimitCycle> folds;
    std::vector<double> sn_P;
};

// Folds of `more` left unmatched after pairing each fold of `fewer` with
// its nearest neighbour in P.
std::vector<LimitCycle> unmatched(const std::vector<LimitCycle>& more, const std::vector<LimitCycle>& fewer)
{
    std::vector<bool> used(more.size(), false);
    for (const auto& f : fewer) {
        std::size_t best = more.size();
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < more.size(); ++i) {
            const double d = std::abs(more[i].P - f.P);
            if (!used[i] && d < bd) {
                bd = d;
                best = i;
            }
        }
        if (best < more.size()) used[best] = true;
    }
    std::vector<LimitCycle> out;
    for (std::size_t i = 0; i < more.size(); ++i) {
        if (!used[i]) out.push_back(more[i]);
    }
    return out;
}

// Signed distance from the fold nearest to a saddle-node value, or NaN.
double fold_sn_gap(const Slice& s)
{
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const auto& f : s.folds) {
        for (double p : s.sn_P) {
            const double d = f.P - p;
            if (!(std::abs(d) >= std::abs(best))) best = d;
        }
    }
    return best;
}

}  // namespace

FlcCurve trace_flc_curve(const ModelParams& base, const FlcOptions& opt)
{
    if (opt.n_theta < 2 || !(opt.theta_hi > opt.theta_lo)) throw DomainError("trace_flc_curve: bad theta range");
    FlcCurve out;
    out.theta_name = opt.theta_name;

    auto slice_at = [&](double theta) {
        ModelParams p = base;
        set_param(p, opt.theta_name, theta);
        CycleSet cs = cycle_set(p, opt.continuation);
        Slice s{theta, std::move(cs.folds), std::move(cs.sn_P)};
        return s;
    };

    const std::vector<double> grid = linspace(opt.theta_lo, opt.theta_hi, opt.n_theta);
    std::vector<Slice> slices(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { slices[i] = slice_at(grid[i]); });
    std::vector<Slice> extra;
    std::vector<BifurcationPoint> s_candidates;

    for (std::size_t i = 0; i + 1 < slices.size(); ++i) {
        // births and deaths of folds: bisect on the fold count
        if (slices[i].folds.size() != slices[i + 1].folds.size()) {
            Slice lo = slices[i], hi = slices[i + 1];
            while (hi.theta - lo.theta > opt.theta_tol) {
                Slice mid = slice_at(0.5 * (lo.theta + hi.theta));
                extra.push_back(mid);
                if (mid.folds.size() == lo.folds.size()) {
                    lo = std::move(mid);
                } else {
                    hi = std::move(mid);
                }
            }
            const bool born = hi.folds.size() > lo.folds.size();
            const Slice& more = born ? hi : lo;
            const Slice& fewer = born ? lo : hi;
            const auto u = unmatched(more.folds, fewer.folds);
            const double theta = 0.5 * (lo.theta + hi.theta);
            BifurcationPoint bp;
            bp.plane = {opt.theta_name, "P"};
            if (u.size() == 2) {
                const double P = 0.5 * (u[0].P + u[1].P);
                bp.coords = {{opt.theta_name, theta}, {"P", P}};
                bp.diagnostics["pair_gap"] = std::abs(u[0].P - u[1].P);
                bp.diagnostics["period"] = 0.5 * (u[0].period + u[1].period);
                bp.diagnostics["theta_width"] = hi.theta - lo.theta;
                if (born) {
                    bp.kind = BifKind::fold_of_cycles;
                    bp.label = "E";
                    bp.diagnostics["theta_turning"] = 1.0;
                } else {
                    bp.kind = BifKind::cusp_of_cycles;
                    bp.label = "CLC";
                }
                out.points.push_back(std::move(bp));
            } else {
                out.warnings.push_back("fold count changes by " + std::to_string(u.size()) + " near " + opt.theta_name
                                       + " = " + std::to_string(theta)
                                       + "; a single fold usually marks the Bautin or homoclinic end of the curve");
            }
        }
        // S: the fold nearest the saddle-node manifold crosses it
        const double ga = fold_sn_gap(slices[i]), gb = fold_sn_gap(slices[i + 1]);
        if (std::isfinite(ga) && std::isfinite(gb) && std::signbit(ga) != std::signbit(gb)
            && std::abs(ga) < 0.5 && std::abs(gb) < 0.5) {
            Slice lo = slices[i], hi = slices[i + 1];
            double glo = ga;
            while (hi.theta - lo.theta > opt.theta_tol) {
                Slice mid = slice_at(0.5 * (lo.theta + hi.theta));
                const double gm = fold_sn_gap(mid);
                extra.push_back(mid);
                if (!std::isfinite(gm)) break;
                if (std::signbit(gm) == std::signbit(glo)) {
                    lo = std::move(mid);
                    glo = gm;
                } else {
                    hi = std::move(mid);
                }
            }
            BifurcationPoint bp;
            bp.kind = BifKind::snic_candidate;
            bp.label = "S";
            bp.plane = {opt.theta_name, "P"};
            const Slice& s = std::isfinite(fold_sn_gap(hi)) ? hi : lo;
            const double gap = fold_sn_gap(s);
            bp.coords = {{opt.theta_name, 0.5 * (lo.theta + hi.theta)}, {"P", 0.0}};
            double P = 0.0, T = 0.0;
            for (const auto& f : s.folds) {
                for (double p : s.sn_P) {
                    if (f.P - p == gap) {
                        P = p;
                        T = f.period;
                    }
                }
            }
            bp.coords[1].second = P;
            bp.diagnostics["period"] = T;
            bp.diagnostics["fold_sn_gap"] = gap;
            bp.warnings.push_back("located where the fold curve crosses the saddle-node manifold");
            s_candidates.push_back(std::move(bp));
        }
    }

    // the homoclinic end of the fold curve carries the slowest folded cycle;
    // other crossings are projections of unrelated folds onto the SN curve
    if (!s_candidates.empty()) {
        out.points.push_back(*std::max_element(s_candidates.begin(), s_candidates.end(),
                                               [](const BifurcationPoint& a, const BifurcationPoint& b) {
                                                   return a.diagnostics.at("period") < b.diagnostics.at("period");
                                               }));
    }
    slices.insert(slices.end(), extra.begin(), extra.end());
    for (const auto& s : slices) {
        for (const auto& f : s.folds) out.samples.push_back({s.theta, f.P, f.period});
    }
    std::sort(out.samples.begin(), out.samples.end(), [](const FlcSample& a, const FlcSample& b) {
        return a.theta < b.theta || (a.theta == b.theta && a.P < b.P);
    });
    std::stable_sort(out.points.begin(), out.points.end(), [&](const BifurcationPoint& a, const BifurcationPoint& b) {
        return a.coord(opt.theta_name) < b.coord(opt.theta_name);
    });
    return out;
}

}  // namespace neurobif
