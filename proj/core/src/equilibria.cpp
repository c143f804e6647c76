#include "neurobif/equilibria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "neurobif/errors.hpp"
#include "neurobif/multilinear.hpp"
#include "neurobif/parallel.hpp"

namespace neurobif {

namespace {

constexpr std::array<std::string_view, 11> kBifNames{
    "saddle_node",  "hopf_subcritical", "hopf_supercritical", "hopf_degenerate",
    "cusp",         "bogdanov_takens",  "bautin",             "degenerate_bt",
    "fold_of_cycles", "cusp_of_cycles", "snic_candidate",
};

int count_unstable(const CVec& ev)
{
    int n = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i).real() > 1e-9) ++n;
    }
    return n;
}

// Roots of f on `grid` given values there; cells listed in `suspect` without
// a sign change are re-scanned once on a 10x finer grid.
std::vector<double> grid_roots(const ScalarFn& f, const std::vector<double>& grid, const std::vector<double>& values,
                               const std::vector<std::size_t>& suspect, double xtol)
{
    std::vector<Bracket> brackets = bracket_scan(grid, values);
    for (std::size_t cell : suspect) {
        const double lo = grid[cell], hi = grid[cell + 1];
        const bool covered = std::any_of(brackets.begin(), brackets.end(), [&](const Bracket& b) {
            return b.lo >= lo && b.hi <= hi;
        });
        if (covered) continue;
        const auto fine = linspace(lo, hi, 11);
        for (const auto& b : bracket_scan(f, fine)) {
            if (b.degenerate() && (b.lo == lo || b.lo == hi)) continue;  // endpoints already scanned
            brackets.push_back(b);
        }
    }
    std::vector<double> roots;
    DichotomyOptions opt;
    opt.xtol = xtol;
    for (const auto& b : brackets) {
        roots.push_back(dichotomy(f, b, opt).root);
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [&](double a, double b) { return std::abs(a - b) <= 10 * xtol; }),
                roots.end());
    return roots;
}

Eigen::Index hopf_pair_index(const CVec& ev, double imag_tol)
{
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i).imag() <= imag_tol) continue;
        if (best < 0 || std::abs(ev(i).real()) < std::abs(ev(best).real())) best = i;
    }
    return best;
}

}  // namespace

double genuine_hopf_frequency(const Mat& J, double imag_tol)
{
    const CVec ev = eigen(J).eigenvalues;
    const Eigen::Index k = hopf_pair_index(ev, imag_tol);
    if (k < 0) return 0.0;
    const double scale = 1.0 + J.norm();
    const double omega = ev(k).imag();
    if (std::abs(ev(k).real()) > 1e-6 * scale) return 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (i == k) continue;
        if (std::abs(ev(i) - std::conj(ev(k))) < 1e-9 * scale) continue;  // the conjugate partner
        if (std::abs(ev(i).real()) < imag_tol) return 0.0;
    }
    return omega;
}

std::string_view to_string(BifKind kind)
{
    return kBifNames[static_cast<std::size_t>(kind)];
}

BifKind bif_kind_from_string(std::string_view name)
{
    for (std::size_t i = 0; i < kBifNames.size(); ++i) {
        if (kBifNames[i] == name) return static_cast<BifKind>(i);
    }
    throw ConfigError("kind", "unknown bifurcation kind '" + std::string(name) + "'");
}

bool is_hopf(BifKind kind)
{
    return kind == BifKind::hopf_subcritical || kind == BifKind::hopf_supercritical
           || kind == BifKind::hopf_degenerate;
}

double BifurcationPoint::coord(std::string_view name) const
{
    for (const auto& [k, v] : coords) {
        if (k == name) return v;
    }
    throw ContractViolation("BifurcationPoint: no coordinate '" + std::string(name) + "'");
}

bool BifurcationPoint::has_coord(std::string_view name) const
{
    return std::any_of(coords.begin(), coords.end(), [&](const auto& c) { return c.first == name; });
}

SweepRange default_sweep(ModelKind kind)
{
    switch (kind) {
    case ModelKind::jansen_rit: return {-12.0, 20.0, 2000};
    case ModelKind::wendling_chauvel: return {-12.0, 25.0, 3000};
    case ModelKind::dbt: return {-4.0, 4.0, 801};
    }
    return {};
}

EquilibriumBranch sweep_branch(const ModelParams& params, const SweepRange& range)
{
    if (range.n < 2 || !std::isfinite(range.lo) || !std::isfinite(range.hi) || !(range.lo < range.hi)) {
        throw ContractViolation("sweep_branch: need n >= 2 and a finite range lo < hi");
    }
    EquilibriumBranch branch;
    branch.model = kind_of(params);
    branch.params = params;
    const auto grid = linspace(range.lo, range.hi, range.n);
    branch.samples.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        BranchSample& s = branch.samples[i];
        s.X = grid[i];
        const Equilibrium eq = equilibrium_from_X(params, s.X);
        s.P = eq.P;
        s.state = eq.state.values;
        try {
            s.eigenvalues = eigen(jacobian(with_primary(params, eq.P), s.state)).eigenvalues;
            s.n_unstable = count_unstable(s.eigenvalues);
            s.stable = s.n_unstable == 0;
        } catch (const NumericalFailure&) {
            s.failed = true;
        }
    });
    return branch;
}

double sn_test(const ModelParams& params, double X)
{
    return jacobian_at_X(params, X).determinant();
}

double hopf_test(const ModelParams& params, double X)
{
    return bialternate(jacobian_at_X(params, X)).partialPivLu().determinant();
}

std::function<Vec(const Vec&)> field_function(const ModelParams& params)
{
    return [params](const Vec& x) { return field(params, x); };
}

HopfData first_lyapunov(const std::function<Vec(const Vec&)>& f, const Vec& x, const Mat& A, double omega)
{
    if (!(omega > 0.0)) {
        throw DomainError("first_lyapunov: omega must be positive");
    }
    HopfData out;
    out.omega = omega;
    const Eigen::Index n = A.rows();
    const Complex iw(0.0, omega);
    CVec q = eigenvector(A, iw);
    CVec p = left_eigenvector(A, iw);  // A^T p = -i omega p
    const Complex pq = p.dot(q);       // conj(p)^T q
    if (std::abs(pq) < 1e-12) {
        throw NumericalFailure("first_lyapunov: critical eigenvectors are orthogonal", A);
    }
    p /= std::conj(pq);  // now p.dot(q) == 1

    const CVec ev = eigen(A).eigenvalues;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i) - iw) < 1e-6 * (1 + omega) || std::abs(ev(i) + iw) < 1e-6 * (1 + omega)) continue;
        if (std::abs(ev(i)) < 1e-4) out.warnings.emplace_back("near-resonance: eigenvalue near 0");
        if (std::abs(ev(i) - 2.0 * iw) < 1e-4 || std::abs(ev(i) + 2.0 * iw) < 1e-4) {
            out.warnings.emplace_back("near-resonance: eigenvalue near +-2i omega");
        }
    }

    const MultilinearForms forms(f, x);
    const CVec qb = q.conjugate();
    const CVec Bqqb = forms.B(q, qb);
    const CVec Bqq = forms.B(q, q);
    const CMat Ac = A.cast<Complex>();
    const CVec a = Ac.partialPivLu().solve(Bqqb);
    CMat R = CMat::Identity(n, n) * (2.0 * iw) - Ac;
    const CVec b = R.partialPivLu().solve(Bqq);
    const Complex val = p.dot(forms.C(q, q, qb)) - 2.0 * p.dot(forms.B(q, a)) + p.dot(forms.B(qb, b));
    out.l1 = val.real() / (2.0 * omega);
    return out;
}

HopfData first_lyapunov(const ModelParams& params, double X, double omega)
{
    const Equilibrium eq = equilibrium_from_X(params, X);
    const ModelParams at = with_primary(params, eq.P);
    return first_lyapunov(field_function(at), eq.state.values, jacobian(at, eq.state.values), omega);
}

SaddleNodeData saddle_node_data(const ModelParams& params, double X)
{
    const Equilibrium eq = equilibrium_from_X(params, X);
    const ModelParams at = with_primary(params, eq.P);
    const Vec& x = eq.state.values;
    const Mat J = jacobian(at, x);
    const CVec ev = eigen(J).eigenvalues;
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(ev.size()));
    for (Eigen::Index i = 0; i < ev.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return std::abs(ev(a)) < std::abs(ev(b)); });

    SaddleNodeData d;
    d.lambda0 = ev(idx[0]).real();
    d.lambda2 = ev.size() > 1 ? ev(idx[1]).real() : 0.0;
    d.lambda2_imag = ev.size() > 1 ? std::abs(ev(idx[1]).imag()) : 0.0;
    d.simple = is_simple(ev, idx[0], J.norm());

    Vec v = real_null_vector(J);
    if (v(x_index(kind_of(params))) < 0) v = -v;
    Vec w = real_null_vector(J.transpose());
    const Vec fp = primary_parameter_derivative(at, x);
    if (w.dot(fp) < 0) w = -w;
    d.sn2 = w.dot(fp);
    d.wv = w.dot(v);
    const MultilinearForms forms(field_function(at), x);
    d.sn3 = w.dot(forms.b2(v));
    return d;
}

namespace {

std::vector<std::size_t> stability_change_cells(const EquilibriumBranch& branch)
{
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i + 1 < branch.samples.size(); ++i) {
        const auto& a = branch.samples[i];
        const auto& b = branch.samples[i + 1];
        if (!a.failed && !b.failed && a.n_unstable != b.n_unstable) cells.push_back(i);
    }
    return cells;
}

std::vector<double> branch_grid(const EquilibriumBranch& branch)
{
    std::vector<double> g;
    g.reserve(branch.samples.size());
    for (const auto& s : branch.samples) g.push_back(s.X);
    return g;
}

std::vector<double> eval_parallel(const std::vector<double>& grid, const ScalarFn& f)
{
    std::vector<double> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { out[i] = f(grid[i]); });
    return out;
}

std::string primary_name(const ModelParams& p)
{
    return std::string(primary_parameter(kind_of(p)));
}

}  // namespace

std::vector<BifurcationPoint> detect_saddle_nodes(const EquilibriumBranch& branch, const DetectOptions& opt)
{
    if (branch.samples.size() < 2) {
        throw ContractViolation("detect_saddle_nodes: branch needs at least 2 samples");
    }
    const ModelParams& params = branch.params;
    const ScalarFn f = [&](double X) { return sn_test(params, X); };
    const auto grid = branch_grid(branch);
    const auto roots = grid_roots(f, grid, eval_parallel(grid, f), stability_change_cells(branch), opt.xtol);
    std::vector<BifurcationPoint> out;
    const std::string pname = primary_name(params);
    for (double X : roots) {
        const SaddleNodeData d = saddle_node_data(params, X);
        BifurcationPoint bp;
        bp.kind = BifKind::saddle_node;
        bp.plane = {pname};
        bp.coords = {{pname, input_from_X(params, X)}, {"X", X}};
        bp.diagnostics = {{"lambda0", d.lambda0}, {"lambda2", d.lambda2}, {"sn2", d.sn2}, {"sn3", d.sn3}, {"wv", d.wv}};
        if (!d.simple) bp.warnings.emplace_back("zero eigenvalue is not simple");
        if (std::abs(d.sn2) <= opt.sn2_tol || std::abs(d.sn3) <= opt.sn3_tol) {
            bp.diagnostics["degenerate"] = 1.0;
            bp.warnings.emplace_back("degenerate fold (cusp or Bogdanov-Takens candidate)");
        }
        out.push_back(std::move(bp));
    }
    return out;
}

std::vector<BifurcationPoint> detect_hopf(const EquilibriumBranch& branch, const DetectOptions& opt)
{
    if (branch.samples.size() < 2) {
        throw ContractViolation("detect_hopf: branch needs at least 2 samples");
    }
    const ModelParams& params = branch.params;
    const ScalarFn f = [&](double X) { return hopf_test(params, X); };
    const auto grid = branch_grid(branch);
    const auto roots = grid_roots(f, grid, eval_parallel(grid, f), stability_change_cells(branch), opt.xtol);
    std::vector<BifurcationPoint> out;
    const std::string pname = primary_name(params);
    for (double X : roots) {
        const Mat J = jacobian_at_X(params, X);
        const double omega = genuine_hopf_frequency(J, opt.imag_tol);
        if (omega <= 0.0) continue;  // neutral saddle or no imaginary pair

        BifurcationPoint bp;
        bp.plane = {pname};
        bp.coords = {{pname, input_from_X(params, X)}, {"X", X}};
        bp.diagnostics["omega"] = omega;

        // transversality d Re(lambda)/dP along the manifold
        const double h = 1e-5;
        auto re_near = [&](double Xs) {
            const CVec ev = eigen(jacobian_at_X(params, Xs)).eigenvalues;
            Eigen::Index best = 0;
            for (Eigen::Index i = 1; i < ev.size(); ++i) {
                if (std::abs(ev(i) - Complex(0, omega)) < std::abs(ev(best) - Complex(0, omega))) best = i;
            }
            return ev(best).real();
        };
        const double dP = input_from_X(params, X + h) - input_from_X(params, X - h);
        const double dre = re_near(X + h) - re_near(X - h);
        bp.diagnostics["transversality"] = dP != 0.0 ? dre / dP : std::numeric_limits<double>::infinity();

        if (opt.lyapunov) {
            const HopfData hd = first_lyapunov(params, X, omega);
            bp.diagnostics["l1"] = hd.l1;
            bp.warnings = hd.warnings;
            if (hd.l1 < -opt.l1_tol) bp.kind = BifKind::hopf_supercritical;
            else if (hd.l1 > opt.l1_tol) bp.kind = BifKind::hopf_subcritical;
            else bp.kind = BifKind::hopf_degenerate;
        } else {
            bp.kind = BifKind::hopf_degenerate;
        }
        out.push_back(std::move(bp));
    }
    return out;
}

std::vector<double> saddle_node_roots(const ModelParams& params, const SweepRange& range, double xtol)
{
    const auto grid = linspace(range.lo, range.hi, range.n);
    const ScalarFn f = [&](double X) { return sn_test(params, X); };
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = f(grid[i]);
    return grid_roots(f, grid, values, {}, xtol);
}

std::vector<HopfRoot> hopf_roots(const ModelParams& params, const SweepRange& range, double xtol, double imag_tol)
{
    const auto grid = linspace(range.lo, range.hi, range.n);
    const ScalarFn f = [&](double X) { return hopf_test(params, X); };
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = f(grid[i]);
    std::vector<HopfRoot> out;
    for (double X : grid_roots(f, grid, values, {}, xtol)) {
        const double omega = genuine_hopf_frequency(jacobian_at_X(params, X), imag_tol);
        if (omega > 0.0) out.push_back({X, omega});
    }
    return out;
}

Codim1Report codim1_report(const ModelParams& params, const SweepRange& range, const DetectOptions& opt)
{
    Codim1Report rep;
    rep.branch = sweep_branch(params, range);
    rep.points = detect_saddle_nodes(rep.branch, opt);
    auto hopf = detect_hopf(rep.branch, opt);
    rep.points.insert(rep.points.end(), hopf.begin(), hopf.end());
    const std::string pname = primary_name(params);
    std::stable_sort(rep.points.begin(), rep.points.end(), [&](const BifurcationPoint& a, const BifurcationPoint& b) {
        return a.coord(pname) < b.coord(pname);
    });
    return rep;
}

}  // namespace neurobif
