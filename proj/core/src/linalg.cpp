#include "neurobif/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "neurobif/errors.hpp"

namespace neurobif {

Spectrum eigen(const Eigen::MatrixXd& M, bool vectors)
{
    if (M.rows() != M.cols()) {
        throw ContractViolation("eigen: matrix must be square");
    }
    if (M.rows() > 64) {
        throw ContractViolation("eigen: dimension above 64");
    }
    if (!M.allFinite()) {
        throw NumericalFailure("eigen: non-finite matrix entries", M);
    }
    Spectrum out;
    if (M.rows() == 0) {
        return out;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, vectors);
    if (es.info() != Eigen::Success) {
        throw NumericalFailure("eigen: QR iteration did not converge", M);
    }
    const CVec ev = es.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(ev.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (ev(a).real() != ev(b).real()) return ev(a).real() > ev(b).real();
        return ev(a).imag() > ev(b).imag();
    });
    out.eigenvalues.resize(ev.size());
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        out.eigenvalues(k) = ev(order[static_cast<std::size_t>(k)]);
    }
    if (vectors) {
        const CMat V = es.eigenvectors();
        out.vectors.resize(V.rows(), V.cols());
        for (Eigen::Index k = 0; k < ev.size(); ++k) {
            out.vectors.col(k) = V.col(order[static_cast<std::size_t>(k)]);
        }
    }
    return out;
}

namespace {

CVec null_vector(const CMat& A, double* residual)
{
    Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeFullV);
    const Eigen::Index n = A.cols();
    CVec v = svd.matrixV().col(n - 1);
    v.normalize();
    if (residual) {
        *residual = (A * v).norm();
    }
    return v;
}

}  // namespace

CVec eigenvector(const Eigen::MatrixXd& M, Complex lambda, double* residual)
{
    CMat A = M.cast<Complex>();
    A.diagonal().array() -= lambda;
    return null_vector(A, residual);
}

CVec left_eigenvector(const Eigen::MatrixXd& M, Complex lambda, double* residual)
{
    CMat A = M.transpose().cast<Complex>();
    A.diagonal().array() -= std::conj(lambda);
    return null_vector(A, residual);
}

Eigen::VectorXd real_null_vector(const Eigen::MatrixXd& M, double* residual)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    Eigen::VectorXd v = svd.matrixV().col(M.cols() - 1);
    v.normalize();
    if (residual) {
        *residual = (M * v).norm();
    }
    return v;
}

bool is_simple(const CVec& eigenvalues, Eigen::Index k, double matrix_norm)
{
    const double tol = 1e-6 * (1.0 + matrix_norm);
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        if (i != k && std::abs(eigenvalues(i) - eigenvalues(k)) < tol) {
            return false;
        }
    }
    return true;
}

Eigen::MatrixXd bialternate(const Eigen::MatrixXd& A)
{
    const Eigen::Index n = A.rows();
    if (n < 2 || A.cols() != n) {
        throw ContractViolation("bialternate: need a square matrix of size >= 2");
    }
    const Eigen::Index m = n * (n - 1) / 2;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    Eigen::Index row = 0;
    for (Eigen::Index p = 1; p < n; ++p) {
        for (Eigen::Index q = 0; q < p; ++q, ++row) {
            Eigen::Index col = 0;
            for (Eigen::Index r = 1; r < n; ++r) {
                for (Eigen::Index s = 0; s < r; ++s, ++col) {
                    double v = 0.0;
                    if (r == q) {
                        v = -A(p, s);
                    } else if (r != p && s == q) {
                        v = A(p, r);
                    } else if (r == p && s == q) {
                        v = A(p, p) + A(q, q);
                    } else if (r == p && s != q) {
                        v = A(q, s);
                    } else if (s == p) {
                        v = -A(q, r);
                    }
                    out(row, col) = v;
                }
            }
        }
    }
    return out;
}

std::vector<Bracket> bracket_scan(const std::vector<double>& grid, const std::vector<double>& values)
{
    if (grid.size() < 2 || values.size() != grid.size()) {
        throw ContractViolation("bracket_scan: need >= 2 grid points and matching values");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw ContractViolation("bracket_scan: grid must be strictly increasing");
        }
    }
    std::vector<Bracket> out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double f = values[i];
        if (!std::isfinite(f)) continue;
        if (f == 0.0) {
            out.push_back({grid[i], grid[i], 0.0, 0.0});
            continue;
        }
        if (i + 1 < grid.size()) {
            const double g = values[i + 1];
            if (std::isfinite(g) && g != 0.0 && std::signbit(f) != std::signbit(g)) {
                out.push_back({grid[i], grid[i + 1], f, g});
            }
        }
    }
    return out;
}

std::vector<Bracket> bracket_scan(const ScalarFn& f, const std::vector<double>& grid)
{
    std::vector<double> values(grid.size());
    std::transform(grid.begin(), grid.end(), values.begin(), f);
    return bracket_scan(grid, values);
}

DichotomyResult dichotomy(const ScalarFn& f, Bracket b, const DichotomyOptions& opt)
{
    if (b.degenerate()) {
        return {b.lo, 0, 0.0};
    }
    if (!(b.lo < b.hi)) {
        throw ContractViolation("dichotomy_solve: bracket requires lo < hi");
    }
    if (b.f_lo == 0.0 && b.f_hi == 0.0) {
        b.f_lo = f(b.lo);
        b.f_hi = f(b.hi);
    }
    if (b.f_lo == 0.0) return {b.lo, 0, b.hi - b.lo};
    if (b.f_hi == 0.0) return {b.hi, 0, b.hi - b.lo};
    if (std::signbit(b.f_lo) == std::signbit(b.f_hi)) {
        throw ContractViolation("dichotomy_solve: function has the same sign at both bracket ends");
    }
    int it = 0;
    while (b.hi - b.lo > opt.xtol) {
        if (it >= opt.max_iter) {
            throw NoConvergence("dichotomy_solve: iteration cap reached",
                                Eigen::Vector2d(b.lo, b.hi));
        }
        ++it;
        const double mid = 0.5 * (b.lo + b.hi);
        if (mid <= b.lo || mid >= b.hi) break;  // interval at floating-point resolution
        const double fm = f(mid);
        if (fm == 0.0 || std::abs(fm) <= opt.ftol) {
            return {mid, it, b.hi - b.lo};
        }
        if (std::signbit(fm) == std::signbit(b.f_lo)) {
            b.lo = mid;
            b.f_lo = fm;
        } else {
            b.hi = mid;
            b.f_hi = fm;
        }
    }
    double root = 0.5 * (b.lo + b.hi);
    if (opt.secant_polish && std::isfinite(b.f_lo) && std::isfinite(b.f_hi) && b.f_hi != b.f_lo) {
        const double s = b.lo - b.f_lo * (b.hi - b.lo) / (b.f_hi - b.f_lo);
        if (s >= b.lo && s <= b.hi) root = s;
    }
    return {root, it, b.hi - b.lo};
}

Eigen::MatrixXd fd_jacobian(const VecFn& F, const Eigen::VectorXd& x, double step)
{
    const Eigen::VectorXd f0 = F(x);
    Eigen::MatrixXd J(f0.size(), x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double h = step * (1.0 + std::abs(x(k)));
        xp(k) = x(k) + h;
        const Eigen::VectorXd fp = F(xp);
        xp(k) = x(k) - h;
        const Eigen::VectorXd fm = F(xp);
        xp(k) = x(k);
        J.col(k) = (fp - fm) / (2.0 * h);
    }
    return J;
}

Eigen::VectorXd newton_refine(const VecFn& F, const std::optional<MatFn>& jac, Eigen::VectorXd x,
                              const NewtonOptions& opt)
{
    Eigen::VectorXd r = F(x);
    double rn = r.norm();
    for (int it = 0; it < opt.max_iter; ++it) {
        if (!std::isfinite(rn)) break;
        if (rn <= opt.tol) return x;
        const Eigen::MatrixXd J = jac ? (*jac)(x) : fd_jacobian(F, x, opt.fd_step);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible()) {
            throw NumericalFailure("newton_refine: singular Jacobian", J);
        }
        const Eigen::VectorXd dx = lu.solve(-r);
        double t = 1.0;
        Eigen::VectorXd xn;
        Eigen::VectorXd rnew;
        double nn = 0.0;
        int h = 0;
        for (; h <= opt.max_halvings; ++h) {
            xn = x + t * dx;
            rnew = F(xn);
            nn = rnew.norm();
            if (std::isfinite(nn) && nn < rn) break;
            t *= 0.5;
        }
        if (h > opt.max_halvings) {
            // no decrease along the Newton direction; accept full step only if we are at noise level
            throw NoConvergence("newton_refine: residual does not decrease", x);
        }
        x = xn;
        r = rnew;
        rn = nn;
    }
    if (rn <= opt.tol) return x;
    throw NoConvergence("newton_refine: iteration cap reached", x);
}

std::vector<double> linspace(double lo, double hi, int n)
{
    if (n < 2) {
        throw ContractViolation("linspace: need at least 2 points");
    }
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = (i == n - 1) ? hi : lo + (hi - lo) * i / (n - 1);
    }
    return g;
}

}  // namespace neurobif
