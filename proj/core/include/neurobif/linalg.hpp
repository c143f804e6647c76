#pragma once

// Dense kernels used by the bifurcation detectors: eigen-decomposition,
// the bialternate product, bracketing/bisection, and damped Newton.

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace neurobif {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

struct Spectrum {
    CVec eigenvalues;   // sorted by descending real part, ties by descending imag
    // Right eigenvectors (columns), aligned with `eigenvalues`; empty unless requested.
    CMat vectors;
};

// All eigenvalues of a real square matrix (n <= 64). With `vectors`, the
// right eigenvectors too.
Spectrum eigen(const Eigen::MatrixXd& M, bool vectors = false);

// Unit-norm null vector of (M - lambda I) computed from the SVD; residual is
// returned through `residual` when given.
CVec eigenvector(const Eigen::MatrixXd& M, Complex lambda, double* residual = nullptr);
// Left eigenvector: w^H M = lambda w^H, i.e. null vector of (M^T - conj(lambda) I).
CVec left_eigenvector(const Eigen::MatrixXd& M, Complex lambda, double* residual = nullptr);
Eigen::VectorXd real_null_vector(const Eigen::MatrixXd& M, double* residual = nullptr);

// True when no other eigenvalue lies within 1e-6 (1 + ||M||) of eigenvalues[k].
bool is_simple(const CVec& eigenvalues, Eigen::Index k, double matrix_norm);

// 2 M (.) I, rows/cols indexed by pairs (i, j), i > j, in lexicographic order
// (1,0), (2,0), (2,1), (3,0), ... Eigenvalues are lambda_i + lambda_j.
Eigen::MatrixXd bialternate(const Eigen::MatrixXd& M);

struct Bracket {
    double lo = 0.0, hi = 0.0;
    double f_lo = 0.0, f_hi = 0.0;

    bool degenerate() const { return lo == hi; }
};

using ScalarFn = std::function<double(double)>;

// One bracket per sign change between consecutive grid points; an exact zero
// at a grid point yields a degenerate bracket [x, x].
std::vector<Bracket> bracket_scan(const ScalarFn& f, const std::vector<double>& grid);
// Same, from precomputed values.
std::vector<Bracket> bracket_scan(const std::vector<double>& grid, const std::vector<double>& values);

struct DichotomyOptions {
    double xtol = 1e-12;
    double ftol = 0.0;
    int max_iter = 200;
    bool secant_polish = true;
};

struct DichotomyResult {
    double root = 0.0;
    int iterations = 0;
    double width = 0.0;
};

DichotomyResult dichotomy(const ScalarFn& f, Bracket bracket, const DichotomyOptions& opt = {});
inline double dichotomy_solve(const ScalarFn& f, const Bracket& bracket, const DichotomyOptions& opt = {})
{
    return dichotomy(f, bracket, opt).root;
}

using VecFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using MatFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 50;
    double fd_step = 1e-7;
    int max_halvings = 20;
};

// Damped Newton. Without a Jacobian supplier, uses forward differences.
Eigen::VectorXd newton_refine(const VecFn& F, const std::optional<MatFn>& jac, Eigen::VectorXd x0,
                              const NewtonOptions& opt = {});

Eigen::MatrixXd fd_jacobian(const VecFn& F, const Eigen::VectorXd& x, double step = 1e-6);

// Evenly spaced grid, n >= 2 points including both ends.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace neurobif
