#include <gtest/gtest.h>

#include <cmath>

#include "neurobif/multilinear.hpp"

using namespace neurobif;

namespace {

// f(x) = (x0^2 x1, sin x0 + x1^3, exp(x2) x0)
Eigen::VectorXd f(const Eigen::VectorXd& x)
{
    Eigen::VectorXd r(3);
    r << x(0) * x(0) * x(1), std::sin(x(0)) + x(1) * x(1) * x(1), std::exp(x(2)) * x(0);
    return r;
}

Eigen::VectorXd B_exact(const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd& v)
{
    Eigen::VectorXd r(3);
    r(0) = 2 * x(1) * u(0) * v(0) + 2 * x(0) * (u(0) * v(1) + u(1) * v(0));
    r(1) = -std::sin(x(0)) * u(0) * v(0) + 6 * x(1) * u(1) * v(1);
    r(2) = std::exp(x(2)) * (x(0) * u(2) * v(2) + u(0) * v(2) + u(2) * v(0));
    return r;
}

Eigen::VectorXd C_exact(const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                        const Eigen::VectorXd& w)
{
    Eigen::VectorXd r(3);
    r(0) = 2 * (u(0) * v(0) * w(1) + u(0) * v(1) * w(0) + u(1) * v(0) * w(0));
    r(1) = -std::cos(x(0)) * u(0) * v(0) * w(0) + 6 * u(1) * v(1) * w(1);
    const double e = std::exp(x(2));
    r(2) = e * (x(0) * u(2) * v(2) * w(2) + u(0) * v(2) * w(2) + u(2) * v(0) * w(2) + u(2) * v(2) * w(0));
    return r;
}

}  // namespace

TEST(Multilinear, ReproducesAnalyticForms)
{
    Eigen::VectorXd x(3), u(3), v(3), w(3);
    x << 0.4, -0.7, 0.3;
    u << 1.0, 0.5, -0.2;
    v << -0.3, 0.8, 0.6;
    w << 0.2, -0.1, 0.9;
    const MultilinearForms F(f, x);
    EXPECT_LT((F.B(u, v) - B_exact(x, u, v)).norm(), 1e-7);
    EXPECT_LT((F.b2(u) - B_exact(x, u, u)).norm(), 1e-7);
    EXPECT_LT((F.C(u, v, w) - C_exact(x, u, v, w)).norm(), 1e-5);
    EXPECT_LT((F.c3(u) - C_exact(x, u, u, u)).norm(), 1e-5);
}

TEST(Multilinear, ComplexExtensionIsBilinear)
{
    Eigen::VectorXd x(3);
    x << 0.1, 0.2, -0.5;
    const MultilinearForms F(f, x);
    CVec q(3);
    q << Complex(1.0, 0.5), Complex(-0.2, 0.3), Complex(0.0, 1.0);
    const Eigen::VectorXd a = q.real(), b = q.imag();
    // B(q, conj q) = B(a,a) + B(b,b) for a real symmetric form.
    const CVec Bqq = F.B(q, CVec(q.conjugate()));
    EXPECT_LT((Bqq.real() - (B_exact(x, a, a) + B_exact(x, b, b))).norm(), 1e-7);
    EXPECT_LT(Bqq.imag().norm(), 1e-7);
}

TEST(Multilinear, SymmetricInArguments)
{
    Eigen::VectorXd x(3), u(3), v(3);
    x << -0.3, 0.9, 0.2;
    u << 0.3, -1.0, 0.4;
    v << 1.1, 0.2, -0.6;
    const MultilinearForms F(f, x);
    EXPECT_LT((F.B(u, v) - F.B(v, u)).norm(), 1e-9);
}
