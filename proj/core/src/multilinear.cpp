#include "neurobif/multilinear.hpp"

#include <utility>

namespace neurobif {

using Eigen::VectorXd;

MultilinearForms::MultilinearForms(Field f, VectorXd x, double step_b, double step_c)
    : f_(std::move(f)), x_(std::move(x)), hb_(step_b), hc_(step_c)
{
    f0_ = f_(x_);
}

VectorXd MultilinearForms::b2_raw(const VectorXd& u, double h) const
{
    return (f_(x_ + h * u) - 2.0 * f0_ + f_(x_ - h * u)) / (h * h);
}

VectorXd MultilinearForms::c3_raw(const VectorXd& u, double h) const
{
    return (f_(x_ + 2.0 * h * u) - 2.0 * f_(x_ + h * u) + 2.0 * f_(x_ - h * u) - f_(x_ - 2.0 * h * u))
           / (2.0 * h * h * h);
}

// Both stencils are O(h^2); one Richardson step removes that term.
VectorXd MultilinearForms::b2(const VectorXd& u) const
{
    return (4.0 * b2_raw(u, 0.5 * hb_) - b2_raw(u, hb_)) / 3.0;
}

VectorXd MultilinearForms::c3(const VectorXd& u) const
{
    return (4.0 * c3_raw(u, 0.5 * hc_) - c3_raw(u, hc_)) / 3.0;
}

VectorXd MultilinearForms::B(const VectorXd& u, const VectorXd& v) const
{
    return 0.25 * (b2(u + v) - b2(u - v));
}

// C(u,u,w) from c(u+w) - c(u-w) = 6 C(u,u,w) + 2 C(w,w,w)
VectorXd MultilinearForms::Cuuw(const VectorXd& u, const VectorXd& w) const
{
    return (c3(u + w) - c3(u - w) - 2.0 * c3(w)) / 6.0;
}

VectorXd MultilinearForms::C(const VectorXd& u, const VectorXd& v, const VectorXd& w) const
{
    return 0.25 * (Cuuw(u + v, w) - Cuuw(u - v, w));
}

CVec MultilinearForms::B(const CVec& u, const CVec& v) const
{
    const VectorXd ur = u.real(), ui = u.imag(), vr = v.real(), vi = v.imag();
    const VectorXd re = B(ur, vr) - B(ui, vi);
    const VectorXd im = B(ur, vi) + B(ui, vr);
    CVec out(re.size());
    out.real() = re;
    out.imag() = im;
    return out;
}

CVec MultilinearForms::C(const CVec& u, const CVec& v, const CVec& w) const
{
    const VectorXd ur = u.real(), ui = u.imag();
    const VectorXd vr = v.real(), vi = v.imag();
    const VectorXd wr = w.real(), wi = w.imag();
    // (ur + i ui)(vr + i vi)(wr + i wi), expanded term by term
    const VectorXd re = C(ur, vr, wr) - C(ur, vi, wi) - C(ui, vr, wi) - C(ui, vi, wr);
    const VectorXd im = C(ur, vr, wi) + C(ur, vi, wr) + C(ui, vr, wr) - C(ui, vi, wi);
    CVec out(re.size());
    out.real() = re;
    out.imag() = im;
    return out;
}

}  // namespace neurobif
