#pragma once

// Second and third derivatives of a vector field as multilinear forms,
// by Richardson-extrapolated central differences along directions.

#include <functional>

#include <Eigen/Dense>

#include "neurobif/linalg.hpp"

namespace neurobif {

class MultilinearForms {
public:
    using Field = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

    MultilinearForms(Field f, Eigen::VectorXd x, double step_b = 1e-4, double step_c = 1e-3);

    // B(u, v) = D^2 f(x)[u, v], C(u, v, w) = D^3 f(x)[u, v, w].
    Eigen::VectorXd B(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
    Eigen::VectorXd C(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& w) const;
    // Complex-multilinear extensions.
    CVec B(const CVec& u, const CVec& v) const;
    CVec C(const CVec& u, const CVec& v, const CVec& w) const;

    // Diagonal forms B(u,u) and C(u,u,u).
    Eigen::VectorXd b2(const Eigen::VectorXd& u) const;
    Eigen::VectorXd c3(const Eigen::VectorXd& u) const;

private:
    Eigen::VectorXd b2_raw(const Eigen::VectorXd& u, double h) const;
    Eigen::VectorXd c3_raw(const Eigen::VectorXd& u, double h) const;
    Eigen::VectorXd Cuuw(const Eigen::VectorXd& u, const Eigen::VectorXd& w) const;

    Field f_;
    Eigen::VectorXd x_;
    Eigen::VectorXd f0_;
    double hb_;
    double hc_;
};

}  // namespace neurobif
