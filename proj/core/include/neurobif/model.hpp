#pragma once

// Neural mass vector fields: Jansen-Rit (6D), Wendling-Chauvel (10D) and the
// planar degenerate Bogdanov-Takens normal form, together with the
// physical -> dimensionless reductions and the closed-form equilibrium
// manifolds parametrized by the pyramidal potential X.
//
// Time is the dimensionless tau = a * t throughout; only the *Physical*
// structs and the original_* fields use seconds and millivolts.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace neurobif {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ModelKind { jansen_rit, wendling_chauvel, dbt };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

// Dimensionless sigmoid S(x) = 1 / (1 + k0 exp(-x)).
double sigmoid(double x, double k0);
// S'(x) = S(x) (1 - S(x)).
double sigmoid_prime(double x, double k0);

struct PhysicalJRParams {
    double A = 3.25;    // mV
    double B = 22.0;    // mV
    double a = 100.0;   // 1/s
    double b = 50.0;    // 1/s
    std::array<double, 4> alpha{1.0, 0.8, 0.25, 0.25};
    double J = 135.0;
    double v0 = 6.0;      // mV
    double r = 0.56;      // 1/mV
    double nu_max = 5.0;  // 1/s
    double p = 0.0;       // 1/s

    void validate() const;
};

struct PhysicalWCParams {
    double A = 3.25;
    double B = 22.0;
    double C = 20.0;
    double a = 100.0;
    double b = 1.0 / 0.035;
    double c = 1.0 / 0.005;
    std::array<double, 7> alpha{1.0, 0.8, 0.25, 0.25, 0.1, 0.1, 0.8};
    double J = 135.0;
    double v0 = 6.0;
    double r = 0.56;
    double nu_max = 5.0;
    double p = 0.0;

    void validate() const;
};

struct JRParams {
    double j = 12.285;
    double G = 6.7692;
    double d = 0.5;
    std::array<double, 4> alpha{1.0, 0.8, 0.25, 0.25};
    double k0 = std::exp(3.36);
    double P = 0.0;

    void validate() const;
};

struct WCParams {
    double j = 12.285;
    double G1 = 6.76923;
    double G2 = 6.15385;
    double d1 = 0.2857;
    double d2 = 2.0;
    std::array<double, 7> alpha{1.0, 0.8, 0.25, 0.25, 0.1, 0.1, 0.8};
    double k0 = std::exp(3.36);
    double P = 0.0;

    void validate() const;
};

// x' = y, y' = x^2 + alpha + y (beta + gamma x + sign x^3).
struct DBTParams {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 1.0;
    int sign = 1;

    void validate() const;
};

using ModelParams = std::variant<JRParams, WCParams, DBTParams>;

ModelKind kind_of(const ModelParams& params);
int dimension(ModelKind kind);
inline int dimension(const ModelParams& params) { return dimension(kind_of(params)); }

// Parameter swept by the equilibrium parametrization: "P" for the neural
// mass models, "alpha" for the normal form.
std::string_view primary_parameter(ModelKind kind);

// Named access for every dimensionless symbol: j, G, d, alpha1..alpha7,
// G1, G2, d1, d2, k0, log_k0, P, alpha, beta, gamma.
double get_param(const ModelParams& params, std::string_view name);
void set_param(ModelParams& params, std::string_view name, double value);
bool has_param(ModelKind kind, std::string_view name);
std::vector<std::string> param_names(ModelKind kind);

std::vector<std::string> component_names(ModelKind kind);
int component_index(ModelKind kind, std::string_view name);
// Index of the EEG-like coordinate X (x for the normal form).
int x_index(ModelKind kind);

struct StateVector {
    ModelKind model = ModelKind::jansen_rit;
    Vec values;

    double operator[](std::string_view component) const;
};

// Named presets; changing one is a breaking change.
ModelParams preset(std::string_view name);
std::vector<std::string> preset_names();
std::string_view default_preset(ModelKind kind);

JRParams reduce_jr(const PhysicalJRParams& phys);
WCParams reduce_wc(const PhysicalWCParams& phys);

// State maps between the original variables (y0..y5 / y0..y9, physical
// units) and the reduced coordinates. Time maps as tau = a t.
Vec jr_to_reduced(const PhysicalJRParams& phys, const Vec& y);
Vec jr_to_physical(const PhysicalJRParams& phys, const Vec& reduced);
Vec wc_to_reduced(const PhysicalWCParams& phys, const Vec& y);
Vec wc_to_physical(const PhysicalWCParams& phys, const Vec& reduced);

// Right-hand sides of the original systems, in seconds.
void original_jr_field(const PhysicalJRParams& phys, std::span<const double> y, std::span<double> dy);
void original_wc_field(const PhysicalWCParams& phys, std::span<const double> y, std::span<double> dy);

// Reduced vector fields with constant input.
void field(const ModelParams& params, std::span<const double> x, std::span<double> dx);
Vec field(const ModelParams& params, const Vec& x);
Mat jacobian(const ModelParams& params, const Vec& x);
// d field / d primary parameter (the field is affine in it).
Vec primary_parameter_derivative(const ModelParams& params, const Vec& x);

struct Equilibrium {
    StateVector state;
    double P;  // value of the primary parameter at which `state` is an equilibrium
};

Equilibrium equilibrium_from_X(const ModelParams& params, double X);
// Same as equilibrium_from_X but only the input value; cheap inner loop.
double input_from_X(const ModelParams& params, double X);
Mat jacobian_at_X(const ModelParams& params, double X);
// Parameter set with the primary parameter moved to the equilibrium value.
ModelParams with_primary(ModelParams params, double value);

}  // namespace neurobif
