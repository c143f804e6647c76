#include "neurobif/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "neurobif/errors.hpp"

namespace neurobif {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* what)
{
    if (!ok) {
        throw DomainError(what);
    }
}

void check_dim(const ModelParams& params, std::size_t n)
{
    if (static_cast<int>(n) != dimension(params)) {
        throw ContractViolation("state dimension " + std::to_string(n) + " does not match model "
                                + std::string(to_string(kind_of(params))));
    }
}

// Parses "alphaN" into N (1-based); returns 0 when `name` is not of that form.
int alpha_slot(std::string_view name)
{
    if (name.size() != 6 || name.substr(0, 5) != "alpha") {
        return 0;
    }
    const char c = name[5];
    return (c >= '1' && c <= '9') ? c - '0' : 0;
}

[[noreturn]] void unknown_param(ModelKind kind, std::string_view name)
{
    throw ConfigError("params." + std::string(name),
                      "unknown parameter for model " + std::string(to_string(kind)));
}

}  // namespace

std::string_view to_string(ModelKind kind)
{
    switch (kind) {
    case ModelKind::jansen_rit: return "jr";
    case ModelKind::wendling_chauvel: return "wc";
    case ModelKind::dbt: return "dbt";
    }
    return "?";
}

ModelKind model_kind_from_string(std::string_view name)
{
    if (name == "jr") return ModelKind::jansen_rit;
    if (name == "wc") return ModelKind::wendling_chauvel;
    if (name == "dbt") return ModelKind::dbt;
    throw ConfigError("model", "unknown model '" + std::string(name) + "' (expected jr, wc or dbt)");
}

double sigmoid(double x, double k0)
{
    if (!std::isfinite(x) || !(k0 > 0.0) || !std::isfinite(k0)) {
        throw DomainError("sigmoid: requires finite x and k0 > 0");
    }
    return 1.0 / (1.0 + k0 * std::exp(-x));
}

double sigmoid_prime(double x, double k0)
{
    if (!std::isfinite(x) || !(k0 > 0.0) || !std::isfinite(k0)) {
        throw DomainError("sigmoid_prime: requires finite x and k0 > 0");
    }
    const double e = k0 * std::exp(-x);
    if (!std::isfinite(e)) {
        return 0.0;
    }
    const double s = 1.0 / (1.0 + e);
    // 1 - s == e s without cancellation
    return s * (e * s);
}

void PhysicalJRParams::validate() const
{
    require(a > 0 && b > 0, "PhysicalJRParams: rate constants must be positive");
    require(r > 0 && nu_max > 0, "PhysicalJRParams: sigmoid slope and nu_max must be positive");
    require(A > 0 && B > 0, "PhysicalJRParams: PSP amplitudes must be positive");
    require(J >= 0, "PhysicalJRParams: J must be non-negative");
}

void PhysicalWCParams::validate() const
{
    require(a > 0 && b > 0 && c > 0, "PhysicalWCParams: rate constants must be positive");
    require(r > 0 && nu_max > 0, "PhysicalWCParams: sigmoid slope and nu_max must be positive");
    require(A > 0 && B > 0 && C > 0, "PhysicalWCParams: PSP amplitudes must be positive");
    require(J >= 0, "PhysicalWCParams: J must be non-negative");
}

void JRParams::validate() const
{
    require(j >= 0, "JRParams: j must be non-negative");
    require(G > 0 && d > 0 && k0 > 0, "JRParams: G, d and k0 must be positive");
}

void WCParams::validate() const
{
    require(j >= 0, "WCParams: j must be non-negative");
    require(G1 > 0 && G2 > 0 && d1 > 0 && d2 > 0 && k0 > 0, "WCParams: G1, G2, d1, d2, k0 must be positive");
    require(alpha[5] != 0.0, "WCParams: alpha6 must be non-zero");
}

void DBTParams::validate() const
{
    require(sign == 1 || sign == -1, "DBTParams: sign must be +1 or -1");
}

ModelKind kind_of(const ModelParams& params)
{
    return std::visit(overloaded{
                          [](const JRParams&) { return ModelKind::jansen_rit; },
                          [](const WCParams&) { return ModelKind::wendling_chauvel; },
                          [](const DBTParams&) { return ModelKind::dbt; },
                      },
                      params);
}

int dimension(ModelKind kind)
{
    switch (kind) {
    case ModelKind::jansen_rit: return 6;
    case ModelKind::wendling_chauvel: return 10;
    case ModelKind::dbt: return 2;
    }
    return 0;
}

std::string_view primary_parameter(ModelKind kind)
{
    return kind == ModelKind::dbt ? "alpha" : "P";
}

double get_param(const ModelParams& params, std::string_view name)
{
    const ModelKind kind = kind_of(params);
    return std::visit(
        overloaded{
            [&](const JRParams& p) -> double {
                if (name == "j") return p.j;
                if (name == "G") return p.G;
                if (name == "d") return p.d;
                if (name == "k0") return p.k0;
                if (name == "log_k0") return std::log(p.k0);
                if (name == "P") return p.P;
                if (const int s = alpha_slot(name); s >= 1 && s <= 4) return p.alpha[s - 1];
                unknown_param(kind, name);
            },
            [&](const WCParams& p) -> double {
                if (name == "j") return p.j;
                if (name == "G1") return p.G1;
                if (name == "G2") return p.G2;
                if (name == "d1") return p.d1;
                if (name == "d2") return p.d2;
                if (name == "k0") return p.k0;
                if (name == "log_k0") return std::log(p.k0);
                if (name == "P") return p.P;
                if (const int s = alpha_slot(name); s >= 1 && s <= 7) return p.alpha[s - 1];
                unknown_param(kind, name);
            },
            [&](const DBTParams& p) -> double {
                if (name == "alpha") return p.alpha;
                if (name == "beta") return p.beta;
                if (name == "gamma") return p.gamma;
                if (name == "sign") return p.sign;
                unknown_param(kind, name);
            },
        },
        params);
}

void set_param(ModelParams& params, std::string_view name, double value)
{
    const ModelKind kind = kind_of(params);
    std::visit(overloaded{
                   [&](JRParams& p) {
                       if (name == "j") p.j = value;
                       else if (name == "G") p.G = value;
                       else if (name == "d") p.d = value;
                       else if (name == "k0") p.k0 = value;
                       else if (name == "log_k0") p.k0 = std::exp(value);
                       else if (name == "P") p.P = value;
                       else if (const int s = alpha_slot(name); s >= 1 && s <= 4) p.alpha[s - 1] = value;
                       else unknown_param(kind, name);
                   },
                   [&](WCParams& p) {
                       if (name == "j") p.j = value;
                       else if (name == "G1") p.G1 = value;
                       else if (name == "G2") p.G2 = value;
                       else if (name == "d1") p.d1 = value;
                       else if (name == "d2") p.d2 = value;
                       else if (name == "k0") p.k0 = value;
                       else if (name == "log_k0") p.k0 = std::exp(value);
                       else if (name == "P") p.P = value;
                       else if (const int s = alpha_slot(name); s >= 1 && s <= 7) p.alpha[s - 1] = value;
                       else unknown_param(kind, name);
                   },
                   [&](DBTParams& p) {
                       if (name == "alpha") p.alpha = value;
                       else if (name == "beta") p.beta = value;
                       else if (name == "gamma") p.gamma = value;
                       else if (name == "sign") {
                           if (value != 1.0 && value != -1.0) {
                               throw ConfigError("params.sign", "sign must be +1 or -1");
                           }
                           p.sign = static_cast<int>(value);
                       } else unknown_param(kind, name);
                   },
               },
               params);
}

std::vector<std::string> param_names(ModelKind kind)
{
    switch (kind) {
    case ModelKind::jansen_rit:
        return {"j", "G", "d", "alpha1", "alpha2", "alpha3", "alpha4", "k0", "log_k0", "P"};
    case ModelKind::wendling_chauvel:
        return {"j",      "G1",     "G2",     "d1",     "d2", "alpha1", "alpha2", "alpha3",
                "alpha4", "alpha5", "alpha6", "alpha7", "k0", "log_k0", "P"};
    case ModelKind::dbt:
        return {"alpha", "beta", "gamma", "sign"};
    }
    return {};
}

bool has_param(ModelKind kind, std::string_view name)
{
    const auto names = param_names(kind);
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::vector<std::string> component_names(ModelKind kind)
{
    switch (kind) {
    case ModelKind::jansen_rit: return {"Y0", "X", "Y2", "Y3", "Y4", "Y5"};
    case ModelKind::wendling_chauvel: return {"Y0", "X", "Y2", "Y3", "Z", "Y5", "Y6", "Y7", "Y8", "Y9"};
    case ModelKind::dbt: return {"x", "y"};
    }
    return {};
}

int component_index(ModelKind kind, std::string_view name)
{
    const auto names = component_names(kind);
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw ContractViolation("unknown state component '" + std::string(name) + "'");
    }
    return static_cast<int>(it - names.begin());
}

int x_index(ModelKind kind)
{
    return kind == ModelKind::dbt ? 0 : 1;
}

double StateVector::operator[](std::string_view component) const
{
    return values(component_index(model, component));
}

ModelParams preset(std::string_view name)
{
    if (name == "jr-default") return JRParams{};
    if (name == "wc-default") return WCParams{};
    if (name == "dbt-default") return DBTParams{};
    throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names()
{
    return {"jr-default", "wc-default", "dbt-default"};
}

std::string_view default_preset(ModelKind kind)
{
    switch (kind) {
    case ModelKind::jansen_rit: return "jr-default";
    case ModelKind::wendling_chauvel: return "wc-default";
    case ModelKind::dbt: return "dbt-default";
    }
    return "";
}

// ---------------------------------------------------------------------------
// Reductions

JRParams reduce_jr(const PhysicalJRParams& phys)
{
    phys.validate();
    JRParams out;
    out.j = phys.r * phys.A * (phys.nu_max / phys.a) * phys.J;
    out.G = phys.B / phys.A;
    out.d = phys.b / phys.a;
    out.alpha = phys.alpha;
    out.k0 = std::exp(phys.r * phys.v0);
    out.P = phys.r * phys.A / phys.a * phys.p;
    return out;
}

WCParams reduce_wc(const PhysicalWCParams& phys)
{
    phys.validate();
    WCParams out;
    out.j = phys.r * phys.A * (phys.nu_max / phys.a) * phys.J;
    out.G1 = phys.B / phys.A;
    out.G2 = phys.C / phys.A;
    out.d1 = phys.b / phys.a;
    out.d2 = phys.c / phys.a;
    out.alpha = phys.alpha;
    out.k0 = std::exp(phys.r * phys.v0);
    out.P = phys.r * phys.A / phys.a * phys.p;
    return out;
}

Vec jr_to_reduced(const PhysicalJRParams& phys, const Vec& y)
{
    if (y.size() != 6) throw ContractViolation("jr_to_reduced: expected 6 components");
    const double Jr = phys.J * phys.r;
    Vec out(6);
    out << Jr * y(0), phys.r * (y(1) - y(2)), phys.r * y(2), Jr * y(3) / phys.a, phys.r * y(4) / phys.a,
        phys.r * y(5) / phys.a;
    return out;
}

Vec jr_to_physical(const PhysicalJRParams& phys, const Vec& Y)
{
    if (Y.size() != 6) throw ContractViolation("jr_to_physical: expected 6 components");
    const double Jr = phys.J * phys.r;
    Vec out(6);
    out << Y(0) / Jr, (Y(1) + Y(2)) / phys.r, Y(2) / phys.r, phys.a * Y(3) / Jr, phys.a * Y(4) / phys.r,
        phys.a * Y(5) / phys.r;
    return out;
}

Vec wc_to_reduced(const PhysicalWCParams& phys, const Vec& y)
{
    if (y.size() != 10) throw ContractViolation("wc_to_reduced: expected 10 components");
    const double r = phys.r;
    const double Jr = phys.J * r;
    const double a = phys.a;
    const auto& al = phys.alpha;
    Vec out(10);
    out(0) = Jr * y(0);
    out(1) = r * (y(1) - y(2) - y(3));
    out(2) = r * y(2);
    out(3) = r * y(3);
    out(4) = al[4] * Jr * y(0) - al[5] * Jr * y(4);
    out(5) = Jr * y(5) / a;
    out(6) = r * y(6) / a;
    out(7) = r * y(7) / a;
    out(8) = r * y(8) / a;
    out(9) = Jr * y(9) / a;
    return out;
}

Vec wc_to_physical(const PhysicalWCParams& phys, const Vec& Y)
{
    if (Y.size() != 10) throw ContractViolation("wc_to_physical: expected 10 components");
    const double r = phys.r;
    const double Jr = phys.J * r;
    const double a = phys.a;
    const auto& al = phys.alpha;
    Vec out(10);
    out(0) = Y(0) / Jr;
    out(1) = (Y(1) + Y(2) + Y(3)) / r;
    out(2) = Y(2) / r;
    out(3) = Y(3) / r;
    out(4) = (al[4] * Y(0) - Y(4)) / (al[5] * Jr);
    out(5) = a * Y(5) / Jr;
    out(6) = a * Y(6) / r;
    out(7) = a * Y(7) / r;
    out(8) = a * Y(8) / r;
    out(9) = a * Y(9) / Jr;
    return out;
}

namespace {

double physical_sigmoid(double v, double nu_max, double r, double v0)
{
    return nu_max / (1.0 + std::exp(r * (v0 - v)));
}

}  // namespace

void original_jr_field(const PhysicalJRParams& ph, std::span<const double> y, std::span<double> dy)
{
    if (y.size() != 6 || dy.size() != 6) throw ContractViolation("original_jr_field: expected 6 components");
    const auto sig = [&](double v) { return physical_sigmoid(v, ph.nu_max, ph.r, ph.v0); };
    const double J1 = ph.alpha[0] * ph.J, J2 = ph.alpha[1] * ph.J;
    const double J3 = ph.alpha[2] * ph.J, J4 = ph.alpha[3] * ph.J;
    const double a = ph.a, b = ph.b;
    dy[0] = y[3];
    dy[1] = y[4];
    dy[2] = y[5];
    dy[3] = ph.A * a * sig(y[1] - y[2]) - 2 * a * y[3] - a * a * y[0];
    dy[4] = ph.A * a * (ph.p + J2 * sig(J1 * y[0])) - 2 * a * y[4] - a * a * y[1];
    dy[5] = ph.B * b * J4 * sig(J3 * y[0]) - 2 * b * y[5] - b * b * y[2];
}

void original_wc_field(const PhysicalWCParams& ph, std::span<const double> y, std::span<double> dy)
{
    if (y.size() != 10 || dy.size() != 10) throw ContractViolation("original_wc_field: expected 10 components");
    const auto sig = [&](double v) { return physical_sigmoid(v, ph.nu_max, ph.r, ph.v0); };
    std::array<double, 7> Jn{};
    for (std::size_t i = 0; i < 7; ++i) Jn[i] = ph.alpha[i] * ph.J;
    const double a = ph.a, b = ph.b, c = ph.c;
    dy[0] = y[5];
    dy[5] = ph.A * a * sig(y[1] - y[2] - y[3]) - 2 * a * y[5] - a * a * y[0];
    dy[1] = y[6];
    dy[6] = ph.A * a * (ph.p + Jn[1] * sig(Jn[0] * y[0])) - 2 * a * y[6] - a * a * y[1];
    dy[2] = y[7];
    dy[7] = ph.B * b * Jn[3] * sig(Jn[2] * y[0]) - 2 * b * y[7] - b * b * y[2];
    dy[3] = y[8];
    dy[8] = ph.C * c * Jn[6] * sig(Jn[4] * y[0] - Jn[5] * y[4]) - 2 * c * y[8] - c * c * y[3];
    dy[4] = y[9];
    dy[9] = ph.B * b * sig(Jn[2] * y[0]) - 2 * b * y[9] - b * b * y[4];
}

// ---------------------------------------------------------------------------
// Reduced fields

namespace {

void jr_field(const JRParams& p, std::span<const double> x, std::span<double> dx)
{
    const double Y0 = x[0], X = x[1], Y2 = x[2], Y3 = x[3], Y4 = x[4], Y5 = x[5];
    const auto& al = p.alpha;
    dx[0] = Y3;
    dx[1] = Y4 - Y5;
    dx[2] = Y5;
    dx[3] = p.j * sigmoid(X, p.k0) - 2.0 * Y3 - Y0;
    dx[4] = p.P + al[1] * p.j * sigmoid(al[0] * Y0, p.k0) - 2.0 * Y4 - (Y2 + X);
    dx[5] = p.d * al[3] * p.G * p.j * sigmoid(al[2] * Y0, p.k0) - 2.0 * p.d * Y5 - p.d * p.d * Y2;
}

void wc_field(const WCParams& p, std::span<const double> x, std::span<double> dx)
{
    const double Y0 = x[0], X = x[1], Y2 = x[2], Y3 = x[3], Z = x[4];
    const double Y5 = x[5], Y6 = x[6], Y7 = x[7], Y8 = x[8], Y9 = x[9];
    const auto& al = p.alpha;
    const double s3 = sigmoid(al[2] * Y0, p.k0);
    dx[0] = Y5;
    dx[1] = Y6 - Y7 - Y8;
    dx[2] = Y7;
    dx[3] = Y8;
    dx[4] = al[4] * Y5 - al[5] * Y9;
    dx[5] = p.j * sigmoid(X, p.k0) - 2.0 * Y5 - Y0;
    dx[6] = p.j * al[1] * sigmoid(al[0] * Y0, p.k0) - 2.0 * Y6 - (X + Y2 + Y3) + p.P;
    dx[7] = p.j * p.d1 * p.G1 * al[3] * s3 - 2.0 * p.d1 * Y7 - p.d1 * p.d1 * Y2;
    dx[8] = p.j * p.d2 * p.G2 * al[6] * sigmoid(Z, p.k0) - 2.0 * p.d2 * Y8 - p.d2 * p.d2 * Y3;
    dx[9] = p.j * p.d1 * p.G1 * s3 - 2.0 * p.d1 * Y9 - p.d1 * p.d1 * (al[4] * Y0 - Z) / al[5];
}

void dbt_field(const DBTParams& p, std::span<const double> x, std::span<double> dx)
{
    const double u = x[0], v = x[1];
    dx[0] = v;
    dx[1] = u * u + p.alpha + v * (p.beta + p.gamma * u + p.sign * u * u * u);
}

Mat jr_jacobian(const JRParams& p, const Vec& x)
{
    const auto& al = p.alpha;
    Mat M = Mat::Zero(6, 6);
    M(0, 3) = 1.0;
    M(1, 4) = 1.0;
    M(1, 5) = -1.0;
    M(2, 5) = 1.0;
    M(3, 0) = -1.0;
    M(3, 1) = p.j * sigmoid_prime(x(1), p.k0);
    M(3, 3) = -2.0;
    M(4, 0) = al[1] * p.j * al[0] * sigmoid_prime(al[0] * x(0), p.k0);
    M(4, 1) = -1.0;
    M(4, 2) = -1.0;
    M(4, 4) = -2.0;
    M(5, 0) = p.d * al[3] * p.G * p.j * al[2] * sigmoid_prime(al[2] * x(0), p.k0);
    M(5, 2) = -p.d * p.d;
    M(5, 5) = -2.0 * p.d;
    return M;
}

Mat wc_jacobian(const WCParams& p, const Vec& x)
{
    const auto& al = p.alpha;
    const double sp3 = sigmoid_prime(al[2] * x(0), p.k0);
    Mat M = Mat::Zero(10, 10);
    M(0, 5) = 1.0;
    M(1, 6) = 1.0;
    M(1, 7) = -1.0;
    M(1, 8) = -1.0;
    M(2, 7) = 1.0;
    M(3, 8) = 1.0;
    M(4, 5) = al[4];
    M(4, 9) = -al[5];
    M(5, 0) = -1.0;
    M(5, 1) = p.j * sigmoid_prime(x(1), p.k0);
    M(5, 5) = -2.0;
    M(6, 0) = p.j * al[1] * al[0] * sigmoid_prime(al[0] * x(0), p.k0);
    M(6, 1) = -1.0;
    M(6, 2) = -1.0;
    M(6, 3) = -1.0;
    M(6, 6) = -2.0;
    M(7, 0) = p.j * p.d1 * p.G1 * al[3] * al[2] * sp3;
    M(7, 2) = -p.d1 * p.d1;
    M(7, 7) = -2.0 * p.d1;
    M(8, 4) = p.j * p.d2 * p.G2 * al[6] * sigmoid_prime(x(4), p.k0);
    M(8, 3) = -p.d2 * p.d2;
    M(8, 8) = -2.0 * p.d2;
    M(9, 0) = p.j * p.d1 * p.G1 * al[2] * sp3 - p.d1 * p.d1 * al[4] / al[5];
    M(9, 4) = p.d1 * p.d1 / al[5];
    M(9, 9) = -2.0 * p.d1;
    return M;
}

Mat dbt_jacobian(const DBTParams& p, const Vec& x)
{
    const double u = x(0), v = x(1);
    Mat M(2, 2);
    M(0, 0) = 0.0;
    M(0, 1) = 1.0;
    M(1, 0) = 2.0 * u + v * (p.gamma + 3.0 * p.sign * u * u);
    M(1, 1) = p.beta + p.gamma * u + p.sign * u * u * u;
    return M;
}

}  // namespace

void field(const ModelParams& params, std::span<const double> x, std::span<double> dx)
{
    check_dim(params, x.size());
    check_dim(params, dx.size());
    std::visit(overloaded{
                   [&](const JRParams& p) { jr_field(p, x, dx); },
                   [&](const WCParams& p) { wc_field(p, x, dx); },
                   [&](const DBTParams& p) { dbt_field(p, x, dx); },
               },
               params);
}

Vec field(const ModelParams& params, const Vec& x)
{
    Vec out(x.size());
    field(params, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
          std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
    return out;
}

Mat jacobian(const ModelParams& params, const Vec& x)
{
    check_dim(params, static_cast<std::size_t>(x.size()));
    return std::visit(overloaded{
                          [&](const JRParams& p) { return jr_jacobian(p, x); },
                          [&](const WCParams& p) { return wc_jacobian(p, x); },
                          [&](const DBTParams& p) { return dbt_jacobian(p, x); },
                      },
                      params);
}

Vec primary_parameter_derivative(const ModelParams& params, const Vec& x)
{
    check_dim(params, static_cast<std::size_t>(x.size()));
    Vec out = Vec::Zero(x.size());
    switch (kind_of(params)) {
    case ModelKind::jansen_rit: out(4) = 1.0; break;
    case ModelKind::wendling_chauvel: out(6) = 1.0; break;
    case ModelKind::dbt: out(1) = 1.0; break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Equilibrium manifolds

namespace {

struct JRManifold {
    double Y0, Y2, P;
};

JRManifold jr_manifold(const JRParams& p, double X)
{
    const auto& al = p.alpha;
    const double Y0 = p.j * sigmoid(X, p.k0);
    const double Y2 = al[3] * p.G / p.d * p.j * sigmoid(al[2] * Y0, p.k0);
    const double P = X + Y2 - al[1] * p.j * sigmoid(al[0] * Y0, p.k0);
    return {Y0, Y2, P};
}

struct WCManifold {
    double Y0, Y2, Y3, Z, P;
};

WCManifold wc_manifold(const WCParams& p, double X)
{
    const auto& al = p.alpha;
    const double Y0 = p.j * sigmoid(X, p.k0);
    const double s3 = sigmoid(al[2] * Y0, p.k0);
    const double Y2 = p.j * p.G1 * al[3] / p.d1 * s3;
    const double Z = al[4] * Y0 - p.j * p.G1 * al[5] / p.d1 * s3;
    const double Y3 = p.j * p.G2 * al[6] / p.d2 * sigmoid(Z, p.k0);
    const double P = X + Y2 + Y3 - al[1] * p.j * sigmoid(al[0] * Y0, p.k0);
    return {Y0, Y2, Y3, Z, P};
}

}  // namespace

Equilibrium equilibrium_from_X(const ModelParams& params, double X)
{
    if (!std::isfinite(X)) {
        throw DomainError("equilibrium_from_X: X must be finite");
    }
    return std::visit(overloaded{
                          [&](const JRParams& p) {
                              const auto m = jr_manifold(p, X);
                              Vec s = Vec::Zero(6);
                              s(0) = m.Y0;
                              s(1) = X;
                              s(2) = m.Y2;
                              return Equilibrium{{ModelKind::jansen_rit, s}, m.P};
                          },
                          [&](const WCParams& p) {
                              const auto m = wc_manifold(p, X);
                              Vec s = Vec::Zero(10);
                              s(0) = m.Y0;
                              s(1) = X;
                              s(2) = m.Y2;
                              s(3) = m.Y3;
                              s(4) = m.Z;
                              return Equilibrium{{ModelKind::wendling_chauvel, s}, m.P};
                          },
                          [&](const DBTParams&) {
                              Vec s = Vec::Zero(2);
                              s(0) = X;
                              return Equilibrium{{ModelKind::dbt, s}, -X * X};
                          },
                      },
                      params);
}

double input_from_X(const ModelParams& params, double X)
{
    return std::visit(overloaded{
                          [&](const JRParams& p) { return jr_manifold(p, X).P; },
                          [&](const WCParams& p) { return wc_manifold(p, X).P; },
                          [&](const DBTParams&) { return -X * X; },
                      },
                      params);
}

ModelParams with_primary(ModelParams params, double value)
{
    set_param(params, primary_parameter(kind_of(params)), value);
    return params;
}

Mat jacobian_at_X(const ModelParams& params, double X)
{
    const auto eq = equilibrium_from_X(params, X);
    return jacobian(with_primary(params, eq.P), eq.state.values);
}

}  // namespace neurobif
