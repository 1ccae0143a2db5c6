#pragma once

#include <string>

namespace kcq {

/// Problem data (a, b, rho, mu, q, alpha) for
///   -(a + b|grad u|^2) Lap u - lambda u = mu |u|^{q-2} u + (I_alpha * |u|^{alpha+3}) |u|^{alpha+1} u,
///   |u|_2 = rho, in R^3.
struct PhysicalParams {
    double a = 1.0;
    double b = 1.0;
    double rho = 0.5;
    double mu = 50.0;
    double q = 5.0;
    double alpha = 2.0;

    /// Throws std::domain_error naming the first violated hypothesis.
    void validate() const;
};

struct SharpConstants {
    double A_alpha = 0.0;
    double C_alpha = 0.0;
    double S = 0.0;
    double S_alpha = 0.0;
    double gamma_q = 0.0;
    double C_q = 0.0; // 0 until filled from the GN extremal
};

struct QuadratureValue {
    double value;
    double error_estimate;
};

double compute_A_alpha(double alpha);
double compute_C_alpha(double alpha);

/// Sobolev quotient of the Aubin-Talenti profile at scale eps, by composite
/// Gauss-Legendre in r = eps*tan(theta) over the whole half line.
QuadratureValue sobolev_quotient(double eps = 1.0, int panels = 64);

/// Best Sobolev constant S from the bubble quotient.
double compute_S();

double gamma_q(double q);
double S_alpha_from(double S, double A_alpha, double C_alpha, double alpha);

/// Everything except C_q.
SharpConstants compute_closed_form_constants(const PhysicalParams& params);

double energy_threshold(const PhysicalParams& params, const SharpConstants& consts);

/// Residual h(delta) whose positive root is the gradient lower bound.
double delta_residual(const PhysicalParams& params, const SharpConstants& consts, double delta);
double delta_lower_bound(const PhysicalParams& params, const SharpConstants& consts);

/// Lower bound a(1/2 - 1/(q gamma))delta^2 + b(1/4 - 1/(q gamma))delta^4 on the energy.
double energy_lower_bound(const PhysicalParams& params, const SharpConstants& consts, double delta);

} // namespace kcq
