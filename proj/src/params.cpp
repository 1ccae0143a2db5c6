#include "kcq/params.hpp"

#include "kcq/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kcq {

using std::numbers::pi;

void PhysicalParams::validate() const
{
    if (!(a > 0.0)) throw std::domain_error("a must be positive");
    if (!(b > 0.0)) throw std::domain_error("b must be positive");
    if (!(rho > 0.0)) throw std::domain_error("rho must be positive");
    if (!(mu > 0.0)) throw std::domain_error("mu must be positive");
    if (!(q > 14.0 / 3.0 && q < 6.0)) throw std::domain_error("q must lie in (14/3, 6)");
    if (!(alpha > 0.0 && alpha < 3.0)) throw std::domain_error("alpha must lie in (0, 3)");
}

static void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 3.0))
        throw std::domain_error("alpha must lie in (0, 3)");
}

double compute_A_alpha(double alpha)
{
    check_alpha(alpha);
    return lanczos_gamma(0.5 * (3.0 - alpha))
           / (std::pow(2.0, alpha) * std::pow(pi, 1.5) * lanczos_gamma(0.5 * alpha));
}

double compute_C_alpha(double alpha)
{
    check_alpha(alpha);
    const double ratio = lanczos_gamma(1.5) / lanczos_gamma(3.0);
    return std::pow(pi, 0.5 * (3.0 - alpha)) * lanczos_gamma(0.5 * alpha)
           / lanczos_gamma(0.5 * (3.0 + alpha)) * std::pow(ratio, -alpha / 3.0);
}

namespace {

// 16-point Gauss-Legendre on [-1, 1] (positive half; symmetric).
constexpr std::array<double, 8> kGLx = {
    0.0950125098376374401853193, 0.2816035507792589132304605, 0.4580167776572273863424194,
    0.6178762444026437484466718, 0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr std::array<double, 8> kGLw = {
    0.1894506104550684962853967, 0.1826034150449235888667637, 0.1691565193950025381893121,
    0.1495959888165767320815017, 0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

template <class F>
double gauss_legendre(F&& f, double lo, double hi, int panels)
{
    const double h = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * h;
        double acc = 0.0;
        for (std::size_t k = 0; k < kGLx.size(); ++k) {
            const double dx = 0.5 * h * kGLx[k];
            acc += kGLw[k] * (f(mid - dx) + f(mid + dx));
        }
        total += 0.5 * h * acc;
    }
    return total;
}

double bubble_quotient(double eps, int panels)
{
    const double c = std::pow(3.0 * eps * eps, 0.25);
    // r = eps tan(th), dr = eps sec^2(th) dth
    auto grad = [&](double th) {
        const double r = eps * std::tan(th);
        const double sec2 = 1.0 / (std::cos(th) * std::cos(th));
        const double du = -c * r / std::pow(eps * eps + r * r, 1.5);
        return 4.0 * pi * du * du * r * r * eps * sec2;
    };
    auto l6 = [&](double th) {
        const double r = eps * std::tan(th);
        const double sec2 = 1.0 / (std::cos(th) * std::cos(th));
        const double u = c / std::sqrt(eps * eps + r * r);
        return 4.0 * pi * std::pow(u, 6) * r * r * eps * sec2;
    };
    const double g2 = gauss_legendre(grad, 0.0, 0.5 * pi, panels);
    const double n6 = gauss_legendre(l6, 0.0, 0.5 * pi, panels);
    return g2 / std::cbrt(n6);
}

} // namespace

QuadratureValue sobolev_quotient(double eps, int panels)
{
    if (!(eps > 0.0) || panels < 1)
        throw std::domain_error("sobolev_quotient: eps > 0 and panels >= 1 required");
    const double coarse = bubble_quotient(eps, panels);
    const double fine = bubble_quotient(eps, 2 * panels);
    return {fine, std::abs(fine - coarse)};
}

double compute_S()
{
    return sobolev_quotient(1.0, 64).value;
}

double gamma_q(double q)
{
    if (!(q > 2.0 && q < 6.0) && q != 6.0)
        throw std::domain_error("gamma_q: q must lie in (2, 6]");
    return 3.0 * (q - 2.0) / (2.0 * q);
}

double S_alpha_from(double S, double A_alpha, double C_alpha, double alpha)
{
    return S / std::pow(A_alpha * C_alpha, 1.0 / (alpha + 3.0));
}

SharpConstants compute_closed_form_constants(const PhysicalParams& params)
{
    SharpConstants c;
    c.A_alpha = compute_A_alpha(params.alpha);
    c.C_alpha = compute_C_alpha(params.alpha);
    c.S = compute_S();
    c.S_alpha = S_alpha_from(c.S, c.A_alpha, c.C_alpha, params.alpha);
    c.gamma_q = gamma_q(params.q);
    return c;
}

double energy_threshold(const PhysicalParams& params, const SharpConstants& consts)
{
    const double al = params.alpha;
    return (al + 2.0) / (2.0 * (al + 3.0)) * std::pow(params.a * consts.S_alpha, (al + 3.0) / (al + 2.0));
}

double delta_residual(const PhysicalParams& p, const SharpConstants& c, double delta)
{
    const double g = c.gamma_q;
    const double gn = p.mu * g * std::pow(c.C_q, p.q) * std::pow(p.rho, p.q * (1.0 - g))
                      * std::pow(delta, p.q * g - 4.0);
    const double hls = std::pow(c.S_alpha, -(p.alpha + 3.0)) * std::pow(delta, 2.0 * (p.alpha + 1.0));
    return gn + hls - p.b;
}

double delta_lower_bound(const PhysicalParams& p, const SharpConstants& c)
{
    if (!(c.C_q > 0.0))
        throw std::domain_error("delta_lower_bound: C_q not available");
    if (!(p.q * c.gamma_q > 4.0))
        throw std::domain_error("delta_lower_bound: requires q gamma_q > 4");
    double lo = 0.0;
    double hi = 1.0;
    while (delta_residual(p, c, hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e100) throw std::runtime_error("delta_lower_bound: no sign change");
    }
    for (int it = 0; it < 400 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (delta_residual(p, c, mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double energy_lower_bound(const PhysicalParams& p, const SharpConstants& c, double delta)
{
    const double qg = p.q * c.gamma_q;
    return p.a * (0.5 - 1.0 / qg) * delta * delta + p.b * (0.25 - 1.0 / qg) * std::pow(delta, 4);
}

} // namespace kcq
