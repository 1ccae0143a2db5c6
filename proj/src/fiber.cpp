#include "kcq/fiber.hpp"

#include <cmath>
#include <stdexcept>

namespace kcq {

FiberFunctionals fiber_functionals(const RadialField& u, const PhysicalParams& params, const RieszKernel& kernel)
{
    FiberFunctionals f;
    f.g2 = grad_norm_sq(u);
    f.g4 = f.g2 * f.g2;
    f.nq = lq_norm_pow(u, params.q);
    f.choq = choquard_energy(kernel, u);
    return f;
}

FiberFunctionals scale_functionals(const FiberFunctionals& f, const PhysicalParams& p, double t)
{
    const double qg = p.q * gamma_q(p.q);
    FiberFunctionals s;
    s.g2 = t * t * f.g2;
    s.g4 = std::pow(t, 4) * f.g4;
    s.nq = std::pow(t, qg) * f.nq;
    s.choq = std::pow(t, 2.0 * (p.alpha + 3.0)) * f.choq;
    return s;
}

double fiber_energy(const FiberFunctionals& f, const PhysicalParams& p, double t)
{
    const double qg = p.q * gamma_q(p.q);
    const double c = 2.0 * (p.alpha + 3.0);
    return 0.5 * p.a * t * t * f.g2 + 0.25 * p.b * std::pow(t, 4) * f.g4 - p.mu / p.q * std::pow(t, qg) * f.nq
           - std::pow(t, c) * f.choq / c;
}

double fiber_derivative(const FiberFunctionals& f, const PhysicalParams& p, double t)
{
    const double g = gamma_q(p.q);
    const double qg = p.q * g;
    return p.a * t * f.g2 + p.b * t * t * t * f.g4 - p.mu * g * std::pow(t, qg - 1.0) * f.nq
           - std::pow(t, 2.0 * p.alpha + 5.0) * f.choq;
}

double fiber_second_derivative(const FiberFunctionals& f, const PhysicalParams& p, double t)
{
    const double g = gamma_q(p.q);
    const double qg = p.q * g;
    return p.a * f.g2 + 3.0 * p.b * t * t * f.g4 - p.mu * g * (qg - 1.0) * std::pow(t, qg - 2.0) * f.nq
           - (2.0 * p.alpha + 5.0) * std::pow(t, 2.0 * p.alpha + 4.0) * f.choq;
}

double pohozaev_value(const FiberFunctionals& f, const PhysicalParams& p)
{
    return p.a * f.g2 + p.b * f.g4 - p.mu * gamma_q(p.q) * f.nq - f.choq;
}

FiberCritical locate_fiber_max(const FiberFunctionals& f, const PhysicalParams& p)
{
    if (!(f.g2 > 0.0) || !(f.choq > 0.0))
        throw std::runtime_error("fiber: degenerate functionals (zero field?)");
    auto dE = [&](double t) { return fiber_derivative(f, p, t); };

    FiberCritical c;
    double lo = 1.0, hi = 1.0;
    if (dE(1.0) > 0.0) {
        while (dE(hi) > 0.0) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e150) throw std::runtime_error("fiber: bracket failure (no sign change above 1)");
        }
    } else {
        while (dE(lo) <= 0.0) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-150) throw std::runtime_error("fiber: bracket failure (no sign change below 1)");
        }
    }
    c.t_lo = lo;
    c.t_hi = hi;

    // invariant: dE(lo) > 0 >= dE(hi)
    double t = (lo == 1.0 || hi == 1.0) ? 1.0 : 0.5 * (lo + hi);
    if (t <= lo || t >= hi) t = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
        c.iterations = it + 1;
        const double d1 = dE(t);
        if (d1 > 0.0) lo = t;
        else hi = t;
        const double scale = p.a * f.g2 * t;
        if (std::abs(d1) <= 1e-14 * scale || hi - lo <= 1e-15 * t) break;
        const double d2 = fiber_second_derivative(f, p, t);
        double next = (d2 != 0.0) ? t - d1 / d2 : 0.5 * (lo + hi);
        const bool newton = next > lo && next < hi;
        if (!newton) next = 0.5 * (lo + hi);
        // a small bisection step says nothing about |E'|, only Newton steps may stop here
        if (newton && std::abs(next - t) <= 1e-13 * t) { t = next; break; }
        t = next;
    }
    c.t_u = t;
    c.E_at_t = fiber_energy(f, p, t);
    c.E2_at_t = fiber_second_derivative(f, p, t);
    return c;
}

FiberCritical fiber_max_scan(const FiberFunctionals& f, const PhysicalParams& p, int samples)
{
    const FiberCritical polished = locate_fiber_max(f, p);
    // The scan is an independent guard: if any sampled point beats the polished
    // critical value, the polish is rerun from a bracket around that point.
    const double lo = std::log(polished.t_u) - std::log(1e3), hi = std::log(polished.t_u) + std::log(1e3);
    double best_t = polished.t_u, best_e = polished.E_at_t;
    for (int k = 0; k <= samples; ++k) {
        const double t = std::exp(lo + (hi - lo) * k / samples);
        const double e = fiber_energy(f, p, t);
        if (e > best_e) { best_e = e; best_t = t; }
    }
    if (best_t == polished.t_u) return polished;
    FiberCritical c = polished;
    c.t_u = best_t;
    c.E_at_t = best_e;
    c.E2_at_t = fiber_second_derivative(f, p, best_t);
    return c;
}

Projection project_pohozaev(const RadialField& u, const PhysicalParams& params, const RieszKernel& kernel)
{
    const FiberFunctionals f = fiber_functionals(u, params, kernel);
    Projection out;
    out.crit = locate_fiber_max(f, params);
    out.t_u = out.crit.t_u;
    Dilation d = dilate_report(u, out.t_u);
    out.v = std::move(d.field);
    out.mass_drift = d.mass_drift;
    out.under_resolved = d.under_resolved;
    return out;
}

} // namespace kcq
