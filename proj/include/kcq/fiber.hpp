#pragma once

#include "kcq/params.hpp"
#include "kcq/radial.hpp"
#include "kcq/riesz.hpp"

namespace kcq {

/// The four scalars that fix E_u(t) = Phi(t * u) in closed form.
struct FiberFunctionals {
    double g2 = 0.0;   // |grad u|_2^2
    double g4 = 0.0;   // g2^2
    double nq = 0.0;   // |u|_q^q
    double choq = 0.0; // A(u)
};

FiberFunctionals fiber_functionals(const RadialField& u, const PhysicalParams& params, const RieszKernel& kernel);

/// Functionals of t * u from those of u (exact scaling laws).
FiberFunctionals scale_functionals(const FiberFunctionals& f, const PhysicalParams& params, double t);

double fiber_energy(const FiberFunctionals& f, const PhysicalParams& params, double t);
double fiber_derivative(const FiberFunctionals& f, const PhysicalParams& params, double t);
double fiber_second_derivative(const FiberFunctionals& f, const PhysicalParams& params, double t);

/// a g2 + b g4 - mu gamma_q nq - choq.
double pohozaev_value(const FiberFunctionals& f, const PhysicalParams& params);

struct FiberCritical {
    double t_u = 1.0;
    double E_at_t = 0.0;
    double E2_at_t = 0.0;
    double t_lo = 1.0, t_hi = 1.0;
    int iterations = 0;
};

/// Unique positive root of E'_u: doubling bracket from t = 1, then Newton
/// safeguarded by bisection. Throws std::runtime_error on bracket failure.
FiberCritical locate_fiber_max(const FiberFunctionals& f, const PhysicalParams& params);

/// max_t E_u(t) by a log-spaced scan followed by the Newton polish above.
FiberCritical fiber_max_scan(const FiberFunctionals& f, const PhysicalParams& params, int samples = 2000);

struct Projection {
    double t_u = 1.0;
    RadialField v;
    FiberCritical crit;
    double mass_drift = 0.0;
    bool under_resolved = false;
};

/// u -> t_u * u. The root find uses the closed-form fiber; only v is interpolated.
Projection project_pohozaev(const RadialField& u, const PhysicalParams& params, const RieszKernel& kernel);

} // namespace kcq
