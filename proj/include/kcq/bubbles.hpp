#pragma once

#include "kcq/fiber.hpp"
#include "kcq/params.hpp"
#include "kcq/radial.hpp"
#include "kcq/riesz.hpp"

#include <string>
#include <vector>

namespace kcq {

/// (3 eps^2)^{1/4} / (eps^2 + r^2)^{1/2}, no cutoff.
RadialField aubin_talenti(double eps, GridPtr grid);

/// psi(r) U_eps(r), psi the cosine taper from 1 at r = 1 to 0 at r = 2.
/// Requires 0 < eps <= 0.5 and at least 8 nodes below r = eps.
RadialField build_bubble(double eps, GridPtr grid);

/// Choquard Rayleigh quotient |grad U|^2 / A(U)^{1/(alpha+3)} of the uncut bubble
/// on the kernel's grid. The gradient is taken on U - U(r_max), which vanishes at
/// the Dirichlet boundary, and the exact far-field part beyond r_max is added
/// back in `quotient`; `quotient_raw` omits it.
struct BubbleQuotient {
    double grad_sq = 0.0;   // discrete, inside r_max
    double grad_tail = 0.0; // analytic, beyond r_max
    double choq = 0.0;
    double quotient = 0.0;
    double quotient_raw = 0.0;
};
BubbleQuotient bubble_rayleigh_quotient(const RieszKernel& kernel, double eps = 1.0);

double cutoff(double r);

struct BubbleMeasurement {
    double eps = 0.0;
    double grad_sq = 0.0;
    double mass_sq = 0.0;
    double lp_pow = 0.0; // |u_eps|_p^p
    double nq = 0.0;     // |u_eps|_q^q
    double choq = 0.0;
    double t_eps = 0.0;     // fiber maximiser of v_eps = rho u_eps / |u_eps|_2
    double fiber_max = 0.0; // E_{v_eps}(t_eps)
    FiberFunctionals v;     // functionals of v_eps
};

struct BubbleFamily {
    double p = 0.0;
    std::vector<double> epsilons;
    std::vector<RadialField> profiles;
    std::vector<BubbleMeasurement> m;
};

BubbleFamily build_family(const std::vector<double>& epsilons, const PhysicalParams& params,
                          const RieszKernel& kernel, double p);

struct LawFit {
    std::string name;
    double leading_constant = 0.0;
    double order = 0.0;
    bool pass = false;
    std::vector<double> values; // the per-eps quantity the law is checked on
};

struct AsymptoticsSummary {
    LawFit a1, a2, a3, a4;
    double a3_limit = 0.0; // (A_alpha C_alpha)^{3/2} S_alpha^{(alpha+3)/2}
    double a2_r2 = 0.0;
};

AsymptoticsSummary measure_asymptotics(const BubbleFamily& family, const SharpConstants& consts, double alpha);

/// Right side minus left side of the smallness condition, per eps.
std::vector<double> check_A8(const BubbleFamily& family, const PhysicalParams& params, const SharpConstants& consts);

double estimate_mu_star(const BubbleFamily& family, const PhysicalParams& params, const SharpConstants& consts);

struct MountainPass {
    double bound = 0.0;
    std::size_t argmin = 0;
    double threshold = 0.0;
    bool below_threshold = false;
    std::vector<double> per_eps;
};

MountainPass mountain_pass_upper_bound(const BubbleFamily& family, const PhysicalParams& params,
                                       const SharpConstants& consts);

} // namespace kcq
