#include "kcq/bubbles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kcq {

using std::numbers::pi;

double cutoff(double r)
{
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    return 0.5 * (1.0 + std::cos(pi * (r - 1.0)));
}

RadialField aubin_talenti(double eps, GridPtr grid)
{
    if (!(eps > 0.0)) throw std::domain_error("aubin_talenti: eps must be positive");
    const double c = std::pow(3.0 * eps * eps, 0.25);
    return RadialField::sample(grid, [&](double r) { return c / std::sqrt(eps * eps + r * r); });
}

RadialField build_bubble(double eps, GridPtr grid)
{
    if (!(eps > 0.0 && eps <= 0.5)) throw std::domain_error("build_bubble: eps must lie in (0, 0.5]");
    if (grid->count_below(eps) < 8)
        throw std::runtime_error("build_bubble: grid does not resolve eps (fewer than 8 nodes below eps)");
    const double c = std::pow(3.0 * eps * eps, 0.25);
    return RadialField::sample(grid, [&](double r) { return cutoff(r) * c / std::sqrt(eps * eps + r * r); });
}

BubbleQuotient bubble_rayleigh_quotient(const RieszKernel& kernel, double eps)
{
    const GridPtr grid = kernel.grid();
    const RadialField u = aubin_talenti(eps, grid);
    RadialField v = u;
    const double edge = std::pow(3.0 * eps * eps, 0.25) / std::hypot(eps, grid->r_max());
    for (double& x : v.values) x -= edge;

    // 4 pi sqrt(3) int_X^inf x^4/(1+x^2)^3 dx, X = r_max/eps
    const double X = grid->r_max() / eps, X2 = 1.0 + X * X;
    const double tail = 4.0 * std::numbers::pi * std::sqrt(3.0) *
                        (3.0 * X2 * X2 * std::atan(1.0 / X) + 5.0 * X * X * X + 3.0 * X) / (8.0 * X2 * X2);

    BubbleQuotient out;
    out.grad_sq = grad_norm_sq(v);
    out.grad_tail = tail;
    out.choq = choquard_energy(kernel, u);
    const double e = 1.0 / (kernel.alpha() + 3.0);
    out.quotient = (out.grad_sq + tail) / std::pow(out.choq, e);
    out.quotient_raw = out.grad_sq / std::pow(out.choq, e);
    return out;
}

BubbleFamily build_family(const std::vector<double>& epsilons, const PhysicalParams& params,
                          const RieszKernel& kernel, double p)
{
    BubbleFamily fam;
    fam.p = p;
    fam.epsilons = epsilons;
    for (double eps : epsilons) {
        RadialField u = build_bubble(eps, kernel.grid());
        BubbleMeasurement m;
        m.eps = eps;
        m.grad_sq = grad_norm_sq(u);
        m.mass_sq = mass_sq(u);
        m.lp_pow = lq_norm_pow(u, p);
        m.nq = lq_norm_pow(u, params.q);
        m.choq = choquard_energy(kernel, u);
        const double c = params.rho / std::sqrt(m.mass_sq);
        m.v.g2 = c * c * m.grad_sq;
        m.v.g4 = m.v.g2 * m.v.g2;
        m.v.nq = std::pow(c, params.q) * m.nq;
        m.v.choq = std::pow(c, 2.0 * (params.alpha + 3.0)) * m.choq;
        const FiberCritical crit = fiber_max_scan(m.v, params);
        m.t_eps = crit.t_u;
        m.fiber_max = crit.E_at_t;
        fam.m.push_back(m);
        fam.profiles.push_back(std::move(u));
    }
    return fam;
}

namespace {

struct Line {
    double slope, intercept, r2;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (slope * x[i] + icpt);
        ss_res += e * e;
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    return {slope, icpt, ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0};
}

double loglog_slope(const std::vector<double>& eps, const std::vector<double>& dev)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(dev[i] > 0.0)) return 0.0;
        lx.push_back(std::log(eps[i]));
        ly.push_back(std::log(dev[i]));
    }
    return least_squares(lx, ly).slope;
}

} // namespace

AsymptoticsSummary measure_asymptotics(const BubbleFamily& fam, const SharpConstants& consts, double alpha)
{
    const std::size_t n = fam.m.size();
    if (n < 4) throw std::invalid_argument("measure_asymptotics: need at least 4 eps values");
    const auto [emin, emax] = std::minmax_element(fam.epsilons.begin(), fam.epsilons.end());
    if (*emax < 8.0 * *emin) throw std::invalid_argument("measure_asymptotics: eps values must span a factor >= 8");

    AsymptoticsSummary s;
    std::vector<double> eps(fam.epsilons);

    // (A1) |grad u_eps|^2 - S^{3/2} = O(eps)
    {
        const double lim = std::pow(consts.S, 1.5);
        std::vector<double> dev, g;
        for (const auto& m : fam.m) {
            dev.push_back(std::abs(m.grad_sq - lim));
            g.push_back(m.grad_sq);
        }
        s.a1.name = "A1";
        s.a1.leading_constant = least_squares(eps, g).intercept;
        s.a1.order = loglog_slope(eps, dev);
        s.a1.pass = s.a1.order >= 0.8;
        s.a1.values = dev;
    }
    // (A2) |u_eps|^2 = C1 eps + O(eps^2)
    {
        std::vector<double> mass;
        for (const auto& m : fam.m) mass.push_back(m.mass_sq);
        const Line l = least_squares(eps, mass);
        s.a2.name = "A2";
        s.a2.leading_constant = l.slope;
        s.a2_r2 = l.r2;
        s.a2.order = loglog_slope(eps, mass);
        s.a2.pass = l.r2 >= 0.99 && l.slope > 0.0;
        s.a2.values = mass;
    }
    // (A3) A(u_eps) >= L - O(eps^{(alpha+3)/2})
    {
        const double L = std::pow(consts.A_alpha * consts.C_alpha, 1.5) * std::pow(consts.S_alpha, 0.5 * (alpha + 3.0));
        s.a3_limit = L;
        const double rate = 0.5 * (alpha + 3.0);
        std::vector<double> deficit;
        for (const auto& m : fam.m) deficit.push_back(L - m.choq);
        // constant fitted at the largest eps must bound the deficit at every other eps
        const std::size_t i0 = static_cast<std::size_t>(emax - fam.epsilons.begin());
        const double c0 = std::max(deficit[i0], 0.0) / std::pow(eps[i0], rate);
        bool holds = true;
        for (std::size_t i = 0; i < n; ++i)
            holds = holds && deficit[i] <= c0 * std::pow(eps[i], rate) * (1.0 + 1e-12);
        s.a3.name = "A3";
        s.a3.leading_constant = c0;
        s.a3.order = loglog_slope(eps, deficit);
        s.a3.pass = holds && s.a3.order >= 0.8 * rate;
        s.a3.values = deficit;
    }
    // (A4) eps^{p/2 - 3} |u_eps|_p^p -> C2
    {
        std::vector<std::pair<double, double>> sorted;
        for (const auto& m : fam.m) sorted.emplace_back(m.eps, std::pow(m.eps, 0.5 * fam.p - 3.0) * m.lp_pow);
        std::sort(sorted.begin(), sorted.end(), [](auto& x, auto& y) { return x.first > y.first; });
        const double last = sorted[n - 1].second, prev = sorted[n - 2].second;
        s.a4.name = "A4";
        s.a4.leading_constant = last;
        std::vector<double> dev;
        std::vector<double> es;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            es.push_back(sorted[i].first);
            dev.push_back(std::abs(sorted[i].second - last));
        }
        s.a4.order = loglog_slope(es, dev);
        s.a4.pass = std::abs(last - prev) <= 0.1 * std::abs(last);
        for (const auto& m : fam.m) s.a4.values.push_back(std::pow(m.eps, 0.5 * fam.p - 3.0) * m.lp_pow);
    }
    return s;
}

std::vector<double> check_A8(const BubbleFamily& fam, const PhysicalParams& p, const SharpConstants& c)
{
    const double g = c.gamma_q;
    const double e1 = (3.0 * (p.q - 2.0) - 4.0) / (4.0 * (p.alpha + 2.0));
    const double e2 = (4.0 * (p.alpha + 3.0) - 3.0 * (p.q - 2.0)) / (4.0 * (p.alpha + 2.0));
    const double e3 = p.q - 1.5 * (p.q - 2.0);
    const double lhs = 2.0 * p.mu * g * std::pow(p.rho, e3);
    std::vector<double> out;
    for (const auto& m : fam.m) {
        const double D = p.a * m.grad_sq + p.b * m.t_eps * m.t_eps * (p.rho * p.rho / m.mass_sq) * m.grad_sq * m.grad_sq;
        const double rhs = std::pow(m.choq, e1) * std::pow(D, e2) * std::pow(std::sqrt(m.mass_sq), e3) / m.nq;
        out.push_back(rhs - lhs);
    }
    return out;
}

double estimate_mu_star(const BubbleFamily& fam, const PhysicalParams& p, const SharpConstants& c)
{
    double t0 = fam.m.at(0).t_eps, tmax = t0;
    for (const auto& m : fam.m) {
        t0 = std::min(t0, m.t_eps);
        tmax = std::max(tmax, m.t_eps);
    }
    const double theta = std::max(1.0, tmax);
    return p.b * p.q * std::pow(c.S, 3) * std::pow(theta / t0, 4);
}

MountainPass mountain_pass_upper_bound(const BubbleFamily& fam, const PhysicalParams& p, const SharpConstants& c)
{
    MountainPass mp;
    mp.threshold = energy_threshold(p, c);
    mp.bound = INFINITY;
    for (std::size_t i = 0; i < fam.m.size(); ++i) {
        const double e = fam.m[i].fiber_max;
        mp.per_eps.push_back(e);
        if (e < mp.bound) {
            mp.bound = e;
            mp.argmin = i;
        }
    }
    mp.below_threshold = mp.bound < mp.threshold;
    return mp;
}

} // namespace kcq
