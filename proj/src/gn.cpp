#include "kcq/gn.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kcq {

using std::numbers::pi;

double gn_delta(double p)
{
    if (!(p > 2.0 && p < 6.0)) throw std::domain_error("GN exponent must lie in (2, 6)");
    return 3.0 * (p - 2.0) / (2.0 * p);
}

namespace {

enum class Fate { crosses, turns_up, undecided };

struct Trajectory {
    Fate fate;
    std::vector<double> q, dq;
};

// y'' = Q - Q^{p-1} - (2/r) y', with the r = 0 limit y'' = (Q - Q^{p-1})/3.
Trajectory integrate(double p, double s, const ShootingOptions& o, bool keep)
{
    auto rhs = [p](double r, double y, double dy, double& f0, double& f1) {
        const double src = y - std::pow(std::abs(y), p - 2.0) * y;
        f0 = dy;
        f1 = (r == 0.0) ? src / 3.0 : src - 2.0 * dy / r;
    };
    Trajectory t{Fate::undecided, {}, {}};
    const double h = o.h;
    const long steps = std::lround(o.r_max / h);
    double y = s, dy = 0.0;
    if (keep) {
        t.q.reserve(steps + 1);
        t.dq.reserve(steps + 1);
        t.q.push_back(y);
        t.dq.push_back(dy);
    }
    for (long k = 0; k < steps; ++k) {
        const double r = k * h;
        double a0, a1, b0, b1, c0, c1, d0, d1;
        rhs(r, y, dy, a0, a1);
        rhs(r + 0.5 * h, y + 0.5 * h * a0, dy + 0.5 * h * a1, b0, b1);
        rhs(r + 0.5 * h, y + 0.5 * h * b0, dy + 0.5 * h * b1, c0, c1);
        rhs(r + h, y + h * c0, dy + h * c1, d0, d1);
        y += h / 6.0 * (a0 + 2 * b0 + 2 * c0 + d0);
        dy += h / 6.0 * (a1 + 2 * b1 + 2 * c1 + d1);
        if (!std::isfinite(y) || y < 0.0) { t.fate = Fate::crosses; break; }
        if (dy > 0.0 || y > 10.0 * s) { t.fate = Fate::turns_up; break; }
        if (keep) {
            t.q.push_back(y);
            t.dq.push_back(dy);
        }
    }
    return t;
}

} // namespace

NormalizedGroundState shoot_normalized(double p, const ShootingOptions& opts)
{
    gn_delta(p);
    if (!(opts.h > 0.0) || !(opts.r_max > 10.0 * opts.h))
        throw std::invalid_argument("shoot: bad auxiliary grid");

    // bracket: "turns up" below the shooting height, "crosses" above it
    double lo = 0.0, hi = 0.0;
    double s = 1.0;
    Fate f = integrate(p, s, opts, false).fate;
    if (f == Fate::crosses) {
        hi = s;
        while (true) {
            s *= 0.5;
            if (s < 1e-3) throw std::runtime_error("shoot: no bracket in [1e-3, 1e3]");
            if (integrate(p, s, opts, false).fate != Fate::crosses) { lo = s; break; }
            hi = s;
        }
    } else {
        lo = s;
        while (true) {
            s *= 2.0;
            if (s > 1e3) throw std::runtime_error("shoot: no bracket in [1e-3, 1e3]");
            if (integrate(p, s, opts, false).fate == Fate::crosses) { hi = s; break; }
            lo = s;
        }
    }
    if (integrate(p, lo, opts, false).fate == Fate::crosses || integrate(p, hi, opts, false).fate != Fate::crosses)
        throw std::logic_error("shoot: invalid bracket");

    NormalizedGroundState g;
    g.p = p;
    g.h = opts.h;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        ++g.bisections;
        const Fate fm = integrate(p, mid, opts, false).fate;
        if (fm == Fate::crosses) hi = mid;
        else lo = mid;
        if (fm == Fate::undecided) break;
    }

    const Trajectory a = integrate(p, lo, opts, true);
    const Trajectory b = integrate(p, hi, opts, true);
    // keep the common part where both sides agree to 1e-8 of the local value
    std::size_t k = 0;
    const std::size_t kmax = std::min(a.q.size(), b.q.size());
    while (k + 1 < kmax && std::abs(a.q[k] - b.q[k]) <= 1e-8 * std::abs(a.q[k])) ++k;
    if (k % 2 == 1) --k; // even panel count for Simpson
    if (k < 20) throw std::runtime_error("shoot: profile diverged immediately");
    g.q.resize(k + 1);
    g.dq.resize(k + 1);
    for (std::size_t j = 0; j <= k; ++j) {
        g.q[j] = 0.5 * (a.q[j] + b.q[j]);
        g.dq[j] = 0.5 * (a.dq[j] + b.dq[j]);
    }
    g.q0 = g.q[0];
    g.r_splice = k * opts.h;

    double simpson = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
        const double r = j * opts.h;
        const double f = g.q[j] * g.q[j] * r * r;
        const double c = (j == 0 || j == k) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        simpson += c * f;
    }
    simpson *= opts.h / 3.0;
    const double qd = g.q[k], rd = g.r_splice;
    // integral of (qd rd e^{-(r-rd)})^2 over r > rd
    g.l2_sq = 4.0 * pi * (simpson + 0.5 * qd * qd * rd * rd);
    return g;
}

double NormalizedGroundState::curvature(std::size_t k) const
{
    const double src = q[k] - std::pow(q[k], p - 1.0);
    return k == 0 ? src / 3.0 : src - 2.0 * dq[k] / (k * h);
}

// quintic Hermite on each step, using Q'' from the ODE itself, so that second
// differences of the resampled profile stay accurate
double NormalizedGroundState::value(double r) const
{
    r = std::abs(r);
    if (r >= r_splice) return q.back() * (r_splice / r) * std::exp(-(r - r_splice));
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(r / h), q.size() - 2);
    const double t = (r - k * h) / h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5, h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double h3 = 10 * t3 - 15 * t4 + 6 * t5, h4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double h5 = 0.5 * (t3 - 2 * t4 + t5);
    return h0 * q[k] + h * h1 * dq[k] + h * h * h2 * curvature(k) + h3 * q[k + 1] + h * h4 * dq[k + 1]
           + h * h * h5 * curvature(k + 1);
}

double NormalizedGroundState::derivative(double r) const
{
    const double sgn = r < 0.0 ? -1.0 : 1.0;
    r = std::abs(r);
    if (r >= r_splice) return -sgn * value(r) * (1.0 + 1.0 / r);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(r / h), q.size() - 2);
    const double t = (r - k * h) / h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    const double h0 = -30 * t2 + 60 * t3 - 30 * t4, h1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
    const double h2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
    const double h4 = -12 * t2 + 28 * t3 - 15 * t4, h5 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
    const double d = h0 * (q[k] - q[k + 1]) / h + h1 * dq[k] + h4 * dq[k + 1]
                     + h * (h2 * curvature(k) + h5 * curvature(k + 1));
    return sgn * d;
}

namespace {

struct Scaling {
    double amp, kappa;
};

Scaling scaling_for(double p)
{
    const double delta = gn_delta(p);
    const double c = 1.0 / delta - 1.0;
    const double d = 2.0 / (p * delta);
    return {std::pow(c / d, 1.0 / (p - 2.0)), std::sqrt(c)};
}

double constant_from_l2(double p, double l2)
{
    return std::pow(p / (2.0 * std::pow(l2, p - 2.0)), 1.0 / p);
}

} // namespace

GroundStateProfile shoot_ground_state(double p, GridPtr grid, const ShootingOptions& opts)
{
    const NormalizedGroundState g = shoot_normalized(p, opts);
    const Scaling sc = scaling_for(p);
    GroundStateProfile out;
    out.p = p;
    out.shoot_height = sc.amp * g.q0;
    out.l2_norm = sc.amp * std::sqrt(g.l2_sq / std::pow(sc.kappa, 3));
    out.C_p = constant_from_l2(p, out.l2_norm);
    out.profile = RadialField::sample(grid, [&](double r) { return sc.amp * g.value(sc.kappa * r); });
    return out;
}

double gn_constant(double p, const ShootingOptions& opts)
{
    const NormalizedGroundState g = shoot_normalized(p, opts);
    const Scaling sc = scaling_for(p);
    return constant_from_l2(p, sc.amp * std::sqrt(g.l2_sq / std::pow(sc.kappa, 3)));
}

double gn_check(const RadialField& u, double p, double C_p)
{
    const double delta = gn_delta(p);
    const double g2 = grad_norm_sq(u), m = mass_sq(u);
    return C_p * std::pow(g2, 0.5 * delta) * std::pow(m, 0.5 * (1.0 - delta)) - std::pow(lq_norm_pow(u, p), 1.0 / p);
}

} // namespace kcq
