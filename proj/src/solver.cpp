#include "kcq/solver.hpp"

#include "kcq/bubbles.hpp"
#include "kcq/gn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kcq {

std::string to_string(SeedProfile s)
{
    switch (s) {
    case SeedProfile::gaussian: return "gaussian";
    case SeedProfile::bubble: return "bubble";
    case SeedProfile::custom_csv: return "csv";
    }
    return "?";
}

SeedProfile seed_from_string(const std::string& s)
{
    if (s == "gaussian") return SeedProfile::gaussian;
    if (s == "bubble") return SeedProfile::bubble;
    if (s == "csv" || s == "custom" || s == "custom-csv") return SeedProfile::custom_csv;
    throw std::invalid_argument("unknown seed profile: " + s);
}

void SolverConfig::validate() const
{
    if (!(step > 0.0)) throw std::invalid_argument("solver step must be positive");
    if (!(tol_grad > 0.0 && tol_grad < 1.0) || !(tol_poho > 0.0 && tol_poho < 1.0))
        throw std::invalid_argument("solver tolerances must lie in (0, 1)");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0)) throw std::invalid_argument("armijo shrink must lie in (0, 1)");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw std::invalid_argument("armijo constant must lie in (0, 1)");
}

bool SolveReport::all_certificates() const
{
    return !certificates.empty()
           && std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.passed; });
}

int SolveReport::certificates_passed() const
{
    return static_cast<int>(std::count_if(certificates.begin(), certificates.end(), [](auto& c) { return c.passed; }));
}

double energy(const RadialField& u, const PhysicalParams& p, const RieszKernel& kernel)
{
    const double g2 = grad_norm_sq(u);
    const double nq = lq_norm_pow(u, p.q);
    const double choq = choquard_energy(kernel, u);
    return 0.5 * p.a * g2 + 0.25 * p.b * g2 * g2 - p.mu / p.q * nq - choq / (2.0 * (p.alpha + 3.0));
}

double pohozaev(const RadialField& u, const PhysicalParams& p, const RieszKernel& kernel)
{
    return pohozaev_value(fiber_functionals(u, p, kernel), p);
}

namespace {

struct Evaluation {
    FiberFunctionals f;
    RadialField G;
    double lambda = 0.0;
    double grad_res = 0.0;
    double poho_res = 0.0;
};

Evaluation evaluate(const RadialField& u, const PhysicalParams& p, const RieszKernel& kernel)
{
    const std::size_t n = u.size();
    const auto& w = u.grid->weights();
    const double pc = p.alpha + 3.0;
    std::vector<double> dens(n), conv(n), ku(n);
    for (std::size_t i = 0; i < n; ++i) dens[i] = std::pow(std::abs(u[i]), pc);
    kernel.apply(dens.data(), conv.data());
    u.grid->stiffness().multiply(u.values.data(), ku.data());

    Evaluation e;
    double choq = 0.0, nq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        choq += w[i] * dens[i] * conv[i];
        nq += w[i] * std::pow(std::abs(u[i]), p.q);
    }
    // same summation as fiber_functionals, so J agrees with the line search
    const double g2 = grad_norm_sq(u);
    e.f = {g2, g2 * g2, nq, choq};
    const double c = p.a + p.b * g2;
    e.G = RadialField(u.grid);
    double gu = 0.0, uu = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double au = std::abs(u[i]);
        e.G[i] = c * ku[i] / w[i] - p.mu * std::pow(au, p.q - 2.0) * u[i] - conv[i] * std::pow(au, p.alpha + 1.0) * u[i];
        gu += w[i] * e.G[i] * u[i];
        uu += w[i] * u[i] * u[i];
    }
    e.lambda = gu / uu;
    double rr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = e.G[i] - e.lambda * u[i];
        rr += w[i] * d * d;
    }
    e.grad_res = std::sqrt(rr / uu) / std::max(1.0, std::abs(e.lambda));
    e.poho_res = std::abs(pohozaev_value(e.f, p)) / (p.a * g2);
    return e;
}

RadialField gradient_with(const RadialField& u, const RadialField& lap, const PhysicalParams& p,
                          const RieszKernel& kernel)
{
    const std::size_t n = u.size();
    std::vector<double> dens(n);
    for (std::size_t i = 0; i < n; ++i) dens[i] = std::pow(std::abs(u[i]), p.alpha + 3.0);
    const RadialField conv = riesz_convolve(kernel, RadialField(u.grid, dens));
    const double c = p.a + p.b * grad_norm_sq(u);
    RadialField g(u.grid);
    for (std::size_t i = 0; i < n; ++i) {
        const double au = std::abs(u[i]);
        g[i] = -c * lap[i] - p.mu * std::pow(au, p.q - 2.0) * u[i] - conv[i] * std::pow(au, p.alpha + 1.0) * u[i];
    }
    return g;
}

} // namespace

RadialField euler_lagrange_gradient(const RadialField& u, const PhysicalParams& p, const RieszKernel& kernel)
{
    return gradient_with(u, variational_laplacian(u), p, kernel);
}

Multipliers lagrange_multiplier(const RadialField& u, const PhysicalParams& p, const RieszKernel& kernel)
{
    const FiberFunctionals f = fiber_functionals(u, p, kernel);
    const double r2 = p.rho * p.rho;
    return {(p.a * f.g2 + p.b * f.g4 - p.mu * f.nq - f.choq) / r2, p.mu * (gamma_q(p.q) - 1.0) * f.nq / r2};
}

double equation_residual(const RadialField& u, const PhysicalParams& p, const RieszKernel& kernel, double lambda)
{
    // pointwise stencil here, so the check does not reuse the descent operator
    const RadialField g = gradient_with(u, radial_laplacian(u), p, kernel);
    RadialField d(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) d[i] = g[i] - lambda * u[i];
    return std::sqrt(mass_sq(d) / mass_sq(u)) / std::max(1.0, std::abs(lambda));
}

RadialField make_seed(const SolverConfig& config, const PhysicalParams& params, GridPtr grid)
{
    RadialField u;
    switch (config.seed) {
    case SeedProfile::gaussian:
        u = RadialField::sample(grid, [](double r) { return std::exp(-r * r); });
        break;
    case SeedProfile::bubble:
        u = build_bubble(0.1, grid);
        break;
    case SeedProfile::custom_csv:
        if (config.seed_csv.empty()) throw std::invalid_argument("csv seed requested without a path");
        u = field_from_csv(read_csv(config.seed_csv), grid);
        break;
    }
    if (!(mass_sq(u) > 0.0)) throw std::domain_error("seed profile is identically zero");
    normalize_mass(u, params.rho);
    return u;
}

namespace {

void fill_report(SolveReport& rep, const RadialField& u, const Evaluation& e, const PhysicalParams& p)
{
    rep.u_star = u;
    rep.functionals = e.f;
    rep.energy = fiber_energy(e.f, p, 1.0);
    const double r2 = p.rho * p.rho;
    rep.lambda = (p.a * e.f.g2 + p.b * e.f.g4 - p.mu * e.f.nq - e.f.choq) / r2;
    rep.lambda_alt = p.mu * (gamma_q(p.q) - 1.0) * e.f.nq / r2;
    rep.poho_residual = e.poho_res;
    rep.grad_residual = e.grad_res;
    rep.second_variation = fiber_second_derivative(e.f, p, 1.0);
}

} // namespace

SolveReport solve_from(RadialField u, const PhysicalParams& p, const SolverConfig& cfg, const RieszKernel& kernel,
                       const SharpConstants& consts)
{
    p.validate();
    cfg.validate();
    if (!u.grid->same_as(*kernel.grid())) throw std::invalid_argument("solve: seed and kernel grids differ");
    normalize_mass(u, p.rho);

    const auto grid = u.grid;
    const std::size_t n = u.size();
    const auto& w = grid->weights();

    SolveReport rep;
    SolveReport best;
    best.grad_residual = INFINITY;
    rep.seed = to_string(cfg.seed);
    rep.tol_grad = cfg.tol_grad;
    rep.tol_poho = cfg.tol_poho;
    bool warned_drift = false;

    // Initial projection onto the Pohozaev set.
    {
        Projection pr = project_pohozaev(u, p, kernel);
        u = std::move(pr.v);
        normalize_mass(u, p.rho);
    }

    double eta = cfg.step;
    double best_J = INFINITY;
    int stagnant = 0;
    std::vector<double> ge(n), z(n), y1(n), y2(n);
    std::string failure;
    for (int k = 0;; ++k) {
        Evaluation e = evaluate(u, p, kernel);
        const double J = fiber_energy(e.f, p, 1.0);
        rep.history.push_back({k, J, e.grad_res, e.poho_res, 1.0, eta});
        rep.iterations = k;
        if (e.grad_res < best.grad_residual) {
            fill_report(best, u, e, p);
            best.iterations = k;
        }
        if (e.grad_res <= cfg.tol_grad && e.poho_res <= cfg.tol_poho) {
            fill_report(rep, u, e, p);
            rep.converged = true;
            break;
        }
        if (k >= cfg.max_iter) {
            failure = "iteration cap reached";
            break;
        }
        // Materialising the dilation can undo an accepted step when the field
        // is truncated at r_max; stop instead of cycling.
        if (J < best_J - 1e-14 * std::abs(J)) {
            best_J = J;
            stagnant = 0;
        } else if (++stagnant >= 50) {
            failure = "energy stagnated (domain too small?)";
            break;
        }

        // Sobolev-preconditioned direction, made tangent to the mass sphere.
        const double c = p.a + p.b * e.f.g2;
        const double sigma = std::max(-e.lambda, 1e-3 * c);
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = sigma * w[i];
        const BandCholesky chol(grid->stiffness(), c, d);
        for (std::size_t i = 0; i < n; ++i) {
            ge[i] = w[i] * e.G[i];
            z[i] = w[i] * u[i];
        }
        y1 = ge;
        y2 = z;
        chol.solve(y1);
        chol.solve(y2);
        double zy1 = 0.0, zy2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            zy1 += z[i] * y1[i];
            zy2 += z[i] * y2[i];
        }
        const double theta = zy1 / zy2;
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            y1[i] -= theta * y2[i];
            slope += ge[i] * y1[i];
        }

        // Armijo backtracking on J(w) = max_t Phi(t * w).
        bool accepted = false;
        RadialField trial(grid);
        double t_trial = 1.0;
        while (eta > 1e-14) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] - eta * y1[i];
            normalize_mass(trial, p.rho);
            const FiberFunctionals ft = fiber_functionals(trial, p, kernel);
            FiberCritical crit;
            try {
                crit = locate_fiber_max(ft, p);
            } catch (const std::runtime_error&) {
                eta *= cfg.armijo_shrink;
                continue;
            }
            // near convergence the predicted decrease drops below the
            // rounding noise of J itself
            if (crit.E_at_t <= J - cfg.armijo_c * eta * slope + 1e-13 * std::abs(J)) {
                accepted = true;
                t_trial = crit.t_u;
                break;
            }
            eta *= cfg.armijo_shrink;
        }
        if (!accepted) {
            failure = "line search stalled";
            break;
        }
        Dilation dl = dilate_report(trial, t_trial);
        if (dl.under_resolved && !warned_drift) {
            std::ostringstream os;
            os << "dilation mass drift " << dl.mass_drift << " at iteration " << k << " (grid coarse for this t)";
            rep.warnings.push_back(os.str());
            warned_drift = true;
        }
        u = std::move(dl.field);
        normalize_mass(u, p.rho);
        rep.history.back().t_u = t_trial;
        eta = std::min(eta * cfg.step_growth, cfg.step_max);
    }

    if (!rep.converged) {
        best.history = rep.history;
        best.seed = rep.seed;
        best.tol_grad = cfg.tol_grad;
        best.tol_poho = cfg.tol_poho;
        best.warnings = rep.warnings;
        best.certificates = certify(best, p, consts, kernel);
        throw SolveFailure("solver did not converge: " + failure, best);
    }

    const auto& uv = rep.u_star.values;
    const double umax = *std::max_element(uv.begin(), uv.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (std::abs(uv.back()) > 1e-8 * std::abs(umax))
        rep.warnings.push_back("field does not decay to 1e-8 of its maximum at r_max");
    rep.certificates = certify(rep, p, consts, kernel);
    for (const auto& c : rep.certificates)
        if (c.name == "c4" && !c.passed)
            rep.warnings.push_back("energy is not below the compactness threshold; parameters may lie outside the regime");
    return rep;
}

SolveReport solve_ground_state(const PhysicalParams& params, const SolverConfig& config, const RieszKernel& kernel,
                               const SharpConstants& consts)
{
    return solve_from(make_seed(config, params, kernel.grid()), params, config, kernel, consts);
}

std::vector<Certificate> certify(const SolveReport& r, const PhysicalParams& p, const SharpConstants& c,
                                 const RieszKernel& kernel)
{
    std::vector<Certificate> out;
    const auto& u = r.u_star;
    const double g2 = r.functionals.g2;

    out.push_back({"c1", "Pohozaev residual |P|/(a g2) within tolerance", r.poho_residual <= r.tol_poho,
                   r.poho_residual, r.tol_poho});
    out.push_back({"c2", "second variation E''(1) < 0", r.second_variation < 0.0, r.second_variation, 0.0});
    const double ratio = r.lambda / r.lambda_alt;
    out.push_back({"c3", "lambda < 0 and lambda/lambda_alt within 1e-4 of 1",
                   r.lambda < 0.0 && std::abs(ratio - 1.0) <= 1e-4, std::abs(ratio - 1.0), 1e-4});
    const double thr = energy_threshold(p, c);
    out.push_back({"c4", "energy below the compactness threshold", r.energy < thr, r.energy, thr});

    double delta = NAN;
    if (c.C_q > 0.0) delta = delta_lower_bound(p, c);
    const double gn = std::sqrt(g2);
    out.push_back({"c5", "|grad u| >= delta", std::isfinite(delta) && gn >= delta - 1e-6, gn, delta});
    const double lb = std::isfinite(delta) ? energy_lower_bound(p, c, delta) : NAN;
    out.push_back({"c6", "energy above the coercivity lower bound", std::isfinite(lb) && r.energy >= lb, r.energy, lb});

    double gmargin = NAN, hmargin = NAN;
    if (u.grid && u.size() > 0) {
        if (c.C_q > 0.0) gmargin = gn_check(u, p.q, c.C_q);
        hmargin = hls_check(u, kernel, c);
    }
    out.push_back({"c7", "GN and HLS margins >= -1e-6", gmargin >= -1e-6 && hmargin >= -1e-6,
                   std::min(gmargin, hmargin), -1e-6});

    bool positive = false, monotone = false;
    double worst = 0.0;
    if (u.grid && u.size() > 0) {
        const double umax = *std::max_element(u.values.begin(), u.values.end());
        positive = true;
        monotone = true;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u[i] < -1e-8 * umax) positive = false;
            if (i + 1 < u.size()) {
                const double rise = u[i + 1] - u[i];
                worst = std::max(worst, rise / umax);
                if (rise > 1e-6 * umax) monotone = false;
            }
        }
    }
    out.push_back({"c8", "nonnegative and radially non-increasing", positive && monotone, worst, 1e-6});
    return out;
}

} // namespace kcq
