#include "oracles.hpp"

#include "kcq/bubbles.hpp"
#include "kcq/report.hpp"
#include "kcq/solver.hpp"

#include <doctest.h>

#include <filesystem>
#include <thread>

using namespace kcq;
using doctest::Approx;

namespace {

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

GridPtr grid(std::size_t n = 2048, double r_max = 50.0)
{
    GridSpec s;
    s.n = n;
    s.r_max = r_max;
    return RadialGrid::make(s);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double l2_dot(const RadialField& x, const RadialField& y)
{
    const auto& w = x.grid->weights();
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i] * y[i];
    return s;
}

struct Bench {
    PhysicalParams p;
    GridPtr g = grid();
    RieszKernel K{g, p.alpha, threads()};
    SharpConstants c = full_constants(p);
    SolveReport rep = solve_ground_state(p, SolverConfig{}, K, c);
};

Bench& bench()
{
    static Bench b;
    return b;
}

RadialField random_state(std::mt19937_64& gen, GridPtr g, double rho)
{
    RadialField u = RadialField::sample(g, fixture::random_mixture(gen));
    normalize_mass(u, rho);
    return u;
}

} // namespace

TEST_CASE("energy and Pohozaev assembly")
{
    auto& b = bench();
    const auto& p = b.p;
    const RadialField zero(b.g);
    CHECK(energy(zero, p, b.K) == 0.0);
    CHECK(pohozaev(zero, p, b.K) == 0.0);

    // mu = b = 0 on the bubble shape: two terms left
    PhysicalParams p0 = p;
    p0.mu = 0.0;
    p0.b = 0.0;
    const RadialField U = RadialField::sample(b.g, [](double r) { return std::pow(3.0, 0.25) / std::sqrt(1 + r * r) - std::pow(3.0, 0.25) / std::sqrt(1 + 2500.0); });
    const double expect = 0.5 * p0.a * grad_norm_sq(U) - choquard_energy(b.K, U) / (2 * (p0.alpha + 3));
    CHECK(energy(U, p0, b.K) == Approx(expect).epsilon(1e-13));

    std::mt19937_64 gen(31);
    const double qg = p.q * gamma_q(p.q), k = 2 * (p.alpha + 3);
    for (int i = 0; i < 5; ++i) {
        const RadialField u = random_state(gen, b.g, p.rho);
        const FiberFunctionals f = fiber_functionals(u, p, b.K);
        const double E = energy(u, p, b.K), P = pohozaev(u, p, b.K);
        CHECK(rel(E, fiber_energy(f, p, 1.0)) < 1e-12);
        const double rhs = p.a * (0.5 - 1 / k) * f.g2 + p.b * (0.25 - 1 / k) * f.g4 - p.mu * (1 / p.q - qg / p.q / k) * f.nq;
        CHECK(std::abs(E - P / k - rhs) <= 1e-12 * (std::abs(E) + std::abs(P) + std::abs(rhs)));

        // perturbations of the ground state, the regime the solver projects in
        RadialField w = b.rep.u_star;
        const RadialField d = random_state(gen, b.g, 0.1 * p.rho);
        for (std::size_t j = 0; j < w.size(); ++j) w[j] += d[j];
        normalize_mass(w, p.rho);
        const Projection pr = project_pohozaev(w, p, b.K);
        const FiberFunctionals fv = fiber_functionals(pr.v, p, b.K);
        CHECK(std::abs(pohozaev(pr.v, p, b.K)) <= 1e-4 * p.a * fv.g2);
    }
}

TEST_CASE("gradient matches directional derivatives")
{
    auto& b = bench();
    const auto& p = b.p;
    CHECK(euler_lagrange_gradient(RadialField(b.g), p, b.K).values == std::vector<double>(b.g->size(), 0.0));

    std::mt19937_64 gen(32);
    const RadialField u = project_pohozaev(random_state(gen, b.g, p.rho), p, b.K).v;
    const RadialField G = euler_lagrange_gradient(u, p, b.K);
    for (int k = 0; k < 5; ++k) {
        const RadialField phi = random_state(gen, b.g, 0.1);
        const double exact = l2_dot(G, phi);
        auto err = [&](double h) {
            RadialField up = u, um = u;
            for (std::size_t i = 0; i < u.size(); ++i) {
                up[i] += h * phi[i];
                um[i] -= h * phi[i];
            }
            return std::abs((energy(up, p, b.K) - energy(um, p, b.K)) / (2 * h) - exact);
        };
        // h small enough for the leading term, large enough to stay above rounding in Phi
        const double e1 = err(0.2), e2 = err(0.05);
        CHECK(e2 < 1e-5 * std::abs(exact) + 1e-8);
        CHECK(std::log(e1 / e2) / std::log(4.0) == Approx(2.0).epsilon(0.05));
    }
}

TEST_CASE("multiplier identities")
{
    auto& b = bench();
    const auto& p = b.p;
    std::mt19937_64 gen(33);
    for (int k = 0; k < 10; ++k) {
        const RadialField u = random_state(gen, b.g, p.rho);
        const Multipliers m = lagrange_multiplier(u, p, b.K);
        const double P = pohozaev(u, p, b.K);
        CHECK(std::abs((m.lambda - m.lambda_alt) - P / (p.rho * p.rho)) <=
              1e-12 * (std::abs(m.lambda) + std::abs(m.lambda_alt) + std::abs(P) / (p.rho * p.rho)));
        CHECK(m.lambda_alt < 0.0);

        const RadialField v = project_pohozaev(u, p, b.K).v;
        const Multipliers mv = lagrange_multiplier(v, p, b.K);
        const double Pv = pohozaev(v, p, b.K);
        CHECK(std::abs(mv.lambda - mv.lambda_alt) <= 1e-6 * std::abs(mv.lambda) + std::abs(Pv) / (p.rho * p.rho) * (1 + 1e-9));
    }
}

TEST_CASE("benchmark ground state")
{
    auto& b = bench();
    const auto& p = b.p;
    const SolveReport& r = b.rep;
    REQUIRE(r.converged);
    CHECK(r.poho_residual <= 1e-6);
    CHECK(r.grad_residual <= 1e-5);
    CHECK(r.lambda < 0.0);
    CHECK(r.second_variation < 0.0);
    CHECK(r.energy > 0.0);
    CHECK(std::abs(mass_sq(r.u_star) - p.rho * p.rho) <= 1e-10 * p.rho * p.rho);

    // recorded from the first verified run
    CHECK(r.energy == Approx(27.2815166325).epsilon(1e-8));
    CHECK(r.lambda == Approx(-150.5560569).epsilon(1e-6));

    // the unprojected equation holds although only P = 0 was imposed
    const double eq = equation_residual(r.u_star, p, b.K, r.lambda);
    CHECK(eq <= 1e-4);
    CHECK(std::abs(r.lambda / r.lambda_alt - 1.0) <= 1e-4);
    CHECK(std::abs(pohozaev(r.u_star, p, b.K)) <= 1e-6 * p.a * r.functionals.g2);

    // descent on the fiber maximum
    for (std::size_t k = 1; k < r.history.size(); ++k)
        CHECK(r.history[k].energy <= r.history[k - 1].energy + 1e-8 * std::abs(r.history[k - 1].energy));

    // the solver iterates on the mass sphere
    const double m = mass_sq(r.u_star);
    CHECK(rel(m, p.rho * p.rho) < 1e-10);
}

TEST_CASE("benchmark certificates")
{
    auto& b = bench();
    const SolveReport& r = b.rep;
    REQUIRE(r.certificates.size() == 8);
    for (const auto& c : r.certificates) {
        INFO(c.name << ": " << c.description << " value " << c.value << " bound " << c.bound);
        CHECK(c.passed);
    }
}

TEST_CASE("certificates in the large mu regime")
{
    PhysicalParams p;
    p.mu = 100.0;
    auto g = grid();
    RieszKernel K(g, p.alpha, threads());
    const SolveReport r = solve_ground_state(p, SolverConfig{}, K, full_constants(p));
    REQUIRE(r.converged);
    CHECK(r.energy == Approx(2.14242137972).epsilon(1e-8));
    REQUIRE(r.certificates.size() == 8);
    for (const auto& c : r.certificates) {
        INFO(c.name << ": value " << c.value << " bound " << c.bound);
        CHECK(c.passed);
    }
}

TEST_CASE("seed agreement")
{
    auto& b = bench();
    SolverConfig cfg;
    cfg.seed = SeedProfile::bubble;
    const SolveReport rb = solve_ground_state(b.p, cfg, b.K, b.c);

    // a third, wider seed through the CSV route
    const auto path = std::filesystem::temp_directory_path() / "kcq_seed_wide.csv";
    write_csv(RadialField::sample(b.g, [](double r) { return 1.0 / (1.0 + r * r * r * r / 9.0); }), path.string());
    cfg.seed = SeedProfile::custom_csv;
    cfg.seed_csv = path.string();
    const SolveReport rc = solve_ground_state(b.p, cfg, b.K, b.c);
    std::filesystem::remove(path);

    CHECK(rel(rb.energy, b.rep.energy) < 1e-4);
    CHECK(rel(rc.energy, b.rep.energy) < 1e-4);
    CHECK(rb.seed == "bubble");
}

TEST_CASE("certificate formulas stay evaluable as b vanishes")
{
    auto& b = bench();
    PhysicalParams p = b.p;
    p.b = 0.0;
    const SharpConstants c = full_constants(p);
    const auto certs = certify(b.rep, p, c, b.K);
    const double delta = delta_lower_bound(p, c);
    const double qg = p.q * gamma_q(p.q);
    REQUIRE(std::isfinite(delta));
    for (const auto& x : certs)
        if (x.name == "c6") CHECK(x.bound == Approx(p.a * (0.5 - 1 / qg) * delta * delta).epsilon(1e-12));

    for (double bb : {1e-2, 1e-4, 1e-6}) {
        PhysicalParams pb = b.p;
        pb.b = bb;
        const SharpConstants cb = full_constants(pb);
        CHECK(energy_lower_bound(pb, cb, delta_lower_bound(pb, cb)) == Approx(energy_lower_bound(p, c, delta)).epsilon(2 * bb + 1e-9));
    }
}

TEST_CASE("rejected inputs")
{
    auto& b = bench();
    const auto path = std::filesystem::temp_directory_path() / "kcq_seed_zero.csv";
    write_csv(RadialField(b.g), path.string());
    SolverConfig cfg;
    cfg.seed = SeedProfile::custom_csv;
    cfg.seed_csv = path.string();
    CHECK_THROWS_AS(make_seed(cfg, b.p, b.g), std::domain_error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(solve_from(RadialField(b.g), b.p, SolverConfig{}, b.K, b.c), std::domain_error);

    SolverConfig bad;
    bad.step = 0.0;
    CHECK_THROWS(bad.validate());
    bad = SolverConfig{};
    bad.tol_grad = 1.0;
    CHECK_THROWS(bad.validate());
    bad = SolverConfig{};
    bad.max_iter = 0;
    CHECK_THROWS(bad.validate());
    CHECK_THROWS(seed_from_string("flat"));

    SolverConfig cap;
    cap.max_iter = 2;
    try {
        solve_ground_state(b.p, cap, b.K, b.c);
        FAIL("expected non-convergence");
    } catch (const SolveFailure& e) {
        CHECK(e.best().history.size() == 3);
        CHECK(e.best().certificates.size() == 8);
        CHECK(std::isfinite(e.best().grad_residual));
    }
}
