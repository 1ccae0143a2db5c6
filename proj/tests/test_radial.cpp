#include "oracles.hpp"

#include "kcq/bubbles.hpp"
#include "kcq/params.hpp"
#include "kcq/radial.hpp"

#include <doctest.h>

#include <filesystem>

using namespace kcq;
using doctest::Approx;

namespace {

GridPtr grid(std::size_t n = 2048, double r_max = 50.0, GridKind kind = GridKind::geometric, double r_half = 2.0)
{
    GridSpec s;
    s.n = n;
    s.r_max = r_max;
    s.kind = kind;
    s.r_half = r_half;
    return RadialGrid::make(s);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

RadialField gaussian(GridPtr g) { return RadialField::sample(g, [](double r) { return std::exp(-r * r); }); }

// C-infinity step: 1 below a, 0 above b
double smooth_step(double r, double a, double b)
{
    if (r <= a) return 1.0;
    if (r >= b) return 0.0;
    const double x = (r - a) / (b - a);
    const double f = std::exp(-1.0 / x), g = std::exp(-1.0 / (1.0 - x));
    return g / (f + g);
}

double max_interior_error(const RadialField& lap, const std::function<double(double)>& exact, double r_lim)
{
    double e = 0.0;
    for (std::size_t i = 0; i < lap.size(); ++i)
        if (lap.grid->r(i) < r_lim) e = std::max(e, std::abs(lap[i] - exact(lap.grid->r(i))));
    return e;
}

} // namespace

TEST_CASE("grid invariants")
{
    for (auto kind : {GridKind::uniform, GridKind::geometric})
        for (std::size_t n : {64, 500, 2048}) {
            auto g = grid(n, 50.0, kind);
            double sw = 0.0;
            for (double w : g->weights()) {
                CHECK(w >= 0.0);
                sw += w;
            }
            CHECK(rel(sw, 4.0 / 3.0 * oracle::pi * std::pow(50.0, 3)) < 1e-10);
            for (std::size_t i = 1; i < n; ++i) CHECK(g->r(i) > g->r(i - 1));
            CHECK(g->r(0) >= 0.0);
            CHECK(g->nodes().back() < 50.0);
        }
    CHECK_THROWS(grid(63));
    CHECK_THROWS(grid(128, -1.0));
    CHECK_THROWS(grid(128, 3.0, GridKind::geometric, 2.0));
    // half the geometric nodes below r_half
    auto g = grid();
    CHECK(g->count_below(2.0) == 1024);
}

TEST_CASE("uniform weights integrate r^k exactly for k <= 2")
{
    for (double R : {1.0, 8.0, 50.0}) {
        auto g = grid(256, R, GridKind::uniform);
        for (int k = 0; k <= 2; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < g->size(); ++i) s += g->weight(i) * std::pow(g->r(i), k);
            CHECK(rel(s, 4.0 * oracle::pi * std::pow(R, k + 3) / (k + 3)) < 1e-10);
        }
    }
}

TEST_CASE("mass_sq")
{
    const double exact = std::pow(oracle::pi / 2.0, 1.5);
    CHECK(rel(mass_sq(gaussian(grid())), exact) < 1e-8);
    CHECK(rel(mass_sq(gaussian(grid(2048, 8.0, GridKind::uniform))), exact) < 1e-8);
    CHECK(mass_sq(RadialField(grid())) == 0.0);

    // bump against adaptive quadrature, and convergence under refinement
    auto f = [](double r) { return oracle::smooth_bump(r) * oracle::smooth_bump(r); };
    const double ref = oracle::radial_integral(f, 1.5);
    double prev_err = INFINITY;
    for (std::size_t n : {256, 512, 1024, 2048}) {
        auto u = RadialField::sample(grid(n), [](double r) { return oracle::smooth_bump(r); });
        const double err = rel(mass_sq(u), ref);
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 1e-8);
}

TEST_CASE("grad_norm_sq")
{
    const double exact = 3.0 * std::pow(oracle::pi / 2.0, 1.5);
    CHECK(rel(grad_norm_sq(gaussian(grid())), exact) < 1e-6);
    CHECK(rel(grad_norm_sq(gaussian(grid(2048, 10.0, GridKind::uniform))), exact) < 1e-6);

    // constant on [0, 5], so only the transition contributes
    auto step = [](double r) { return smooth_step(r, 5.0, 10.0); };
    auto g = grid();
    const double ref = oracle::radial_integral(
        [](double r) {
            if (r <= 5.0 || r >= 10.0) return 0.0;
            const double x = (r - 5.0) / 5.0;
            const double f = std::exp(-1.0 / x), g = std::exp(-1.0 / (1.0 - x));
            const double d = (-g / ((1 - x) * (1 - x)) * f - g * f / (x * x)) / ((f + g) * (f + g)) / 5.0;
            return d * d;
        },
        50.0, {5.0, 10.0});
    CHECK(rel(grad_norm_sq(RadialField::sample(g, step)), ref) < 1e-6);

    // bubble cut to the ball of radius 100 -> S^{3/2} within 2%
    auto g100 = grid(2048, 100.0);
    RadialField u = aubin_talenti(1.0, g100);
    const double edge = std::pow(3.0, 0.25) / std::sqrt(1.0 + 100.0 * 100.0);
    for (double& x : u.values) x -= edge;
    CHECK(rel(grad_norm_sq(u), std::pow(compute_S(), 1.5)) < 0.02);
}

TEST_CASE("lq_norm_pow")
{
    auto g = grid();
    auto u = gaussian(g);
    CHECK(rel(lq_norm_pow(u, 2.0), mass_sq(u)) < 1e-15);
    const double ref = oracle::radial_integral([](double r) { return std::exp(-4 * r * r); }, 50.0, {1.0, 3.0});
    CHECK(rel(lq_norm_pow(u, 4.0), ref) < 1e-8);
    CHECK(rel(ref, std::pow(oracle::pi / 4.0, 1.5)) < 1e-12);
    CHECK_THROWS(lq_norm_pow(u, 0.5));
}

TEST_CASE("homogeneity")
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    auto g = grid(512);
    auto u = RadialField::sample(g, [](double r) { return std::exp(-r * r) * (1 + 0.3 * std::cos(r)); });
    for (int k = 0; k < 10; ++k) {
        const double c = d(gen);
        RadialField cu = u;
        for (double& x : cu.values) x *= c;
        CHECK(rel(mass_sq(cu), c * c * mass_sq(u)) < 1e-14);
        CHECK(rel(grad_norm_sq(cu), c * c * grad_norm_sq(u)) < 1e-14);
        for (double q : {3.0, 5.0}) CHECK(rel(lq_norm_pow(cu, q), std::pow(std::abs(c), q) * lq_norm_pow(u, q)) < 1e-13);
    }
}

TEST_CASE("radial laplacian")
{
    auto lap_gauss = [](double r) { return (4 * r * r - 6) * std::exp(-r * r); };
    std::vector<double> errs;
    for (std::size_t n : {512, 1024, 2048}) {
        auto g = grid(n, 10.0, GridKind::uniform);
        errs.push_back(max_interior_error(radial_laplacian(gaussian(g)), lap_gauss, 9.0));
    }
    for (std::size_t k = 1; k < errs.size(); ++k) CHECK(std::log2(errs[k - 1] / errs[k]) > 1.8);
    CHECK(errs.back() < 1e-6);
    // the origin value is 3 u''(0) = -6
    auto g = grid(2048, 10.0, GridKind::uniform);
    CHECK(radial_laplacian(gaussian(g))[0] == Approx(lap_gauss(g->r(0))).epsilon(1e-6));

    // r^2 on interior nodes, away from the Dirichlet edge
    for (auto kind : {GridKind::uniform, GridKind::geometric}) {
        auto gg = grid(512, 20.0, kind, 2.0);
        auto lap = radial_laplacian(RadialField::sample(gg, [](double r) { return r * r; }));
        CHECK(max_interior_error(lap, [](double) { return 6.0; }, 15.0) < 1e-9);
    }

    // random smooth field on the graded grid
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> d(0.5, 1.5);
    const double c1 = d(gen), c2 = d(gen), c3 = d(gen);
    auto f = [&](double r) { return std::exp(-c1 * r * r) * (1 + c2 * std::cos(c3 * r)); };
    auto lapf = [&](double r) {
        const double g = std::exp(-c1 * r * r), g1 = -2 * c1 * r * g, g2 = (4 * c1 * c1 * r * r - 2 * c1) * g;
        const double h = 1 + c2 * std::cos(c3 * r), h1 = -c2 * c3 * std::sin(c3 * r), h2 = -c2 * c3 * c3 * std::cos(c3 * r);
        return g2 * h + 2 * g1 * h1 + g * h2 + 2.0 * (g1 * h + g * h1) / r;
    };
    errs.clear();
    for (std::size_t n : {128, 256, 512}) {
        auto gg = grid(n, 12.0, GridKind::geometric, 2.0);
        errs.push_back(max_interior_error(radial_laplacian(RadialField::sample(gg, f)), lapf, 8.0));
    }
    for (std::size_t k = 1; k < errs.size(); ++k) CHECK(std::log2(errs[k - 1] / errs[k]) > 1.8);
}

TEST_CASE("dilation")
{
    auto g = grid();
    auto u = RadialField::sample(g, [](double r) { return std::exp(-r * r) * (1 + 0.5 * r * r); });
    const RadialField same = dilate(u, 1.0);
    CHECK(same.values == u.values);
    for (double t : {0.25, 4.0}) {
        const auto d = dilate_report(u, t);
        CHECK(rel(mass_sq(d.field), mass_sq(u)) < 1e-14);
        CHECK_FALSE(d.under_resolved);
    }
    for (double t : {0.5, 0.8, 1.3, 2.0}) {
        CHECK(rel(grad_norm_sq(dilate(u, t)), t * t * grad_norm_sq(u)) < 1e-3);
        RadialField back = dilate(dilate(u, t), 1.0 / t);
        RadialField diff(g);
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = back[i] - u[i];
        CHECK(std::sqrt(mass_sq(diff) / mass_sq(u)) < 1e-4);
    }
    // spreading a profile past r_max loses mass before renormalisation
    const auto wide = dilate_report(u, 0.05);
    CHECK(wide.under_resolved);
    CHECK(std::abs(wide.mass_drift) > 1e-4);
    CHECK_THROWS(dilate(u, 0.0));
}

TEST_CASE("interpolation and csv")
{
    auto g = grid(1024);
    auto u = RadialField::sample(g, [](double r) { return std::exp(-r * r); });
    for (double r : {0.0, 0.01, 0.33, 1.7, 4.0}) CHECK(interpolate(u, r) == Approx(std::exp(-r * r)).epsilon(1e-6));
    CHECK(interpolate(u, 60.0) == 0.0);

    const auto path = (std::filesystem::temp_directory_path() / "kcq_radial_test.csv").string();
    write_csv(u, path);
    const CsvProfile prof = read_csv(path);
    CHECK(prof.has_spec);
    CHECK(prof.spec == g->spec());
    CHECK(field_from_csv(prof, g).values == u.values);
    auto g2 = grid(2048, 30.0, GridKind::uniform);
    const RadialField v = field_from_csv(prof, g2);
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) e = std::max(e, std::abs(v[i] - std::exp(-g2->r(i) * g2->r(i))));
    CHECK(e < 1e-6);
    std::filesystem::remove(path);

    CHECK_THROWS(require_same_grid(u, v));
    RadialField zero(g);
    CHECK_THROWS(normalize_mass(zero, 1.0));
}
