#include "kcq/bubbles.hpp"
#include "kcq/config.hpp"
#include "kcq/fiber.hpp"
#include "kcq/gn.hpp"
#include "kcq/report.hpp"
#include "kcq/riesz.hpp"
#include "kcq/solver.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

using namespace kcq;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

json envelope(const std::string& command, const RunConfig& cfg, json report, json timing)
{
    json j;
    j["command"] = command;
    j["config"] = config_json(cfg);
    j["report"] = std::move(report);
    j["timing"] = std::move(timing);
    j["generated_at"] = utc_timestamp();
    return j;
}

std::string out_path(const RunConfig& cfg, const std::string& name)
{
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

int cmd_constants(const RunConfig& cfg)
{
    Timer t;
    const SharpConstants c = full_constants(cfg.params);
    json rep = constants_json(cfg.params, c);
    write_json(envelope("constants", cfg, rep, {{"total_seconds", t.seconds()}}), out_path(cfg, "constants.json"));
    std::cout << rep.dump(2) << '\n';
    return 0;
}

int cmd_gn(const RunConfig& cfg, bool write_profile)
{
    Timer t;
    const double p = cfg.gn_p > 0.0 ? cfg.gn_p : cfg.params.q;
    const GridPtr grid = RadialGrid::make(cfg.grid);
    const GroundStateProfile g = shoot_ground_state(p, grid);
    json rep = gn_json(g);
    rep["gn_exponent"] = gn_delta(p); // the power on |grad u|, not the gradient floor
    rep["sharpness_residual"] = gn_check(g.profile, p, g.C_p);
    write_json(envelope("gn", cfg, rep, {{"total_seconds", t.seconds()}}), out_path(cfg, "gn.json"));
    if (write_profile) write_csv(g.profile, out_path(cfg, "gn_profile.csv"));
    std::printf("p = %.6g  C_p = %.12g  omega(0) = %.12g\n", p, g.C_p, g.shoot_height);
    return 0;
}

int cmd_fiber(const RunConfig& cfg)
{
    if (cfg.fiber_profile.empty()) throw std::invalid_argument("fiber: --profile is required");
    Timer t;
    const GridPtr grid = RadialGrid::make(cfg.grid);
    RadialField u = field_from_csv(read_csv(cfg.fiber_profile), grid);
    normalize_mass(u, cfg.params.rho);
    const RieszKernel kernel(grid, cfg.params.alpha, cfg.threads);
    const FiberFunctionals f = fiber_functionals(u, cfg.params, kernel);
    const FiberCritical crit = locate_fiber_max(f, cfg.params);
    if (!(cfg.fiber_t_min > 0.0 && cfg.fiber_t_max > cfg.fiber_t_min && cfg.fiber_samples >= 2))
        throw std::invalid_argument("fiber: need 0 < t_min < t_max and samples >= 2");

    std::FILE* csv = std::fopen(out_path(cfg, "fiber.csv").c_str(), "w");
    if (!csv) throw std::runtime_error("cannot write fiber.csv");
    std::fprintf(csv, "t,E,dE,d2E,pohozaev\n");
    const double l0 = std::log(cfg.fiber_t_min), l1 = std::log(cfg.fiber_t_max);
    for (int i = 0; i < cfg.fiber_samples; ++i) {
        const double tt = std::exp(l0 + (l1 - l0) * i / (cfg.fiber_samples - 1));
        std::fprintf(csv, "%.17g,%.17g,%.17g,%.17g,%.17g\n", tt, fiber_energy(f, cfg.params, tt),
                     fiber_derivative(f, cfg.params, tt), fiber_second_derivative(f, cfg.params, tt),
                     pohozaev_value(scale_functionals(f, cfg.params, tt), cfg.params));
    }
    std::fclose(csv);

    json rep;
    rep["grad_sq"] = f.g2;
    rep["grad_quartic"] = f.g4;
    rep["lq_pow"] = f.nq;
    rep["choquard"] = f.choq;
    rep["t_u"] = crit.t_u;
    rep["E_at_t_u"] = crit.E_at_t;
    rep["E2_at_t_u"] = crit.E2_at_t;
    rep["newton_iterations"] = crit.iterations;
    write_json(envelope("fiber", cfg, rep, {{"total_seconds", t.seconds()}, {"kernel_seconds", kernel.build_seconds()}}),
               out_path(cfg, "fiber.json"));
    std::printf("t_u = %.12g  E(t_u) = %.12g  E''(t_u) = %.6g\n", crit.t_u, crit.E_at_t, crit.E2_at_t);
    return 0;
}

int cmd_solve(const RunConfig& cfg)
{
    Timer t;
    const GridPtr grid = RadialGrid::make(cfg.grid);
    const RieszKernel kernel(grid, cfg.params.alpha, cfg.threads);
    const SharpConstants consts = full_constants(cfg.params);
    SolveReport rep;
    bool failed = false;
    std::string why;
    try {
        rep = solve_ground_state(cfg.params, cfg.solver, kernel, consts);
    } catch (const SolveFailure& f) {
        rep = f.best();
        failed = true;
        why = f.what();
    }
    if (!rep.u_star.values.empty())
        rep.equation_residual = equation_residual(rep.u_star, cfg.params, kernel, rep.lambda);
    for (auto& w : regime_warnings(cfg, kernel, consts)) rep.warnings.push_back(w);

    json body = report_json(rep);
    body["constants"] = constants_json(cfg.params, consts);
    if (failed) body["failure"] = why;
    write_json(envelope("solve", cfg, body,
                        {{"total_seconds", t.seconds()}, {"kernel_seconds", kernel.build_seconds()},
                         {"kernel_bytes", kernel.memory_bytes()}}),
               out_path(cfg, "solve_report.json"));
    if (!rep.u_star.values.empty()) write_csv(rep.u_star, out_path(cfg, "profile.csv"));

    std::printf("energy = %.12g  lambda = %.10g  iterations = %d  certificates %d/%zu\n", rep.energy, rep.lambda,
                rep.iterations, rep.certificates_passed(), rep.certificates.size());
    for (const auto& c : rep.certificates)
        std::printf("  %s %s  value = %.6g  bound = %.6g\n", c.name.c_str(), c.passed ? "ok  " : "FAIL", c.value,
                    c.bound);
    for (const auto& w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (failed) {
        std::fprintf(stderr, "solve failed: %s\n", why.c_str());
        return 1;
    }
    return rep.all_certificates() ? 0 : 2;
}

int cmd_bubbles(const RunConfig& cfg)
{
    Timer t;
    const GridPtr grid = RadialGrid::make(cfg.grid);
    const RieszKernel kernel(grid, cfg.params.alpha, cfg.threads);
    const SharpConstants consts = full_constants(cfg.params);
    std::vector<double> ps = cfg.bubble_p;
    if (ps.empty()) ps.push_back(cfg.params.q);

    std::FILE* csv = std::fopen(out_path(cfg, "bubbles.csv").c_str(), "w");
    if (!csv) throw std::runtime_error("cannot write bubbles.csv");
    std::fprintf(csv, "p,eps,grad_sq,mass_sq,lp_pow,lq_pow,choquard,t_eps,fiber_max\n");
    json families = json::array();
    for (double p : ps) {
        const BubbleFamily fam = build_family(cfg.bubble_eps, cfg.params, kernel, p);
        for (const auto& m : fam.m)
            std::fprintf(csv, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p, m.eps, m.grad_sq,
                         m.mass_sq, m.lp_pow, m.nq, m.choq, m.t_eps, m.fiber_max);
        const AsymptoticsSummary s = measure_asymptotics(fam, consts, cfg.params.alpha);
        const auto a8 = check_A8(fam, cfg.params, consts);
        const double mu_star = estimate_mu_star(fam, cfg.params, consts);
        const MountainPass mp = mountain_pass_upper_bound(fam, cfg.params, consts);
        families.push_back(bubbles_json(fam, s, a8, mu_star, mp));
        std::printf("p = %g  A1 %s  A2 %s  A3 %s  A4 %s  mu* ~ %.6g  mountain-pass bound %.8g (threshold %.8g)\n", p,
                    s.a1.pass ? "ok" : "FAIL", s.a2.pass ? "ok" : "FAIL", s.a3.pass ? "ok" : "FAIL",
                    s.a4.pass ? "ok" : "FAIL", mu_star, mp.bound, mp.threshold);
    }
    std::fclose(csv);
    write_json(envelope("bubbles", cfg, {{"families", families}},
                        {{"total_seconds", t.seconds()}, {"kernel_seconds", kernel.build_seconds()}}),
               out_path(cfg, "bubbles_summary.json"));
    return 0;
}

int cmd_sweep(const RunConfig& cfg)
{
    if (cfg.sweep_axis != "mu" && cfg.sweep_axis != "rho")
        throw std::invalid_argument("sweep: axis must be rho or mu");
    Timer t;
    const GridPtr grid = RadialGrid::make(cfg.grid);
    const RieszKernel kernel(grid, cfg.params.alpha, cfg.threads);
    const auto pts = run_sweep(cfg, kernel);
    write_sweep_csv(pts, cfg.sweep_axis, out_path(cfg, "sweep.csv"));
    write_json(envelope("sweep", cfg, {{"points", sweep_json(pts, cfg.sweep_axis)}},
                        {{"total_seconds", t.seconds()}, {"kernel_seconds", kernel.build_seconds()}}),
               out_path(cfg, "sweep.json"));
    bool all_ok = true;
    for (const auto& p : pts) {
        std::printf("%s = %.10g  %s", cfg.sweep_axis.c_str(), p.value, p.status.c_str());
        if (p.have_report) std::printf("  m = %.12g  lambda = %.10g", p.report.energy, p.report.lambda);
        std::printf("\n");
        all_ok = all_ok && p.status == "converged";
    }
    return all_ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"kcq: normalized ground states of a Kirchhoff-Choquard equation in R^3"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string config_path, out_dir;
    int grid_n = 0;
    double r_max = 0.0;
    unsigned threads = 0;
    std::vector<std::string> sets;
    app.add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--grid-n", grid_n, "number of radial nodes");
    app.add_option("--r-max", r_max, "domain radius");
    app.add_option("--threads", threads, "worker threads");
    app.add_option("--set", sets, "override a config key (key=value), repeatable");

    auto* constants = app.add_subcommand("constants", "sharp constants and thresholds");
    auto* gn = app.add_subcommand("gn", "Gagliardo-Nirenberg ground state by shooting");
    double gn_p = 0.0;
    bool gn_profile = false;
    gn->add_option("--p", gn_p, "exponent in (2, 6)");
    gn->add_flag("--write-profile", gn_profile, "also write gn_profile.csv");
    auto* fiber = app.add_subcommand("fiber", "fiber map of a profile");
    std::string profile;
    fiber->add_option("--profile", profile, "profile CSV (r,u)")->required()->check(CLI::ExistingFile);
    auto* solve = app.add_subcommand("solve", "ground state on the Pohozaev manifold");
    auto* bubbles = app.add_subcommand("bubbles", "bubble family asymptotics");
    auto* sweep = app.add_subcommand("sweep", "solve over a list of rho or mu");
    std::string axis, values;
    sweep->add_option("--axis", axis, "rho | mu");
    sweep->add_option("--values", values, "comma separated list");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) load_config_file(cfg, config_path);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
            apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (grid_n > 0) cfg.grid.n = grid_n;
        if (r_max > 0.0) cfg.grid.r_max = r_max;
        if (threads > 0) cfg.threads = threads;
        if (gn_p > 0.0) cfg.gn_p = gn_p;
        if (!profile.empty()) cfg.fiber_profile = profile;
        if (!axis.empty()) cfg.sweep_axis = axis;
        if (!values.empty()) cfg.sweep_values = parse_list(values);
        cfg.params.validate();
        cfg.solver.validate();
        std::filesystem::create_directories(cfg.out_dir);

        if (*constants) return cmd_constants(cfg);
        if (*gn) return cmd_gn(cfg, gn_profile);
        if (*fiber) return cmd_fiber(cfg);
        if (*solve) return cmd_solve(cfg);
        if (*bubbles) return cmd_bubbles(cfg);
        if (*sweep) return cmd_sweep(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
