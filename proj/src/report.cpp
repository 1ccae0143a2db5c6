#include "kcq/report.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace kcq {

namespace {

json num(double x)
{
    if (!std::isfinite(x)) return nullptr;
    return x;
}

} // namespace

json config_json(const RunConfig& cfg)
{
    json j = json::object();
    for (const auto& [k, v] : config_entries(cfg)) j[k] = v;
    return j;
}

SharpConstants full_constants(const PhysicalParams& params)
{
    SharpConstants c = compute_closed_form_constants(params);
    c.C_q = gn_constant(params.q);
    return c;
}

json constants_json(const PhysicalParams& params, const SharpConstants& c)
{
    json j;
    j["a_alpha"] = c.A_alpha;
    j["c_alpha"] = c.C_alpha;
    j["s"] = c.S;
    j["s_alpha"] = c.S_alpha;
    j["gamma_q"] = c.gamma_q;
    j["c_q"] = c.C_q;
    j["delta"] = num(c.C_q > 0.0 ? delta_lower_bound(params, c) : NAN);
    j["threshold"] = energy_threshold(params, c);
    return j;
}

json report_json(const SolveReport& r)
{
    json j;
    j["converged"] = r.converged;
    j["seed"] = r.seed;
    j["energy"] = num(r.energy);
    j["lambda"] = num(r.lambda);
    j["lambda_alt"] = num(r.lambda_alt);
    j["poho_residual"] = num(r.poho_residual);
    j["grad_residual"] = num(r.grad_residual);
    j["equation_residual"] = num(r.equation_residual);
    j["second_variation"] = num(r.second_variation);
    j["iterations"] = r.iterations;
    j["grad_sq"] = num(r.functionals.g2);
    j["lq_pow"] = num(r.functionals.nq);
    j["choquard"] = num(r.functionals.choq);
    json certs = json::object();
    for (const auto& c : r.certificates)
        certs[c.name] = {{"passed", c.passed}, {"value", num(c.value)}, {"bound", num(c.bound)},
                         {"description", c.description}};
    j["certificates"] = certs;
    j["certificates_passed"] = r.certificates_passed();
    j["warnings"] = r.warnings;
    json hist = json::array();
    for (const auto& h : r.history)
        hist.push_back({h.iteration, num(h.energy), num(h.grad_residual), num(h.poho_residual), num(h.t_u), num(h.step)});
    j["history_columns"] = {"iteration", "energy", "grad_residual", "poho_residual", "t_u", "step"};
    j["history"] = hist;
    return j;
}

json gn_json(const GroundStateProfile& g)
{
    json j;
    j["p"] = g.p;
    j["omega0"] = g.shoot_height;
    j["l2_norm"] = g.l2_norm;
    j["c_p"] = g.C_p;
    return j;
}

json bubbles_json(const BubbleFamily& fam, const AsymptoticsSummary& s, const std::vector<double>& a8, double mu_star,
                  const MountainPass& mp)
{
    json j;
    j["p"] = fam.p;
    j["epsilons"] = fam.epsilons;
    auto law = [](const LawFit& l) {
        return json{{"leading_constant", num(l.leading_constant)}, {"order", num(l.order)}, {"pass", l.pass},
                    {"values", l.values}};
    };
    j["A1"] = law(s.a1);
    j["A2"] = law(s.a2);
    j["A2"]["r2"] = s.a2_r2;
    j["A3"] = law(s.a3);
    j["A3"]["limit"] = s.a3_limit;
    j["A4"] = law(s.a4);
    j["A8_margins"] = a8;
    j["mu_star_estimate"] = mu_star;
    j["mountain_pass_bound"] = mp.bound;
    j["mountain_pass_eps"] = fam.epsilons.at(mp.argmin);
    j["mountain_pass_per_eps"] = mp.per_eps;
    j["threshold"] = mp.threshold;
    j["below_threshold"] = mp.below_threshold;
    return j;
}

std::vector<std::string> regime_warnings(const RunConfig& cfg, const RieszKernel& kernel, const SharpConstants& consts)
{
    std::vector<std::string> out;
    try {
        const BubbleFamily fam = build_family(cfg.bubble_eps, cfg.params, kernel, cfg.params.q);
        const auto margins = check_A8(fam, cfg.params, consts);
        bool any = false;
        for (double m : margins) any = any || m > 0.0;
        if (!any) out.push_back("smallness condition (A8) fails at every bubble scale for this (rho, mu)");
    } catch (const std::exception& e) {
        out.push_back(std::string("regime check skipped: ") + e.what());
    }
    return out;
}

std::vector<SweepPoint> run_sweep(const RunConfig& cfg, const RieszKernel& kernel)
{
    if (cfg.sweep_values.empty()) throw std::invalid_argument("sweep: no values given");
    std::vector<SweepPoint> pts(cfg.sweep_values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < pts.size();) {
            SweepPoint& pt = pts[i];
            pt.value = cfg.sweep_values[i];
            RunConfig local = cfg;
            (cfg.sweep_axis == "rho" ? local.params.rho : local.params.mu) = pt.value;
            try {
                local.params.validate();
                const SharpConstants consts = full_constants(local.params);
                SolveReport rep = solve_ground_state(local.params, local.solver, kernel, consts);
                rep.equation_residual = equation_residual(rep.u_star, local.params, kernel, rep.lambda);
                for (auto& w : regime_warnings(local, kernel, consts)) rep.warnings.push_back(w);
                pt.status = rep.all_certificates() ? "converged" : "certificates-failed";
                pt.report = std::move(rep);
                pt.have_report = true;
            } catch (const SolveFailure& f) {
                pt.status = std::string("failed: ") + f.what();
                pt.report = f.best();
                pt.have_report = true;
            } catch (const std::exception& e) {
                pt.status = std::string("failed: ") + e.what();
            }
        }
    };
    const unsigned nt = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(pts.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    }
    bool any_ok = false;
    for (const auto& p : pts) any_ok = any_ok || p.status.rfind("failed", 0) != 0;
    if (!any_ok) throw std::runtime_error("sweep: every point failed");
    return pts;
}

void write_sweep_csv(const std::vector<SweepPoint>& pts, const std::string& axis, const std::string& path)
{
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fprintf(f, "%s,m_rho,lambda,certificates_passed,iterations,status\n", axis.c_str());
    for (const auto& p : pts) {
        if (p.have_report)
            std::fprintf(f, "%.17g,%.17g,%.17g,%d,%d,%s\n", p.value, p.report.energy, p.report.lambda,
                         p.report.certificates_passed(), p.report.iterations, p.status.c_str());
        else
            std::fprintf(f, "%.17g,,,0,0,%s\n", p.value, p.status.c_str());
    }
    std::fclose(f);
}

json sweep_json(const std::vector<SweepPoint>& pts, const std::string& axis)
{
    json arr = json::array();
    for (const auto& p : pts) {
        json e;
        e[axis] = p.value;
        e["status"] = p.status;
        e["report"] = p.have_report ? report_json(p.report) : json(nullptr);
        arr.push_back(e);
    }
    return arr;
}

std::string utc_timestamp()
{
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_json(const json& j, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

} // namespace kcq
