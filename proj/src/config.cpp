#include "kcq/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kcq {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
    }
    if (pos != v.size()) throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
    return x;
}

std::string fmt(double x)
{
    // shortest text that reads back to the same double
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string fmt_list(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

} // namespace

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double("list", item));
    }
    return out;
}

void apply_setting(RunConfig& c, const std::string& key_in, const std::string& value_in)
{
    const std::string key = trim(key_in), v = trim(value_in);
    if (key == "a") c.params.a = to_double(key, v);
    else if (key == "b") c.params.b = to_double(key, v);
    else if (key == "rho") c.params.rho = to_double(key, v);
    else if (key == "mu") c.params.mu = to_double(key, v);
    else if (key == "q") c.params.q = to_double(key, v);
    else if (key == "alpha") c.params.alpha = to_double(key, v);
    else if (key == "grid.n") c.grid.n = static_cast<std::size_t>(to_double(key, v));
    else if (key == "grid.r_max") c.grid.r_max = to_double(key, v);
    else if (key == "grid.kind") c.grid.kind = grid_kind_from_string(v);
    else if (key == "grid.r_half") c.grid.r_half = to_double(key, v);
    else if (key == "solver.step") c.solver.step = to_double(key, v);
    else if (key == "solver.tol_grad") c.solver.tol_grad = to_double(key, v);
    else if (key == "solver.tol_poho") c.solver.tol_poho = to_double(key, v);
    else if (key == "solver.max_iter") c.solver.max_iter = static_cast<int>(to_double(key, v));
    else if (key == "solver.seed") c.solver.seed = seed_from_string(v);
    else if (key == "solver.seed_csv") c.solver.seed_csv = v;
    else if (key == "solver.armijo_shrink") c.solver.armijo_shrink = to_double(key, v);
    else if (key == "solver.armijo_c") c.solver.armijo_c = to_double(key, v);
    else if (key == "solver.step_growth") c.solver.step_growth = to_double(key, v);
    else if (key == "solver.step_max") c.solver.step_max = to_double(key, v);
    else if (key == "bubbles.eps") c.bubble_eps = parse_list(v);
    else if (key == "bubbles.p") c.bubble_p = parse_list(v);
    else if (key == "sweep.axis") {
        if (v != "rho" && v != "mu") throw std::invalid_argument("config: sweep.axis must be rho or mu");
        c.sweep_axis = v;
    }
    else if (key == "sweep.values") c.sweep_values = parse_list(v);
    else if (key == "gn.p") c.gn_p = to_double(key, v);
    else if (key == "fiber.profile") c.fiber_profile = v;
    else if (key == "fiber.t_min") c.fiber_t_min = to_double(key, v);
    else if (key == "fiber.t_max") c.fiber_t_max = to_double(key, v);
    else if (key == "fiber.samples") c.fiber_samples = static_cast<int>(to_double(key, v));
    else if (key == "out") c.out_dir = v;
    else if (key == "threads") c.threads = static_cast<unsigned>(to_double(key, v));
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

void load_config_file(RunConfig& cfg, const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
        apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c)
{
    return {
        {"a", fmt(c.params.a)},
        {"b", fmt(c.params.b)},
        {"rho", fmt(c.params.rho)},
        {"mu", fmt(c.params.mu)},
        {"q", fmt(c.params.q)},
        {"alpha", fmt(c.params.alpha)},
        {"grid.n", std::to_string(c.grid.n)},
        {"grid.r_max", fmt(c.grid.r_max)},
        {"grid.kind", to_string(c.grid.kind)},
        {"grid.r_half", fmt(c.grid.r_half)},
        {"solver.step", fmt(c.solver.step)},
        {"solver.tol_grad", fmt(c.solver.tol_grad)},
        {"solver.tol_poho", fmt(c.solver.tol_poho)},
        {"solver.max_iter", std::to_string(c.solver.max_iter)},
        {"solver.seed", to_string(c.solver.seed)},
        {"solver.seed_csv", c.solver.seed_csv},
        {"solver.armijo_shrink", fmt(c.solver.armijo_shrink)},
        {"solver.armijo_c", fmt(c.solver.armijo_c)},
        {"solver.step_growth", fmt(c.solver.step_growth)},
        {"solver.step_max", fmt(c.solver.step_max)},
        {"bubbles.eps", fmt_list(c.bubble_eps)},
        {"bubbles.p", fmt_list(c.bubble_p)},
        {"sweep.axis", c.sweep_axis},
        {"sweep.values", fmt_list(c.sweep_values)},
        {"gn.p", fmt(c.gn_p)},
        {"fiber.profile", c.fiber_profile},
        {"fiber.t_min", fmt(c.fiber_t_min)},
        {"fiber.t_max", fmt(c.fiber_t_max)},
        {"fiber.samples", std::to_string(c.fiber_samples)},
        {"out", c.out_dir},
        {"threads", std::to_string(c.threads)},
    };
}

} // namespace kcq
