#pragma once

#include "kcq/fiber.hpp"
#include "kcq/params.hpp"
#include "kcq/radial.hpp"
#include "kcq/riesz.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace kcq {

enum class SeedProfile { gaussian, bubble, custom_csv };

std::string to_string(SeedProfile s);
SeedProfile seed_from_string(const std::string& s);

struct SolverConfig {
    double step = 1e-2;
    double tol_grad = 1e-5;
    double tol_poho = 1e-6;
    int max_iter = 5000;
    SeedProfile seed = SeedProfile::gaussian;
    std::string seed_csv;
    double armijo_shrink = 0.5;
    double armijo_c = 1e-4;
    double step_growth = 2.0; // applied after each accepted step
    double step_max = 10.0;

    void validate() const;
};

double energy(const RadialField& u, const PhysicalParams& params, const RieszKernel& kernel);
double pohozaev(const RadialField& u, const PhysicalParams& params, const RieszKernel& kernel);

/// G = -(a + b g2) Lap u - mu |u|^{q-2} u - (I_alpha * |u|^{alpha+3}) |u|^{alpha+1} u.
RadialField euler_lagrange_gradient(const RadialField& u, const PhysicalParams& params, const RieszKernel& kernel);

struct Multipliers {
    double lambda = 0.0;
    double lambda_alt = 0.0;
};

Multipliers lagrange_multiplier(const RadialField& u, const PhysicalParams& params, const RieszKernel& kernel);

/// ||G - lambda u||_2 / (||u||_2 max(1, |lambda|)) with the operators applied afresh.
double equation_residual(const RadialField& u, const PhysicalParams& params, const RieszKernel& kernel, double lambda);

struct Certificate {
    std::string name;
    std::string description;
    bool passed = false;
    double value = 0.0;
    double bound = 0.0;
};

struct IterationRecord {
    int iteration = 0;
    double energy = 0.0;
    double grad_residual = 0.0;
    double poho_residual = 0.0;
    double t_u = 1.0;
    double step = 0.0;
};

struct SolveReport {
    RadialField u_star;
    double energy = 0.0;
    double lambda = 0.0;
    double lambda_alt = 0.0;
    double poho_residual = 0.0;
    double grad_residual = 0.0;
    double equation_residual = 0.0;
    double second_variation = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string seed;
    FiberFunctionals functionals;
    double tol_grad = 0.0, tol_poho = 0.0;
    std::vector<Certificate> certificates;
    std::vector<IterationRecord> history;
    std::vector<std::string> warnings;

    bool all_certificates() const;
    int certificates_passed() const;
};

class SolveFailure : public std::runtime_error {
public:
    SolveFailure(const std::string& what, SolveReport best) : std::runtime_error(what), best_(std::move(best)) {}
    const SolveReport& best() const { return best_; }

private:
    SolveReport best_;
};

RadialField make_seed(const SolverConfig& config, const PhysicalParams& params, GridPtr grid);

/// Minimises max_t Phi(t * u) over the mass sphere by preconditioned projected
/// descent. Certificates are evaluated on the result. Throws SolveFailure on
/// non-convergence.
SolveReport solve_ground_state(const PhysicalParams& params, const SolverConfig& config, const RieszKernel& kernel,
                               const SharpConstants& consts);
SolveReport solve_from(RadialField seed, const PhysicalParams& params, const SolverConfig& config,
                       const RieszKernel& kernel, const SharpConstants& consts);

std::vector<Certificate> certify(const SolveReport& report, const PhysicalParams& params, const SharpConstants& consts,
                                 const RieszKernel& kernel);

} // namespace kcq
