#pragma once

#include "kcq/radial.hpp"

#include <vector>

namespace kcq {

struct ShootingOptions {
    double h = 1e-3;
    double r_max = 30.0;
};

/// Positive decaying solution of Q'' + (2/r) Q' = Q - Q^{p-1} sampled on the
/// auxiliary uniform grid up to r_splice, continued by the linear tail
/// Q(r_splice) (r_splice / r) e^{-(r - r_splice)}.
struct NormalizedGroundState {
    double p = 0.0;
    double q0 = 0.0;
    double h = 0.0;
    double r_splice = 0.0;
    std::vector<double> q, dq; // on r_k = k h, k <= r_splice / h
    double l2_sq = 0.0;        // |Q|_2^2 including the tail
    int bisections = 0;

    double value(double r) const;
    double derivative(double r) const;
    /// Q'' at step k, from the equation.
    double curvature(std::size_t k) const;
};

NormalizedGroundState shoot_normalized(double p, const ShootingOptions& opts = {});

struct GroundStateProfile {
    double p = 0.0;
    double shoot_height = 0.0; // omega(0)
    RadialField profile;
    double l2_norm = 0.0;
    double C_p = 0.0;
};

/// omega_p solving -Lap w + (1/delta - 1) w = (2/(p delta)) w^{p-1}, and C_p.
GroundStateProfile shoot_ground_state(double p, GridPtr grid, const ShootingOptions& opts = {});

/// C_p alone, from the auxiliary shooting grid.
double gn_constant(double p, const ShootingOptions& opts = {});

/// C_p |grad u|^delta |u|_2^{1-delta} - |u|_p.
double gn_check(const RadialField& u, double p, double C_p);

double gn_delta(double p);

} // namespace kcq
