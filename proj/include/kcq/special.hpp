#pragma once

namespace kcq {

/// Gamma function by the Lanczos approximation (g = 7, 9 terms), with
/// reflection below 1/2. Relative accuracy around 1e-15 on the real line.
double lanczos_gamma(double x);

/// Riemann zeta for real s != 1, via Borwein's alternating-series
/// acceleration of the Dirichlet eta function.
double riemann_zeta(double s);

} // namespace kcq
