#include "kcq/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kcq {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

} // namespace

double lanczos_gamma(double x)
{
    using std::numbers::pi;
    if (x == std::floor(x) && x <= 0.0)
        throw std::domain_error("lanczos_gamma: pole at non-positive integer");
    if (x < 0.5)
        return pi / (std::sin(pi * x) * lanczos_gamma(1.0 - x));

    x -= 1.0;
    double acc = kLanczosCoef[0];
    for (int i = 1; i < 9; ++i)
        acc += kLanczosCoef[i] / (x + i);
    const double t = x + kLanczosG + 0.5;
    // split the power to keep t^(x+0.5) from overflowing before exp(-t)
    const double half = std::pow(t, 0.5 * (x + 0.5));
    return std::sqrt(2.0 * pi) * half * (half * std::exp(-t)) * acc;
}

double riemann_zeta(double s)
{
    if (s == 1.0)
        throw std::domain_error("riemann_zeta: pole at s = 1");
    constexpr int n = 40;
    std::array<double, n + 1> d{};
    double term = 1.0 / n; // (n+i-1)! 4^i / ((n-i)! (2i)!) at i = 0, times 1/n
    double sum = term;
    d[0] = n * sum;
    for (int i = 1; i <= n; ++i) {
        term *= 4.0 * (n + i - 1) * (n - i + 1) / ((2.0 * i - 1.0) * (2.0 * i));
        sum += term;
        d[i] = n * sum;
    }
    double eta = 0.0;
    for (int k = 0; k < n; ++k) {
        const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        eta += sgn * (d[k] - d[n]) * std::pow(k + 1.0, -s);
    }
    eta = -eta / d[n];
    return eta / (1.0 - std::pow(2.0, 1.0 - s));
}

} // namespace kcq
