#include "kcq/riesz.hpp"

#include "kcq/special.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace kcq {

using std::numbers::pi;

double angular_kernel(double r, double s, double alpha)
{
    if (r < 0.0 || s < 0.0) throw std::domain_error("angular_kernel: negative radius");
    if (r == 0.0 && s == 0.0) throw std::domain_error("angular_kernel: r = s = 0");
    const double big = std::max(r, s), small = std::min(r, s);
    if (small == 0.0) return 4.0 * pi * std::pow(big, alpha - 3.0);
    const double beta = alpha - 1.0;
    if (r == s) {
        if (beta <= 0.0) return std::numeric_limits<double>::infinity();
        return 2.0 * pi / (r * s * beta) * std::pow(2.0 * r, beta);
    }
    const double x = small / big;
    const double l1 = std::log1p(x), l2 = std::log1p(-x);
    const double d = 0.5 * (l1 - l2); // atanh(x)
    if (alpha == 1.0)
        return 2.0 * pi / (r * s) * 2.0 * d;
    // (r+s)^beta - |r-s|^beta = big^beta * 2 e^{beta m} sinh(beta d), m = (l1+l2)/2
    const double bd = beta * d;
    const double sinh_over_beta = std::abs(bd) < 1e-4 ? d * (1.0 + bd * bd / 6.0) : std::sinh(bd) / beta;
    return 2.0 * pi / (r * s) * std::pow(big, beta) * 2.0 * std::exp(0.5 * beta * (l1 + l2)) * sinh_over_beta;
}

RieszKernel::RieszKernel(GridPtr grid, double alpha, unsigned threads)
    : grid_(std::move(grid)), alpha_(alpha), n_(grid_->size()), m_(n_ * n_, 0.0)
{
    const auto t0 = std::chrono::steady_clock::now();
    const double A = compute_A_alpha(alpha);
    const double beta = alpha - 1.0;
    const auto& r = grid_->nodes();
    const auto& w = grid_->weights();
    const double zeta2 = 2.0 * riemann_zeta(-beta);

    auto rows = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < n_; i += stride) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double v = A / (4.0 * pi) * w[i] * w[j] * angular_kernel(r[i], r[j], alpha);
                m_[i * n_ + j] = v;
                m_[j * n_ + i] = v;
            }
            // Singular cell: corrected trapezoid in the grid parameter, where the
            // |r - s|^beta singularity is handled by the zeta (log for beta = 0)
            // end-point correction.
            const double dr = grid_->spacing(i);
            double coef;
            if (alpha == 1.0)
                coef = A * 2.0 * pi * dr * std::log(4.0 * pi * r[i] / dr);
            else
                coef = A * (2.0 * pi / beta) * dr * (std::pow(2.0 * r[i], beta) + zeta2 * std::pow(dr, beta));
            m_[i * n_ + i] = w[i] * coef;
        }
    };
    const unsigned nt = std::max(1u, threads);
    if (nt == 1) {
        rows(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < nt; ++t) pool.emplace_back(rows, t, nt);
    }
    build_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string RieszKernel::diag_rule() const
{
    if (alpha_ == 1.0)
        return "log-corrected trapezoid in grid parameter: 2 pi A dr ln(4 pi r / dr)";
    return "zeta-corrected trapezoid in grid parameter: A (2 pi/beta) dr [(2r)^beta + 2 zeta(-beta) dr^beta]";
}

void RieszKernel::apply(const double* g, double* v) const
{
    const auto& w = grid_->weights();
    for (std::size_t i = 0; i < n_; ++i) {
        const double* row = &m_[i * n_];
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += row[j] * g[j];
        v[i] = s / w[i];
    }
}

double RieszKernel::quadratic(const double* f) const
{
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        if (f[i] == 0.0) continue;
        const double* row = &m_[i * n_];
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += row[j] * f[j];
        total += f[i] * s;
    }
    return total;
}

RadialField riesz_convolve(const RieszKernel& kernel, const RadialField& g)
{
    if (!g.grid || !g.grid->same_as(*kernel.grid())) throw std::invalid_argument("riesz_convolve: grid mismatch");
    RadialField v(g.grid);
    kernel.apply(g.values.data(), v.values.data());
    return v;
}

double choquard_energy(const RieszKernel& kernel, const RadialField& u)
{
    if (!u.grid || !u.grid->same_as(*kernel.grid())) throw std::invalid_argument("choquard_energy: grid mismatch");
    std::vector<double> f(u.size());
    const double p = kernel.alpha() + 3.0;
    for (std::size_t i = 0; i < u.size(); ++i) f[i] = std::pow(std::abs(u[i]), p);
    return kernel.quadratic(f.data());
}

double hls_check(const RadialField& u, const RieszKernel& kernel, const SharpConstants& consts)
{
    const double al = kernel.alpha();
    const double n6 = lq_norm_pow(u, 6.0);
    return consts.A_alpha * consts.C_alpha * std::pow(n6, (al + 3.0) / 3.0) - choquard_energy(kernel, u);
}

} // namespace kcq
