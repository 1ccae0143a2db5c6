#pragma once

#include "kcq/params.hpp"
#include "kcq/radial.hpp"

#include <memory>
#include <string>
#include <vector>

namespace kcq {

/// k_alpha(r,s) = integral over the unit sphere of |r e1 - s theta|^{alpha-3}.
/// Returns +inf at r = s for alpha <= 1; throws at r = s = 0.
double angular_kernel(double r, double s, double alpha);

/// Dense discretisation of g -> I_alpha * g for radial g. Stored as the
/// symmetric matrix M = W K, so that (I_alpha * g)(r_i) = (1/w_i) sum_j M_ij g_j
/// and the Choquard double integral of f is f^T M f.
class RieszKernel {
public:
    RieszKernel(GridPtr grid, double alpha, unsigned threads = 1);

    double alpha() const { return alpha_; }
    const GridPtr& grid() const { return grid_; }
    std::size_t size() const { return n_; }

    /// K_ij, the coefficient of g_j in (I_alpha * g)(r_i).
    double entry(std::size_t i, std::size_t j) const { return m_[i * n_ + j] / grid_->weight(i); }
    double symmetric_entry(std::size_t i, std::size_t j) const { return m_[i * n_ + j]; }

    void apply(const double* g, double* v) const;
    /// f^T M f.
    double quadratic(const double* f) const;

    std::string diag_rule() const;
    double build_seconds() const { return build_seconds_; }
    std::size_t memory_bytes() const { return m_.size() * sizeof(double); }

private:
    GridPtr grid_;
    double alpha_;
    std::size_t n_;
    std::vector<double> m_;
    double build_seconds_ = 0.0;
};

using KernelPtr = std::shared_ptr<const RieszKernel>;

RadialField riesz_convolve(const RieszKernel& kernel, const RadialField& g);
double choquard_energy(const RieszKernel& kernel, const RadialField& u);

/// A_alpha C_alpha |u|_6^{2(alpha+3)} - A(u): the HLS inequality with
/// p = r = 6/(3+alpha) applied to |u|^{alpha+3}.
double hls_check(const RadialField& u, const RieszKernel& kernel, const SharpConstants& consts);

} // namespace kcq
