#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace kcq {

enum class GridKind { uniform, geometric };

std::string to_string(GridKind kind);
GridKind grid_kind_from_string(const std::string& name);

struct GridSpec {
    std::size_t n = 2048;
    double r_max = 50.0;
    GridKind kind = GridKind::geometric;
    double r_half = 2.0; // geometric only: half the nodes sit below this radius

    bool operator==(const GridSpec&) const = default;
};

/// Symmetric positive semi-definite matrix with half bandwidth 3, stored as
/// the main diagonal and three sub-diagonals: band[d][i] = A(i + d, i).
struct BandMatrix {
    static constexpr int kHalfWidth = 3;
    std::size_t n = 0;
    std::vector<double> band[kHalfWidth + 1];

    void multiply(const double* x, double* y) const;
};

/// Cholesky solve of (c*K + diag(d)) x = rhs for a banded K.
class BandCholesky {
public:
    BandCholesky(const BandMatrix& k, double c, const std::vector<double>& d);
    void solve(std::vector<double>& rhs) const;

private:
    std::size_t n_;
    std::vector<double> l_[BandMatrix::kHalfWidth + 1];
};

/// Cell-centred radial grid. Nodes sit at r_j = phi(s_j), s_j = (j + 1/2)/N, with
/// phi(s) = r_max s (uniform) or c sinh(beta s) (geometric). phi is odd, so even
/// fields reflect cleanly through the origin.
class RadialGrid {
public:
    explicit RadialGrid(const GridSpec& spec);

    static std::shared_ptr<const RadialGrid> make(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    std::size_t size() const { return r_.size(); }
    double r_max() const { return spec_.r_max; }
    GridKind kind() const { return spec_.kind; }
    double h() const { return 1.0 / static_cast<double>(r_.size()); }

    const std::vector<double>& nodes() const { return r_; }
    const std::vector<double>& weights() const { return w_; }
    double r(std::size_t i) const { return r_[i]; }
    double weight(std::size_t i) const { return w_[i]; }
    /// Local spacing h*phi'(s_i).
    double spacing(std::size_t i) const { return dr_[i]; }

    /// Stiffness form K with u^T K u = discrete |grad u|^2; Lap_h = -W^{-1} K.
    const BandMatrix& stiffness() const { return stiff_; }
    /// Face coefficients of the gradient quadrature, faces k = 1..N at s = k/N.
    const std::vector<double>& face_coefficients() const { return face_; }

    double map(double s) const;
    double map_derivative(double s) const;
    double inverse_map(double r) const;

    /// Number of nodes with r_i < radius.
    std::size_t count_below(double radius) const;

    bool same_as(const RadialGrid& other) const { return this == &other || spec_ == other.spec_; }

private:
    GridSpec spec_;
    double scale_ = 0.0; // c
    double beta_ = 0.0;
    std::vector<double> r_, w_, dr_, face_;
    BandMatrix stiff_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

struct RadialField {
    GridPtr grid;
    std::vector<double> values;

    RadialField() = default;
    explicit RadialField(GridPtr g) : grid(std::move(g)), values(grid->size(), 0.0) {}
    RadialField(GridPtr g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    template <class F>
    static RadialField sample(GridPtr g, F&& f)
    {
        RadialField out(g);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.values[i] = f(g->r(i));
        return out;
    }
};

void require_same_grid(const RadialField& a, const RadialField& b);

double mass_sq(const RadialField& u);
double grad_norm_sq(const RadialField& u);
double lq_norm_pow(const RadialField& u, double q);
/// Weighted inner product sum w_i f_i g_i.
double inner(const RadialField& f, const RadialField& g);

/// Pointwise u'' + 2u'/r from five-point Lagrange stencils on the nodes (exact
/// on quartics in r).
RadialField radial_laplacian(const RadialField& u);
/// -W^{-1} K u: the Laplacian whose weak form is the discrete |grad u|^2.
RadialField variational_laplacian(const RadialField& u);

/// Rescale in place so that mass_sq(u) = rho^2. Throws on a zero field.
void normalize_mass(RadialField& u, double rho);

struct Dilation {
    RadialField field;
    double mass_drift = 0.0; // relative mass change before renormalisation
    bool under_resolved = false;
};

/// t * u = t^{3/2} u(t r), by monotone cubic interpolation in the grid
/// parameter, then renormalised to the input mass.
Dilation dilate_report(const RadialField& u, double t);
RadialField dilate(const RadialField& u, double t);

/// Monotone cubic interpolation of the field at arbitrary radii (even
/// extension through 0, zero beyond r_max).
double interpolate(const RadialField& u, double r);

struct CsvProfile {
    GridSpec spec;
    bool has_spec = false;
    std::vector<double> r, u;
};

void write_csv(const RadialField& u, const std::string& path);
CsvProfile read_csv(const std::string& path);
/// Field on `grid`: copied when the file carries the same grid, else interpolated.
RadialField field_from_csv(const CsvProfile& prof, GridPtr grid);

} // namespace kcq
