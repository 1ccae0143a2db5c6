#include "kcq/radial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace kcq {

using std::numbers::pi;

std::string to_string(GridKind kind)
{
    return kind == GridKind::uniform ? "uniform" : "geometric";
}

GridKind grid_kind_from_string(const std::string& name)
{
    if (name == "uniform") return GridKind::uniform;
    if (name == "geometric" || name == "geometric-graded") return GridKind::geometric;
    throw std::invalid_argument("unknown grid kind: " + name);
}

// ---------------------------------------------------------------- banded algebra

void BandMatrix::multiply(const double* x, double* y) const
{
    for (std::size_t i = 0; i < n; ++i)
        y[i] = band[0][i] * x[i];
    for (int d = 1; d <= kHalfWidth; ++d) {
        const auto& b = band[d];
        for (std::size_t i = 0; i + d < n; ++i) {
            y[i + d] += b[i] * x[i];
            y[i] += b[i] * x[i + d];
        }
    }
}

BandCholesky::BandCholesky(const BandMatrix& k, double c, const std::vector<double>& d) : n_(k.n)
{
    constexpr int m = BandMatrix::kHalfWidth;
    for (int b = 0; b <= m; ++b)
        l_[b].assign(n_, 0.0);
    // l_[b][j] = L(j + b, j)
    for (std::size_t j = 0; j < n_; ++j) {
        double diag = c * k.band[0][j] + d[j];
        for (int p = 1; p <= m && p <= static_cast<int>(j); ++p)
            diag -= l_[p][j - p] * l_[p][j - p];
        if (!(diag > 0.0))
            throw std::runtime_error("BandCholesky: matrix not positive definite");
        const double ljj = std::sqrt(diag);
        l_[0][j] = ljj;
        for (int b = 1; b <= m && j + b < n_; ++b) {
            double v = c * k.band[b][j];
            // subtract sum_p L(j+b, j-p) L(j, j-p)
            for (int p = 1; p + b <= m && p <= static_cast<int>(j); ++p)
                v -= l_[b + p][j - p] * l_[p][j - p];
            l_[b][j] = v / ljj;
        }
    }
}

void BandCholesky::solve(std::vector<double>& x) const
{
    constexpr int m = BandMatrix::kHalfWidth;
    for (std::size_t i = 0; i < n_; ++i) {
        double v = x[i];
        for (int b = 1; b <= m && b <= static_cast<int>(i); ++b)
            v -= l_[b][i - b] * x[i - b];
        x[i] = v / l_[0][i];
    }
    for (std::size_t ii = n_; ii-- > 0;) {
        double v = x[ii];
        for (int b = 1; b <= m && ii + b < n_; ++b)
            v -= l_[b][ii] * x[ii + b];
        x[ii] = v / l_[0][ii];
    }
}

// ---------------------------------------------------------------- grid

RadialGrid::RadialGrid(const GridSpec& spec) : spec_(spec)
{
    const std::size_t n = spec.n;
    if (n < 64) throw std::invalid_argument("RadialGrid: need at least 64 nodes");
    if (!(spec.r_max > 0.0)) throw std::invalid_argument("RadialGrid: r_max must be positive");
    if (spec.kind == GridKind::geometric) {
        const double ratio = spec.r_max / (2.0 * spec.r_half);
        if (!(spec.r_half > 0.0) || !(ratio > 1.0))
            throw std::invalid_argument("RadialGrid: geometric grid needs 0 < 2 r_half < r_max");
        beta_ = 2.0 * std::acosh(ratio);
        scale_ = spec.r_max / std::sinh(beta_);
    }

    const double h = 1.0 / static_cast<double>(n);
    r_.resize(n);
    w_.resize(n);
    dr_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double s = (j + 0.5) * h;
        r_[j] = map(s);
        dr_[j] = h * map_derivative(s);
        w_[j] = 4.0 * pi * r_[j] * r_[j] * dr_[j];
    }

    // Moment-match the last three weights so that 4 pi r^2 x^k, x = (r - R)/dr,
    // k = 0, 1, 2, integrate exactly on [0, R]. The midpoint rule in s is
    // already spectral at the mirrored inner end.
    {
        const double R = spec.r_max;
        const double d = dr_[n - 1];
        const double R3 = 4.0 * pi * R * R * R;
        const long double exact[3] = {R3 / 3.0L, -R3 * (R / d) / 12.0L, R3 * (R / d) * (R / d) / 30.0L};
        long double cur[3] = {0.0L, 0.0L, 0.0L};
        for (std::size_t j = 0; j < n; ++j) {
            const long double x = (static_cast<long double>(r_[j]) - R) / d;
            cur[0] += w_[j];
            cur[1] += w_[j] * x;
            cur[2] += w_[j] * x * x;
        }
        double a[3][3], rhs[3];
        for (int k = 0; k < 3; ++k) {
            rhs[k] = static_cast<double>(exact[k] - cur[k]);
            for (int m = 0; m < 3; ++m) {
                const double x = (r_[n - 3 + m] - R) / d;
                a[k][m] = std::pow(x, k);
            }
        }
        // Gaussian elimination, 3x3 with partial pivoting
        int piv[3] = {0, 1, 2};
        for (int c = 0; c < 3; ++c) {
            int best = c;
            for (int r = c + 1; r < 3; ++r)
                if (std::abs(a[piv[r]][c]) > std::abs(a[piv[best]][c])) best = r;
            std::swap(piv[c], piv[best]);
            for (int r = c + 1; r < 3; ++r) {
                const double f = a[piv[r]][c] / a[piv[c]][c];
                for (int m = c; m < 3; ++m) a[piv[r]][m] -= f * a[piv[c]][m];
                rhs[piv[r]] -= f * rhs[piv[c]];
            }
        }
        double dw[3];
        for (int c = 2; c >= 0; --c) {
            double v = rhs[piv[c]];
            for (int m = c + 1; m < 3; ++m) v -= a[piv[c]][m] * dw[m];
            dw[c] = v / a[piv[c]][c];
        }
        for (int m = 0; m < 3; ++m) w_[n - 3 + m] += dw[m];
    }

    // Gradient faces k = 1..N at s = k h; trapezoid with half weight at s = 1.
    face_.resize(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const double s = k * h;
        const double phi = map(s);
        const double tau = (k == n) ? 0.5 : 1.0;
        face_[k - 1] = tau * h * 4.0 * pi * phi * phi / map_derivative(s);
    }

    // K = sum_k face_k d_k d_k^T with d_k the staggered fourth-order derivative
    // stencil; even ghosts at the origin, odd (Dirichlet) ghosts past r_max.
    stiff_.n = n;
    for (auto& b : stiff_.band) b.assign(n, 0.0);
    const double inv = 1.0 / (24.0 * h);
    const long ni = static_cast<long>(n);
    for (long k = 1; k <= ni; ++k) {
        const long idx[4] = {k - 2, k - 1, k, k + 1};
        const double cf[4] = {inv, -27.0 * inv, 27.0 * inv, -inv};
        long col[4];
        double val[4];
        for (int m = 0; m < 4; ++m) {
            long j = idx[m];
            double c = cf[m];
            if (j < 0) j = -1 - j;
            else if (j >= ni) { j = 2 * ni - 1 - j; c = -c; }
            col[m] = j;
            val[m] = c;
        }
        const double f = face_[k - 1];
        for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q) {
                const long i = col[p], j = col[q];
                if (i < j) continue;
                const double v = f * val[p] * val[q];
                stiff_.band[i - j][j] += v;
            }
    }
}

std::shared_ptr<const RadialGrid> RadialGrid::make(const GridSpec& spec)
{
    return std::make_shared<const RadialGrid>(spec);
}

double RadialGrid::map(double s) const
{
    if (spec_.kind == GridKind::uniform) return spec_.r_max * s;
    return scale_ * std::sinh(beta_ * s);
}

double RadialGrid::map_derivative(double s) const
{
    if (spec_.kind == GridKind::uniform) return spec_.r_max;
    return scale_ * beta_ * std::cosh(beta_ * s);
}

double RadialGrid::inverse_map(double r) const
{
    if (spec_.kind == GridKind::uniform) return r / spec_.r_max;
    return std::asinh(r / scale_) / beta_;
}

std::size_t RadialGrid::count_below(double radius) const
{
    return static_cast<std::size_t>(std::lower_bound(r_.begin(), r_.end(), radius) - r_.begin());
}

// ---------------------------------------------------------------- fields

RadialField::RadialField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v))
{
    if (values.size() != grid->size())
        throw std::invalid_argument("RadialField: value count does not match grid");
}

void require_same_grid(const RadialField& a, const RadialField& b)
{
    if (!a.grid || !b.grid || !a.grid->same_as(*b.grid))
        throw std::invalid_argument("grid mismatch");
}

double mass_sq(const RadialField& u)
{
    const auto& w = u.grid->weights();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * u[i] * u[i];
    return s;
}

double inner(const RadialField& f, const RadialField& g)
{
    require_same_grid(f, g);
    const auto& w = f.grid->weights();
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * g[i];
    return s;
}

double lq_norm_pow(const RadialField& u, double q)
{
    if (!(q >= 1.0)) throw std::domain_error("lq_norm_pow: q >= 1 required");
    const auto& w = u.grid->weights();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * std::pow(std::abs(u[i]), q);
    return s;
}

double grad_norm_sq(const RadialField& u)
{
    const auto& face = u.grid->face_coefficients();
    const long n = static_cast<long>(u.size());
    const double inv = 1.0 / (24.0 * u.grid->h());
    auto at = [&](long j) {
        if (j < 0) return u[static_cast<std::size_t>(-1 - j)];
        if (j >= n) return -u[static_cast<std::size_t>(2 * n - 1 - j)];
        return u[static_cast<std::size_t>(j)];
    };
    double s = 0.0;
    for (long k = 1; k <= n; ++k) {
        const double d = (27.0 * (at(k) - at(k - 1)) - (at(k + 1) - at(k - 2))) * inv;
        s += face[k - 1] * d * d;
    }
    return s;
}

RadialField variational_laplacian(const RadialField& u)
{
    RadialField out(u.grid);
    u.grid->stiffness().multiply(u.values.data(), out.values.data());
    const auto& w = u.grid->weights();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -out[i] / w[i];
    return out;
}

namespace {

// Fornberg's recursion: weights c[k][j] of the k-th derivative at x0 from
// values at x[0..m), for k = 0..2.
void fd_weights(double x0, const double* x, int m, double c[3][5])
{
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < m; ++j) c[k][j] = 0.0;
    c[0][0] = 1.0;
    double c1 = 1.0, c4 = x[0] - x0;
    for (int i = 1; i < m; ++i) {
        const int mn = std::min(i, 2);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
}

} // namespace

RadialField radial_laplacian(const RadialField& u)
{
    const long n = static_cast<long>(u.size());
    if (n < 5) throw std::invalid_argument("radial_laplacian: need at least 5 nodes");
    const auto& r = u.grid->nodes();
    const double R = u.grid->r_max();
    // mirror images give the even ghost through the origin and the odd one past r_max
    auto node = [&](long j, double& x, double& v) {
        if (j < 0) {
            x = -r[static_cast<std::size_t>(-1 - j)];
            v = u[static_cast<std::size_t>(-1 - j)];
        } else if (j >= n) {
            x = 2.0 * R - r[static_cast<std::size_t>(2 * n - 1 - j)];
            v = -u[static_cast<std::size_t>(2 * n - 1 - j)];
        } else {
            x = r[static_cast<std::size_t>(j)];
            v = u[static_cast<std::size_t>(j)];
        }
    };
    RadialField out(u.grid);
    double x[5], v[5], c[3][5];
    for (long i = 0; i < n; ++i) {
        for (int k = 0; k < 5; ++k) node(i - 2 + k, x[k], v[k]);
        fd_weights(x[2], x, 5, c);
        double d1 = 0.0, d2 = 0.0;
        for (int k = 0; k < 5; ++k) {
            d1 += c[1][k] * v[k];
            d2 += c[2][k] * v[k];
        }
        out[static_cast<std::size_t>(i)] = d2 + 2.0 * d1 / x[2];
    }
    return out;
}

void normalize_mass(RadialField& u, double rho)
{
    const double m = mass_sq(u);
    if (!(m > 0.0) || !std::isfinite(m))
        throw std::domain_error("normalize_mass: field has zero or non-finite mass");
    const double c = rho / std::sqrt(m);
    for (auto& v : u.values) v *= c;
}

// ---------------------------------------------------------------- interpolation

namespace {

// Piecewise cubic Hermite with Fritsch-Carlson (harmonic mean) slopes.
class Pchip {
public:
    Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y))
    {
        const std::size_t n = x_.size();
        m_.assign(n, 0.0);
        std::vector<double> h(n - 1), del(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            h[k] = x_[k + 1] - x_[k];
            del[k] = (y_[k + 1] - y_[k]) / h[k];
        }
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (del[k - 1] * del[k] > 0.0) {
                const double w1 = 2.0 * h[k] + h[k - 1];
                const double w2 = h[k] + 2.0 * h[k - 1];
                m_[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
            }
        }
        m_[0] = del[0];
        m_[n - 1] = del[n - 2];
    }

    double operator()(double x) const
    {
        std::size_t k = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
        k = std::clamp<std::size_t>(k, 1, x_.size() - 1) - 1;
        return eval(k, x);
    }

    double eval(std::size_t k, double x) const
    {
        const double h = x_[k + 1] - x_[k];
        const double t = (x - x_[k]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[k] + (t3 - 2 * t2 + t) * h * m_[k]
               + (-2 * t3 + 3 * t2) * y_[k + 1] + (t3 - t2) * h * m_[k + 1];
    }

private:
    std::vector<double> x_, y_, m_;
};

// Knots in the grid parameter s, with two mirrored knots below 0 and two odd
// ghosts past s = 1.
Pchip parameter_interpolant(const RadialField& u)
{
    const long n = static_cast<long>(u.size());
    const double h = u.grid->h();
    std::vector<double> x, y;
    x.reserve(n + 4);
    y.reserve(n + 4);
    for (long j = -2; j < n + 2; ++j) {
        x.push_back((j + 0.5) * h);
        double v;
        if (j < 0) v = u[static_cast<std::size_t>(-1 - j)];
        else if (j >= n) v = -u[static_cast<std::size_t>(2 * n - 1 - j)];
        else v = u[static_cast<std::size_t>(j)];
        y.push_back(v);
    }
    return Pchip(std::move(x), std::move(y));
}

} // namespace

double interpolate(const RadialField& u, double r)
{
    r = std::abs(r);
    if (r >= u.grid->r_max()) return 0.0;
    return parameter_interpolant(u)(u.grid->inverse_map(r));
}

Dilation dilate_report(const RadialField& u, double t)
{
    if (!(t > 0.0)) throw std::domain_error("dilate: t must be positive");
    Dilation out{u, 0.0, false};
    if (t == 1.0) return out;

    const auto& g = *u.grid;
    const Pchip ip = parameter_interpolant(u);
    const double amp = std::pow(t, 1.5);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = t * g.r(i);
        out.field[i] = (r >= g.r_max()) ? 0.0 : amp * ip(g.inverse_map(r));
    }
    const double m0 = mass_sq(u);
    const double m1 = mass_sq(out.field);
    if (m0 > 0.0) {
        out.mass_drift = m1 / m0 - 1.0;
        out.under_resolved = std::abs(out.mass_drift) > 1e-4;
        if (m1 > 0.0) {
            const double c = std::sqrt(m0 / m1);
            for (auto& v : out.field.values) v *= c;
        }
    }
    return out;
}

RadialField dilate(const RadialField& u, double t)
{
    return dilate_report(u, t).field;
}

// ---------------------------------------------------------------- csv

void write_csv(const RadialField& u, const std::string& path)
{
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    const auto& s = u.grid->spec();
    std::fprintf(f, "# r,u N=%zu r_max=%.17g kind=%s r_half=%.17g\n", s.n, s.r_max,
                 to_string(s.kind).c_str(), s.r_half);
    for (std::size_t i = 0; i < u.size(); ++i)
        std::fprintf(f, "%.17g,%.17g\n", u.grid->r(i), u[i]);
    std::fclose(f);
}

namespace {

// strtod rather than stod: subnormal tails must read back, not throw
double parse_number(const std::string& s)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw std::runtime_error("malformed number in csv: " + s);
    return v;
}

} // namespace

CsvProfile read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvProfile prof;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) {
            std::istringstream ss(line);
            std::string tok;
            int seen = 0;
            while (ss >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
                if (key == "N") { prof.spec.n = std::stoul(val); ++seen; }
                else if (key == "r_max") { prof.spec.r_max = std::stod(val); ++seen; }
                else if (key == "kind") { prof.spec.kind = grid_kind_from_string(val); ++seen; }
                else if (key == "r_half") prof.spec.r_half = std::stod(val);
            }
            prof.has_spec = prof.has_spec || seen == 3;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("malformed csv row: " + line);
        prof.r.push_back(parse_number(line.substr(0, comma)));
        prof.u.push_back(parse_number(line.substr(comma + 1)));
    }
    if (prof.r.size() < 4) throw std::runtime_error("csv profile too short: " + path);
    return prof;
}

RadialField field_from_csv(const CsvProfile& prof, GridPtr grid)
{
    if (prof.has_spec && prof.spec == grid->spec() && prof.r.size() == grid->size())
        return RadialField(grid, prof.u);
    // mirror the first two samples through 0 for an even interpolant
    std::vector<double> x, y;
    x.push_back(-prof.r[1]);
    y.push_back(prof.u[1]);
    x.push_back(-prof.r[0]);
    y.push_back(prof.u[0]);
    if (prof.r[0] == 0.0) { x.pop_back(); y.pop_back(); }
    x.insert(x.end(), prof.r.begin(), prof.r.end());
    y.insert(y.end(), prof.u.begin(), prof.u.end());
    const Pchip ip(x, y);
    const double last = prof.r.back();
    return RadialField::sample(grid, [&](double r) { return r > last ? 0.0 : ip(r); });
}

} // namespace kcq
