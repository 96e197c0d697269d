#pragma once

// Finite measures on the line stored as densities on a uniform grid, plus the
// operations the limit-law pipeline needs: Gaussian convolution (direct
// quadrature), rescaling pushforward, regularized Fourier deconvolution, and
// CDF-based distances.  Atoms appear only through the v = 0 convolution case,
// which is the identity.

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "critlab/gaussian.hpp"

namespace critlab {

struct GridSpec {
    double lo = -8.0;
    double hi = 8.0;
    int n = 1024;
};

struct Measure1D {
    double lo = 0.0;
    double hi = 0.0;
    int n_grid = 0;
    std::vector<double> density;  // values on the uniform grid, >= 0
    double mass = 0.0;            // trapezoid integral, kept in sync

    double dx() const { return (hi - lo) / (n_grid - 1); }
    double x_at(int i) const { return lo + dx() * i; }
};

inline double trapezoid_mass(const Measure1D& mu) {
    double s = 0.0;
    for (int i = 0; i < mu.n_grid; ++i) {
        const double w = (i == 0 || i == mu.n_grid - 1) ? 0.5 : 1.0;
        s += w * mu.density[static_cast<std::size_t>(i)];
    }
    return s * mu.dx();
}

inline Measure1D make_measure(double lo, double hi, std::vector<double> density) {
    if (!(hi > lo)) throw std::invalid_argument("make_measure: need hi > lo");
    if (density.size() < 2) throw std::invalid_argument("make_measure: need at least 2 grid points");
    Measure1D mu;
    mu.lo = lo;
    mu.hi = hi;
    mu.n_grid = static_cast<int>(density.size());
    for (double& d : density) {
        if (d < 0.0) {
            if (d < -1e-12) throw std::invalid_argument("make_measure: negative density");
            d = 0.0;
        }
    }
    mu.density = std::move(density);
    mu.mass = trapezoid_mass(mu);
    return mu;
}

template <class F>
Measure1D tabulate_measure(const GridSpec& grid, F&& f) {
    std::vector<double> d(static_cast<std::size_t>(grid.n));
    const double dx = (grid.hi - grid.lo) / (grid.n - 1);
    for (int i = 0; i < grid.n; ++i) d[static_cast<std::size_t>(i)] = f(grid.lo + dx * i);
    return make_measure(grid.lo, grid.hi, std::move(d));
}

inline Measure1D normalize(const Measure1D& mu) {
    if (!(mu.mass > 0.0)) throw std::invalid_argument("normalize: measure has nonpositive mass");
    Measure1D out = mu;
    for (double& d : out.density) d /= mu.mass;
    out.mass = trapezoid_mass(out);
    return out;
}

// Density of the centered Gaussian with variance v, tabulated on the grid.
inline Measure1D gaussian_measure(double v, const GridSpec& grid) {
    return tabulate_measure(grid, [v](double x) { return gaussian_density(0.0, v, x); });
}

// Linear interpolation of the density at x; 0 outside [lo, hi].
inline double density_at(const Measure1D& mu, double x) {
    if (x < mu.lo || x > mu.hi) return 0.0;
    const double t = (x - mu.lo) / mu.dx();
    const int i = std::min(static_cast<int>(t), mu.n_grid - 2);
    const double frac = t - i;
    return mu.density[static_cast<std::size_t>(i)] * (1.0 - frac) +
           mu.density[static_cast<std::size_t>(i) + 1] * frac;
}

inline double measure_moment(const Measure1D& mu, int order) {
    double s = 0.0;
    for (int i = 0; i < mu.n_grid; ++i) {
        const double w = (i == 0 || i == mu.n_grid - 1) ? 0.5 : 1.0;
        s += w * std::pow(mu.x_at(i), order) * mu.density[static_cast<std::size_t>(i)];
    }
    return s * mu.dx();
}

// Smoothing by the centered Gaussian with variance v.  The output lives on an
// enlarged grid with the same spacing; v = 0 is the identity (point mass).
inline Measure1D convolve_gaussian(const Measure1D& mu, double v) {
    if (v < 0.0) throw std::invalid_argument("convolve_gaussian: v must be nonnegative");
    if (v == 0.0) return mu;
    const double dx = mu.dx();
    const double sd = std::sqrt(v);
    if (dx > sd / 4.0)
        std::cerr << "[warn] convolve_gaussian: grid spacing " << dx << " coarser than sqrt(v)/4 = "
                  << sd / 4.0 << "; result may be under-resolved\n";
    const int pad = static_cast<int>(std::ceil(6.5 * sd / dx));
    const int n_out = mu.n_grid + 2 * pad;
    const double lo_out = mu.lo - pad * dx;

    // Precompute the kernel on the lattice of offsets actually used.
    const int reach = pad + mu.n_grid;
    std::vector<double> kernel(static_cast<std::size_t>(2 * reach + 1), 0.0);
    for (int d = -reach; d <= reach; ++d) {
        const double y = d * dx;
        if (std::abs(y) <= 8.5 * sd)
            kernel[static_cast<std::size_t>(d + reach)] = gaussian_density(0.0, v, y);
    }

    std::vector<double> out(static_cast<std::size_t>(n_out), 0.0);
    for (int j = 0; j < mu.n_grid; ++j) {
        const double w = ((j == 0 || j == mu.n_grid - 1) ? 0.5 : 1.0) *
                         mu.density[static_cast<std::size_t>(j)] * dx;
        if (w == 0.0) continue;
        for (int i = 0; i < n_out; ++i) {
            // output index i sits at offset (i - pad - j) lattice steps from input j
            out[static_cast<std::size_t>(i)] += w * kernel[static_cast<std::size_t>(i - pad - j + reach)];
        }
    }
    return make_measure(lo_out, lo_out + (n_out - 1) * dx, std::move(out));
}

// Pushforward under x -> t x: support scales by t, density by 1/t, mass fixed.
inline Measure1D rescale_pushforward(const Measure1D& mu, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("rescale_pushforward: t must be positive");
    Measure1D out = mu;
    out.lo = mu.lo * t;
    out.hi = mu.hi * t;
    for (double& d : out.density) d /= t;
    out.mass = trapezoid_mass(out);
    return out;
}

struct DeconvolveResult {
    Measure1D measure;
    double forward_residual = 0.0;  // sup-norm of convolve(result, v) minus input
    bool reliable = true;
};

// Inverts Gaussian smoothing in the Fourier domain with Tikhonov damping:
// F_hat * G_hat / (G_hat^2 + reg), G_hat(xi) = exp(-v xi^2 / 2).  A forward
// convolution check quantifies the inversion error.
inline DeconvolveResult deconvolve_gaussian_checked(const Measure1D& mu, double v, double reg,
                                                    double residual_threshold = 1e-3) {
    if (v < 0.0) throw std::invalid_argument("deconvolve_gaussian: v must be nonnegative");
    if (!(reg > 0.0)) throw std::invalid_argument("deconvolve_gaussian: reg must be positive");
    if (v == 0.0) return {mu, 0.0, true};

    const double dx = mu.dx();
    // Zero-pad to suppress cyclic wrap-around; power-of-two length for the FFT.
    std::size_t n_fft = 1;
    while (n_fft < static_cast<std::size_t>(mu.n_grid) * 4) n_fft *= 2;
    std::vector<double> padded(n_fft, 0.0);
    const std::size_t off = (n_fft - static_cast<std::size_t>(mu.n_grid)) / 2;
    for (int i = 0; i < mu.n_grid; ++i)
        padded[off + static_cast<std::size_t>(i)] = mu.density[static_cast<std::size_t>(i)];

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> freq;
    fft.fwd(freq, padded);
    const double dxi = 2.0 * M_PI / (static_cast<double>(n_fft) * dx);
    for (std::size_t j = 0; j < freq.size(); ++j) {
        const double jj = (j <= n_fft / 2) ? static_cast<double>(j)
                                           : static_cast<double>(j) - static_cast<double>(n_fft);
        const double xi = jj * dxi;
        const double ghat = std::exp(-0.5 * v * xi * xi);
        freq[j] *= ghat / (ghat * ghat + reg);
    }
    std::vector<double> recovered;
    fft.inv(recovered, freq);

    std::vector<double> out(static_cast<std::size_t>(mu.n_grid));
    for (int i = 0; i < mu.n_grid; ++i)
        out[static_cast<std::size_t>(i)] = std::max(0.0, recovered[off + static_cast<std::size_t>(i)]);
    DeconvolveResult res;
    res.measure = make_measure(mu.lo, mu.hi, std::move(out));

    const Measure1D forward = convolve_gaussian(res.measure, v);
    double sup = 0.0;
    for (int i = 0; i < mu.n_grid; ++i)
        sup = std::max(sup, std::abs(density_at(forward, mu.x_at(i)) - mu.density[static_cast<std::size_t>(i)]));
    res.forward_residual = sup;
    res.reliable = sup <= residual_threshold;
    if (!res.reliable)
        std::cerr << "[warn] deconvolve_gaussian: forward residual " << sup
                  << " exceeds threshold " << residual_threshold << "; result unreliable\n";
    return res;
}

inline Measure1D deconvolve_gaussian(const Measure1D& mu, double v, double reg) {
    return deconvolve_gaussian_checked(mu, v, reg).measure;
}

// Trapezoid CDF of mu evaluated at x (piecewise-quadratic in x, linear in the
// density); 0 left of the grid, mass right of it.
inline double cdf_at(const Measure1D& mu, double x) {
    if (x <= mu.lo) return 0.0;
    if (x >= mu.hi) return mu.mass;
    const double dx = mu.dx();
    const double t = (x - mu.lo) / dx;
    const int i = std::min(static_cast<int>(t), mu.n_grid - 2);
    double acc = 0.0;
    for (int j = 0; j < i; ++j)
        acc += 0.5 * (mu.density[static_cast<std::size_t>(j)] + mu.density[static_cast<std::size_t>(j) + 1]) * dx;
    const double frac = (x - mu.x_at(i));
    const double d0 = mu.density[static_cast<std::size_t>(i)];
    const double d1 = mu.density[static_cast<std::size_t>(i) + 1];
    const double slope = (d1 - d0) / dx;
    acc += d0 * frac + 0.5 * slope * frac * frac;
    return acc;
}

namespace detail {
inline std::vector<double> cumulative_trapezoid(const Measure1D& mu) {
    std::vector<double> c(static_cast<std::size_t>(mu.n_grid), 0.0);
    const double dx = mu.dx();
    for (int i = 1; i < mu.n_grid; ++i)
        c[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i) - 1] +
            0.5 * (mu.density[static_cast<std::size_t>(i) - 1] + mu.density[static_cast<std::size_t>(i)]) * dx;
    return c;
}

inline double cdf_from_cumulative(const Measure1D& mu, const std::vector<double>& cum, double x) {
    if (x <= mu.lo) return 0.0;
    if (x >= mu.hi) return cum.back();
    const double dx = mu.dx();
    const double t = (x - mu.lo) / dx;
    const int i = std::min(static_cast<int>(t), mu.n_grid - 2);
    const double frac = x - mu.x_at(i);
    const double d0 = mu.density[static_cast<std::size_t>(i)];
    const double d1 = mu.density[static_cast<std::size_t>(i) + 1];
    return cum[static_cast<std::size_t>(i)] + d0 * frac + 0.5 * (d1 - d0) / dx * frac * frac;
}

inline void require_probability(const Measure1D& mu, const char* who) {
    if (std::abs(mu.mass - 1.0) > 1e-6)
        throw std::invalid_argument(std::string(who) + ": input must be normalized (mass = " +
                                    std::to_string(mu.mass) + ")");
}
}  // namespace detail

// Kolmogorov-Smirnov distance of two grid measures (sup of |CDF difference|
// over the union of both grids).
inline double ks_distance(const Measure1D& a, const Measure1D& b) {
    detail::require_probability(a, "ks_distance");
    detail::require_probability(b, "ks_distance");
    const auto ca = detail::cumulative_trapezoid(a);
    const auto cb = detail::cumulative_trapezoid(b);
    double sup = 0.0;
    for (int i = 0; i < a.n_grid; ++i) {
        const double x = a.x_at(i);
        sup = std::max(sup, std::abs(detail::cdf_from_cumulative(a, ca, x) -
                                     detail::cdf_from_cumulative(b, cb, x)));
    }
    for (int i = 0; i < b.n_grid; ++i) {
        const double x = b.x_at(i);
        sup = std::max(sup, std::abs(detail::cdf_from_cumulative(a, ca, x) -
                                     detail::cdf_from_cumulative(b, cb, x)));
    }
    return sup;
}

struct EmpiricalMeasure {
    struct Atom {
        double location;
        double weight;
    };
    std::vector<Atom> atoms;  // kept sorted by location
    double mass = 0.0;

    static EmpiricalMeasure from_values(std::vector<double> values) {
        EmpiricalMeasure em;
        std::sort(values.begin(), values.end());
        em.atoms.reserve(values.size());
        for (double v : values) em.atoms.push_back({v, 1.0});
        em.mass = static_cast<double>(values.size());
        return em;
    }

    EmpiricalMeasure normalized() const {
        if (!(mass > 0.0)) throw std::invalid_argument("EmpiricalMeasure: nonpositive mass");
        EmpiricalMeasure em = *this;
        for (auto& a : em.atoms) a.weight /= mass;
        em.mass = 1.0;
        return em;
    }
};

// KS distance between an atomic sample measure and a grid density: the sup is
// attained at atom locations, approaching from either side of each step.
inline double ks_distance(const EmpiricalMeasure& a, const Measure1D& b) {
    if (std::abs(a.mass - 1.0) > 1e-6)
        throw std::invalid_argument("ks_distance: empirical measure must be normalized");
    detail::require_probability(b, "ks_distance");
    const auto cb = detail::cumulative_trapezoid(b);
    double sup = 0.0;
    double below = 0.0;
    for (const auto& atom : a.atoms) {
        const double fb = detail::cdf_from_cumulative(b, cb, atom.location);
        sup = std::max(sup, std::abs(below - fb));
        below += atom.weight;
        sup = std::max(sup, std::abs(below - fb));
    }
    return sup;
}

// First Wasserstein distance = integral of |CDF_a - CDF_b| over the line.
inline double wasserstein1(const Measure1D& a, const Measure1D& b) {
    detail::require_probability(a, "wasserstein1");
    detail::require_probability(b, "wasserstein1");
    const auto ca = detail::cumulative_trapezoid(a);
    const auto cb = detail::cumulative_trapezoid(b);
    const double lo = std::min(a.lo, b.lo);
    const double hi = std::max(a.hi, b.hi);
    const int n = 4 * std::max(a.n_grid, b.n_grid);
    const double dx = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + dx * i;
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * std::abs(detail::cdf_from_cumulative(a, ca, x) -
                            detail::cdf_from_cumulative(b, cb, x));
    }
    return acc * dx;
}

// Bin an atomic measure onto a uniform grid as a density (mass preserved up to
// atoms outside the grid range).
inline Measure1D histogram(const EmpiricalMeasure& em, const GridSpec& grid) {
    std::vector<double> d(static_cast<std::size_t>(grid.n), 0.0);
    const double dx = (grid.hi - grid.lo) / (grid.n - 1);
    for (const auto& atom : em.atoms) {
        if (atom.location < grid.lo || atom.location > grid.hi) continue;
        int i = static_cast<int>(std::floor((atom.location - grid.lo) / dx + 0.5));
        i = std::clamp(i, 0, grid.n - 1);
        d[static_cast<std::size_t>(i)] += atom.weight / dx;
    }
    return make_measure(grid.lo, grid.hi, std::move(d));
}

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void measure_to_csv(const Measure1D& mu, std::ostream& os) {
    os << "x,density\n";
    for (int i = 0; i < mu.n_grid; ++i)
        os << format_double(mu.x_at(i)) << ',' << format_double(mu.density[static_cast<std::size_t>(i)]) << '\n';
}

inline std::string measure_to_csv(const Measure1D& mu) {
    std::ostringstream os;
    measure_to_csv(mu, os);
    return os.str();
}

inline nlohmann::ordered_json measure_to_json(const Measure1D& mu) {
    nlohmann::ordered_json j;
    j["lo"] = mu.lo;
    j["hi"] = mu.hi;
    j["n_grid"] = mu.n_grid;
    j["mass"] = mu.mass;
    j["density"] = mu.density;
    return j;
}

}  // namespace critlab
