#pragma once

// Gaussian symmetric-matrix ensembles: sampling, Selberg normalization
// constants, exact (n <= 4) and Monte Carlo one-point eigenvalue densities,
// the rescaling identity, semicircle asymptotics, and expected absolute
// determinants of shifted matrices.
//
// The two-parameter ensemble with entry covariances
//     E(a_ij a_kl) = u d_ij d_kl + v (d_ik d_jl + d_il d_jk)
// has diagonal variance u + 2v, diagonal cross-covariance u, and off-diagonal
// variance v; u = 0 is the rescaled GOE (diagonal variance 2v).

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "critlab/measure.hpp"
#include "critlab/quadrature.hpp"
#include "critlab/rng.hpp"

namespace critlab {

struct MatrixEnsemble {
    int m = 1;
    double u = 0.0;
    double v = 1.0;
};

inline void validate_ensemble(const MatrixEnsemble& ens) {
    if (ens.m < 1) throw std::invalid_argument("MatrixEnsemble: m must be >= 1");
    if (!(ens.v > 0.0)) throw std::invalid_argument("MatrixEnsemble: v must be positive");
    if (!(ens.m * ens.u + 2.0 * ens.v > 0.0))
        throw std::invalid_argument("MatrixEnsemble: need m*u + 2v > 0 (got " +
                                    std::to_string(ens.m * ens.u + 2.0 * ens.v) + ")");
}

namespace detail {
// Fills the strict upper triangle and diagonal with the u = 0 (GOE) draw.
inline void fill_goe(Eigen::MatrixXd& a, double v, GaussianStream& g) {
    const int m = static_cast<int>(a.rows());
    const double sd_diag = std::sqrt(2.0 * v);
    const double sd_off = std::sqrt(v);
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            const double x = (i == j ? sd_diag : sd_off) * g.normal();
            a(i, j) = x;
            a(j, i) = x;
        }
    }
}
}  // namespace detail

// One draw from the ensemble.  u > 0 uses the sum decomposition
// A = B + X * Identity with B a GOE draw and X ~ N(0, u) independent; u < 0
// (legal while m*u + 2v > 0) has no such decomposition and is built directly:
// independent off-diagonal entries plus a diagonal vector with covariance
// 2v*I + u*J realized as sqrt(2v) z + ((sqrt(2v + m u) - sqrt(2v))/m) (sum z) 1.
inline Eigen::MatrixXd sample_matrix(const MatrixEnsemble& ens, std::uint64_t seed) {
    validate_ensemble(ens);
    GaussianStream g(seed);
    Eigen::MatrixXd a(ens.m, ens.m);
    if (ens.u >= 0.0) {
        detail::fill_goe(a, ens.v, g);
        if (ens.u > 0.0) {
            const double x = std::sqrt(ens.u) * g.normal();
            for (int i = 0; i < ens.m; ++i) a(i, i) += x;
        }
        return a;
    }
    const double sd_off = std::sqrt(ens.v);
    for (int i = 0; i < ens.m; ++i)
        for (int j = i + 1; j < ens.m; ++j) {
            const double x = sd_off * g.normal();
            a(i, j) = x;
            a(j, i) = x;
        }
    const double root2v = std::sqrt(2.0 * ens.v);
    const double alpha = (std::sqrt(2.0 * ens.v + ens.m * ens.u) - root2v) / ens.m;
    Eigen::VectorXd z(ens.m);
    for (int i = 0; i < ens.m; ++i) z[i] = g.normal();
    const double zsum = z.sum();
    for (int i = 0; i < ens.m; ++i) a(i, i) = root2v * z[i] + alpha * zsum;
    return a;
}

// log of the eigenvalue-repulsion normalization Z_m = 2^{m/2} m! prod Gamma(j/2).
inline double selberg_log_Z(int m) {
    if (m < 1 || m > 200)
        throw std::invalid_argument("selberg_log_Z: m must be in [1, 200], got " + std::to_string(m));
    double lz = 0.5 * m * std::numbers::ln2 + std::lgamma(m + 1.0);
    for (int j = 1; j <= m; ++j) lz += std::lgamma(0.5 * j);
    return lz;
}

inline double selberg_Z(int m) { return std::exp(selberg_log_Z(m)); }

// Z_m(v) = (2v)^{m(m+1)/4} Z_m, the variance-v normalization.
inline double selberg_Z_v(int m, double v) {
    if (!(v > 0.0)) throw std::invalid_argument("selberg_Z_v: v must be positive");
    return std::exp(selberg_log_Z(m) + 0.25 * m * (m + 1.0) * std::log(2.0 * v));
}

// Integrand of the eigenvalue-space normalization integral at weight scale
// v = 1/2: prod_{i<j} |l_i - l_j| exp(-sum l^2 / 2).
inline double weyl_integrand(const std::vector<double>& lambda) {
    double prod = 1.0;
    double q = 0.0;
    const std::size_t n = lambda.size();
    for (std::size_t i = 0; i < n; ++i) {
        q += lambda[i] * lambda[i];
        for (std::size_t j = i + 1; j < n; ++j) prod *= std::abs(lambda[i] - lambda[j]);
    }
    return prod * std::exp(-0.5 * q);
}

// Independent numerical evaluation of the normalization integral for m <= 3
// by ordered-sector nested quadrature (the integrand is smooth inside each
// order sector, so composite Gauss-Legendre converges rapidly).
inline double selberg_weyl_quadrature(int m, double panel_w = 0.5, int n_gl = 12) {
    const double cutoff = 12.0;
    if (m == 1) {
        const QuadRule r = composite_gl(-cutoff, cutoff, panel_w, n_gl);
        return integrate_rule(r, [](double x) { return std::exp(-0.5 * x * x); });
    }
    if (m == 2) {
        // 2 * int_{x < y} (y - x) e^{-(x^2+y^2)/2}
        const QuadRule ry = composite_gl(-cutoff, cutoff, panel_w, n_gl);
        double total = 0.0;
        for (std::size_t iy = 0; iy < ry.x.size(); ++iy) {
            const double y = ry.x[iy];
            const QuadRule rx = composite_gl(-cutoff, y, panel_w, n_gl);
            double inner = 0.0;
            for (std::size_t ix = 0; ix < rx.x.size(); ++ix) {
                const double x = rx.x[ix];
                inner += rx.w[ix] * (y - x) * std::exp(-0.5 * x * x);
            }
            total += ry.w[iy] * inner * std::exp(-0.5 * y * y);
        }
        return 2.0 * total;
    }
    if (m == 3) {
        // 6 * int_{x < y < z} (y-x)(z-x)(z-y) e^{-(x^2+y^2+z^2)/2}
        const QuadRule rz = composite_gl(-cutoff, cutoff, panel_w, n_gl);
        double total = 0.0;
        for (std::size_t iz = 0; iz < rz.x.size(); ++iz) {
            const double z = rz.x[iz];
            const QuadRule ry = composite_gl(-cutoff, z, panel_w, n_gl);
            double midsum = 0.0;
            for (std::size_t iy = 0; iy < ry.x.size(); ++iy) {
                const double y = ry.x[iy];
                const QuadRule rx = composite_gl(-cutoff, y, panel_w, n_gl);
                double inner = 0.0;
                for (std::size_t ix = 0; ix < rx.x.size(); ++ix) {
                    const double x = rx.x[ix];
                    inner += rx.w[ix] * (y - x) * (z - x) * std::exp(-0.5 * x * x);
                }
                midsum += ry.w[iy] * inner * (z - y) * std::exp(-0.5 * y * y);
            }
            total += rz.w[iz] * midsum * std::exp(-0.5 * z * z);
        }
        return 6.0 * total;
    }
    throw std::invalid_argument("selberg_weyl_quadrature: only m <= 3 supported");
}

namespace detail {

// int_lo^inf P(c) |xi - c| e^{-c^2/2} dc for a polynomial P given by ascending
// coefficients; the kink at xi is handled by splitting the segment there and
// reading the pieces off the incomplete Gaussian moments.
inline double poly_weighted_tail(const double* p, int deg, double lo, double xi) {
    double m[8];
    double out = 0.0;
    const double hi_split = std::max(lo, xi);
    if (xi > lo) {
        gaussian_moments(lo, hi_split, deg + 1, m);
        for (int k = 0; k <= deg + 1; ++k) {
            double q = 0.0;
            if (k <= deg) q += xi * p[k];
            if (k >= 1) q -= p[k - 1];
            out += q * m[k];
        }
    }
    gaussian_moments(hi_split, std::numeric_limits<double>::infinity(), deg + 1, m);
    for (int k = 0; k <= deg + 1; ++k) {
        double q = 0.0;
        if (k >= 1) q += p[k - 1];
        if (k <= deg) q -= xi * p[k];
        out += q * m[k];
    }
    return out;
}

}  // namespace detail

// Reduced one-point density kernel: with s = x / sqrt(2v),
//     rho_{n,v}(x) = (2v)^{-1/2} e^{-s^2/2} G_n(s),
// where G_n(s) = Z_n^{-1} int prod_{i<j}|s_i - s_j| prod_j |s - s_j|
// e^{-sum s_j^2/2} ds_2..ds_n over R^{n-1}.  The reduced argument makes the
// rescaling identity hold to rounding error.  Evaluated exactly for n <= 4:
// closed form (n <= 2), sector-decomposed quadrature with the innermost
// variable integrated in closed form (n = 3, 4).
inline double reduced_density_G(int n, double xi, double panel_w = 2.0, int n_gl = 16) {
    static const double sqrt_half_pi = std::sqrt(std::numbers::pi / 2.0);
    static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    if (n == 1) return 1.0 / std::sqrt(2.0 * std::numbers::pi);
    if (n == 2) {
        const double i0m = sqrt_half_pi * (std::erf(xi * inv_sqrt2) + 1.0);
        const double i0p = sqrt_half_pi * (1.0 - std::erf(xi * inv_sqrt2));
        return (xi * (i0m - i0p) + 2.0 * std::exp(-0.5 * xi * xi)) / selberg_Z(2);
    }
    const double cutoff = std::abs(xi) + 12.0;
    if (n == 3) {
        double total = 0.0;
        const double seg[2][2] = {{-cutoff, xi}, {xi, cutoff}};
        for (const auto& s : seg) {
            if (s[1] <= s[0]) continue;
            const QuadRule r = composite_gl(s[0], s[1], panel_w, n_gl);
            for (std::size_t i = 0; i < r.x.size(); ++i) {
                const double a = r.x[i];
                const double p[2] = {-a, 1.0};  // P(c) = c - a
                total += r.w[i] * std::abs(xi - a) * std::exp(-0.5 * a * a) *
                         detail::poly_weighted_tail(p, 1, a, xi);
            }
        }
        return 2.0 * total / selberg_Z(3);
    }
    if (n == 4) {
        double total = 0.0;
        const double seg[2][2] = {{-cutoff, xi}, {xi, cutoff}};
        for (const auto& sa : seg) {
            if (sa[1] <= sa[0]) continue;
            const QuadRule ra = composite_gl(sa[0], sa[1], panel_w, n_gl);
            for (std::size_t ia = 0; ia < ra.x.size(); ++ia) {
                const double a = ra.x[ia];
                double acc = 0.0;
                const double mid = std::max(a, xi);
                const double segb[2][2] = {{a, mid}, {mid, cutoff}};
                for (const auto& sb : segb) {
                    if (sb[1] <= sb[0]) continue;
                    const QuadRule rb = composite_gl(sb[0], sb[1], panel_w, n_gl);
                    for (std::size_t ib = 0; ib < rb.x.size(); ++ib) {
                        const double b = rb.x[ib];
                        const double p[3] = {a * b, -(a + b), 1.0};  // P(c) = (c-a)(c-b)
                        acc += rb.w[ib] * (b - a) * std::abs(xi - b) * std::exp(-0.5 * b * b) *
                               detail::poly_weighted_tail(p, 2, b, xi);
                    }
                }
                total += ra.w[ia] * std::abs(xi - a) * std::exp(-0.5 * a * a) * acc;
            }
        }
        return 6.0 * total / selberg_Z(4);
    }
    throw std::invalid_argument("reduced_density_G: only n <= 4 supported, got " + std::to_string(n));
}

// Exact one-point eigenvalue density at a single argument, n <= 4.
inline double rho_point_exact(int n, double v, double x) {
    if (!(v > 0.0)) throw std::invalid_argument("rho_point_exact: v must be positive");
    const double scale = std::sqrt(2.0 * v);
    const double xi = x / scale;
    return std::exp(-0.5 * xi * xi) * reduced_density_G(n, xi) / scale;
}

enum class RhoMethod { exact_quadrature, monte_carlo };

struct CorrelationFunction {
    int n = 1;
    double v = 1.0;
    RhoMethod method = RhoMethod::exact_quadrature;
    Measure1D density;
    // Monte Carlo metadata (zero for exact densities).
    long n_samples = 0;
    std::vector<double> bin_std_error;  // per grid point, matrix-level clustering
};

inline CorrelationFunction rho_exact(int n, double v, const GridSpec& grid) {
    if (n > 4) throw std::invalid_argument("rho_exact: n must be <= 4 (use rho_mc)");
    CorrelationFunction cf;
    cf.n = n;
    cf.v = v;
    cf.method = RhoMethod::exact_quadrature;
    cf.density = tabulate_measure(grid, [n, v](double x) { return rho_point_exact(n, v, x); });
    return cf;
}

inline GridSpec default_rho_grid(int n, double v, int n_bins = 200) {
    const double edge = 4.0 * std::sqrt(n * v);
    return {-edge, edge, n_bins};
}

// Histogram estimate of the one-point density: all eigenvalues from
// n_samples draws, binned on the grid and normalized to unit mass.  The
// per-bin standard error treats each matrix (not each eigenvalue) as the
// independent unit, since eigenvalues of one draw are strongly correlated.
inline CorrelationFunction rho_mc(int n, double v, const GridSpec& grid, long n_samples,
                                  std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("rho_mc: n must be >= 1");
    if (n_samples < 1) throw std::invalid_argument("rho_mc: n_samples must be >= 1");
    const int nb = grid.n;
    const double dx = (grid.hi - grid.lo) / (nb - 1);

    struct ChunkAccum {
        std::vector<long> count;    // eigenvalues landing in each bin
        std::vector<long> count_sq; // sum over matrices of (per-matrix bin count)^2
        long used = 0;
    };
    const int n_chunks = 64;
    const MatrixEnsemble ens{n, 0.0, v};
    std::vector<ChunkAccum> parts = parallel_chunks<ChunkAccum>(n_chunks, [&](int chunk) {
        ChunkAccum acc;
        acc.count.assign(static_cast<std::size_t>(nb), 0);
        acc.count_sq.assign(static_cast<std::size_t>(nb), 0);
        const long lo = n_samples * chunk / n_chunks;
        const long hi = n_samples * (chunk + 1) / n_chunks;
        std::vector<int> touched;
        std::vector<int> local(static_cast<std::size_t>(nb), 0);
        for (long s = lo; s < hi; ++s) {
            const Eigen::MatrixXd a = sample_matrix(ens, derive_seed(seed, static_cast<std::uint64_t>(s)));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
            touched.clear();
            for (int i = 0; i < n; ++i) {
                const double lam = es.eigenvalues()[i];
                const int b = static_cast<int>(std::floor((lam - grid.lo) / dx + 0.5));
                if (b < 0 || b >= nb) continue;
                if (local[static_cast<std::size_t>(b)] == 0) touched.push_back(b);
                ++local[static_cast<std::size_t>(b)];
            }
            for (int b : touched) {
                const long cnt = local[static_cast<std::size_t>(b)];
                acc.count[static_cast<std::size_t>(b)] += cnt;
                acc.count_sq[static_cast<std::size_t>(b)] += cnt * cnt;
                local[static_cast<std::size_t>(b)] = 0;
            }
            ++acc.used;
        }
        return acc;
    });

    std::vector<long> count(static_cast<std::size_t>(nb), 0);
    std::vector<long> count_sq(static_cast<std::size_t>(nb), 0);
    for (const auto& part : parts)
        for (int b = 0; b < nb; ++b) {
            count[static_cast<std::size_t>(b)] += part.count[static_cast<std::size_t>(b)];
            count_sq[static_cast<std::size_t>(b)] += part.count_sq[static_cast<std::size_t>(b)];
        }

    const double denom = static_cast<double>(n_samples) * n * dx;
    std::vector<double> density(static_cast<std::size_t>(nb));
    std::vector<double> se(static_cast<std::size_t>(nb));
    for (int b = 0; b < nb; ++b) {
        const double c = static_cast<double>(count[static_cast<std::size_t>(b)]);
        density[static_cast<std::size_t>(b)] = c / denom;
        const double mean_c = c / n_samples;
        const double var_c =
            std::max(0.0, static_cast<double>(count_sq[static_cast<std::size_t>(b)]) / n_samples - mean_c * mean_c);
        se[static_cast<std::size_t>(b)] = std::sqrt(var_c / n_samples) / (n * dx);
    }

    CorrelationFunction cf;
    cf.n = n;
    cf.v = v;
    cf.method = RhoMethod::monte_carlo;
    cf.density = make_measure(grid.lo, grid.hi, std::move(density));
    // Exact unit mass by construction (trapezoid endpoints shave a negligible
    // sliver; renormalize so the recorded mass is exactly 1, and scale the
    // standard errors by the same factor).
    if (cf.density.mass > 0.0) {
        const double factor = 1.0 / cf.density.mass;
        cf.density = normalize(cf.density);
        for (double& e : se) e *= factor;
    }
    cf.n_samples = n_samples;
    cf.bin_std_error = std::move(se);
    return cf;
}

// Exact rescaling: with c > 0, c * rho_{n, c^2 v}(c y) = rho_{n, v}(y), so the
// density of variance v/c^2 is y -> c * rho(c y): support / c, density * c.
inline CorrelationFunction rescale_correlation(const CorrelationFunction& rho, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("rescale_correlation: c must be positive");
    CorrelationFunction out;
    out.n = rho.n;
    out.v = rho.v / (c * c);
    out.method = rho.method;
    out.density = rescale_pushforward(rho.density, 1.0 / c);
    out.n_samples = rho.n_samples;
    out.bin_std_error = rho.bin_std_error;
    for (double& e : out.bin_std_error) e *= c;
    return out;
}

// Large-n limit of the rescaled one-point density.
inline double semicircle_density(double v, double x) {
    if (!(v > 0.0)) throw std::invalid_argument("semicircle_density: v must be positive");
    const double disc = 4.0 * v - x * x;
    if (disc <= 0.0) return 0.0;
    return std::sqrt(disc) / (2.0 * std::numbers::pi * v);
}

// Log-density of the u = 0 ensemble over its independent entries, evaluated
// two ways: directly from the entry normals, and via the trace formula
//     -log p = tr(A^2)/(4v) + (m/2) log(4 pi v) + (m(m-1)/4) log(2 pi v).
inline double goe_neg_log_density_entries(const Eigen::MatrixXd& a, double v) {
    const int m = static_cast<int>(a.rows());
    const double log2piv = std::log(2.0 * std::numbers::pi * v);
    const double log4piv = std::log(4.0 * std::numbers::pi * v);
    double q = 0.0;
    for (int i = 0; i < m; ++i) {
        q += a(i, i) * a(i, i) / (4.0 * v) + 0.5 * log4piv;
        for (int j = i + 1; j < m; ++j) q += a(i, j) * a(i, j) / (2.0 * v) + 0.5 * log2piv;
    }
    return q;
}

inline double goe_neg_log_density_trace(const Eigen::MatrixXd& a, double v) {
    const int m = static_cast<int>(a.rows());
    return (a * a).trace() / (4.0 * v) + 0.5 * m * std::log(4.0 * std::numbers::pi * v) +
           0.25 * m * (m - 1.0) * std::log(2.0 * std::numbers::pi * v);
}

// E |det(A - c)| for the u = 0 ensemble, via the closed one-point-density
// identity: 2^{3/2} (2v)^{(m+1)/2} Gamma((m+3)/2) e^{c^2/(4v)} rho_{m+1,v}(c).
// Exact for m <= 3; larger m takes a precomputed (typically MC) density with
// its uncertainty propagated.
inline double expected_abs_det_goe(int m, double v, double c) {
    if (m < 1) throw std::invalid_argument("expected_abs_det_goe: m must be >= 1");
    if (m > 3)
        throw std::invalid_argument(
            "expected_abs_det_goe: exact path needs m <= 3; pass a CorrelationFunction for larger m");
    if (!(v > 0.0)) throw std::invalid_argument("expected_abs_det_goe: v must be positive");
    const double scale = std::sqrt(2.0 * v);
    const double xi = c / scale;
    // e^{c^2/(4v)} rho_{m+1,v}(c) = G_{m+1}(c / sqrt(2v)) / sqrt(2v)
    const double pref = std::exp(1.5 * std::numbers::ln2 + (m + 1) * std::log(scale) +
                                 std::lgamma(0.5 * (m + 3)));
    return pref * reduced_density_G(m + 1, xi) / scale;
}

struct DetEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

inline DetEstimate expected_abs_det_goe(int m, double v, double c, const CorrelationFunction& rho) {
    if (rho.n != m + 1) throw std::invalid_argument("expected_abs_det_goe: density must have n = m + 1");
    if (std::abs(rho.v - v) > 1e-12 * std::max(1.0, v))
        throw std::invalid_argument("expected_abs_det_goe: density variance mismatch");
    const double pref = std::exp(1.5 * std::numbers::ln2 + 0.5 * (m + 1) * std::log(2.0 * v) +
                                 std::lgamma(0.5 * (m + 3)) + c * c / (4.0 * v));
    DetEstimate est;
    est.value = pref * density_at(rho.density, c);
    if (!rho.bin_std_error.empty()) {
        const double t = (c - rho.density.lo) / rho.density.dx();
        const int i = std::min(std::max(0, static_cast<int>(t)),
                               static_cast<int>(rho.bin_std_error.size()) - 1);
        est.std_error = pref * rho.bin_std_error[static_cast<std::size_t>(i)];
    }
    return est;
}

// E |det(A - c)| for the shifted ensemble with u > 0, v > 0, through the
// mixture representation: averaging the u = 0 formula over the N(0,u) shift.
// Two algebraically equal groupings are evaluated:
//   form A: average G((c - x)/sqrt(2v)) against the N(0,u) weight in x;
//   form B (u = 2kv, k < 1 only): complete the square, giving the one-point
//   density against a Gaussian window of variance 2 v t^2, t^2 = k/(1-k),
//   centered at (1 + t^2) c, with an explicit e^{(1+t^2) c^2/(4v)} prefactor.
struct ShiftedDetForms {
    double form_a = 0.0;
    double form_b = 0.0;       // NaN when the completed-square path is invalid
    bool forms_compared = false;
    double rel_gap = 0.0;
};

inline ShiftedDetForms expected_abs_det_shifted_forms(int m, double u, double v, double c) {
    if (m < 1 || m > 3)
        throw std::invalid_argument("expected_abs_det_shifted: exact path needs 1 <= m <= 3");
    if (!(u > 0.0) || !(v > 0.0))
        throw std::invalid_argument("expected_abs_det_shifted: need u > 0 and v > 0");
    const double scale = std::sqrt(2.0 * v);
    const double log_pref = 1.5 * std::numbers::ln2 + (m + 1) * std::log(scale) +
                            std::lgamma(0.5 * (m + 3));
    ShiftedDetForms res;

    // Form A: substitute x = sqrt(u) t against the standard normal weight.
    {
        static const double inv_sqrt_2pi = 0.3989422804014326779;
        const double su = std::sqrt(u);
        const QuadRule r = composite_gl(-10.0, 10.0, 0.5, 16);
        double acc = 0.0;
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            const double t = r.x[i];
            acc += r.w[i] * reduced_density_G(m + 1, (c - su * t) / scale) *
                   std::exp(-0.5 * t * t);
        }
        res.form_a = std::exp(log_pref) / scale * inv_sqrt_2pi * acc;
    }

    const double k = u / (2.0 * v);
    if (k < 1.0) {
        // Form B: rho against the shifted Gaussian window.
        const double t2 = k / (1.0 - k);
        const double center = (1.0 + t2) * c;
        const double win_var = 2.0 * v * t2;
        const double win_sd = std::sqrt(win_var);
        const double lo = std::min(-4.5 * scale * std::sqrt(static_cast<double>(m + 1)), center - 10.0 * win_sd);
        const double hi = std::max(4.5 * scale * std::sqrt(static_cast<double>(m + 1)), center + 10.0 * win_sd);
        const QuadRule r = composite_gl(lo, hi, 0.5 * std::min(scale, win_sd), 16);
        double acc = 0.0;
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            const double lam = r.x[i];
            const double z = (lam - center);
            acc += r.w[i] * rho_point_exact(m + 1, v, lam) * std::exp(-0.25 * z * z / (v * t2));
        }
        res.form_b = std::exp(log_pref + 0.25 * (1.0 + t2) * c * c / v) /
                     std::sqrt(2.0 * std::numbers::pi * u) * acc;
        res.forms_compared = true;
        res.rel_gap = std::abs(res.form_a - res.form_b) /
                      std::max({1e-300, std::abs(res.form_a), std::abs(res.form_b)});
    } else {
        res.form_b = std::numeric_limits<double>::quiet_NaN();
    }
    return res;
}

inline double expected_abs_det_shifted(int m, double u, double v, double c) {
    return expected_abs_det_shifted_forms(m, u, v, c).form_a;
}

// Brute-force sample mean and standard error of |det(A - c)|.
inline DetEstimate expected_abs_det_mc(const MatrixEnsemble& ens, double c, long n_samples,
                                       std::uint64_t seed) {
    validate_ensemble(ens);
    if (n_samples < 2) throw std::invalid_argument("expected_abs_det_mc: n_samples must be >= 2");
    struct Acc {
        double sum = 0.0;
        double sum_sq = 0.0;
    };
    const int n_chunks = 64;
    std::vector<Acc> parts = parallel_chunks<Acc>(n_chunks, [&](int chunk) {
        Acc acc;
        const long lo = n_samples * chunk / n_chunks;
        const long hi = n_samples * (chunk + 1) / n_chunks;
        for (long s = lo; s < hi; ++s) {
            Eigen::MatrixXd a = sample_matrix(ens, derive_seed(seed, static_cast<std::uint64_t>(s)));
            for (int i = 0; i < ens.m; ++i) a(i, i) -= c;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
            double ad = 1.0;
            for (int i = 0; i < ens.m; ++i) ad *= std::abs(es.eigenvalues()[i]);
            acc.sum += ad;
            acc.sum_sq += ad * ad;
        }
        return acc;
    });
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& p : parts) {
        sum += p.sum;
        sum_sq += p.sum_sq;
    }
    DetEstimate est;
    est.value = sum / n_samples;
    const double var = std::max(0.0, sum_sq / n_samples - est.value * est.value);
    est.std_error = std::sqrt(var / n_samples);
    return est;
}

}  // namespace critlab
