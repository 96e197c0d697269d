#pragma once

// The universal limit measures of the critical-value statistics: the density
// mu_m built from expected absolute determinants, the two independent
// constructions of sigma_{m,r}, the exact completed-square identity behind the
// r > 1 derivation, the convolution characterization of sigma_m, the large-m
// Gaussian limit, and the total-mass constant with its growth law.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "critlab/measure.hpp"
#include "critlab/random_matrix.hpp"

namespace critlab {

struct LimitMeasureSpec {
    int m = 1;
    double r = 1.0;
    double kappa = 0.0;   // (r - 1) / (2r), in [0, 1/2)
    double tau_sq = 0.0;  // (r - 1) / (r + 1) (the positive completed-square form)
    GridSpec grid;
};

inline LimitMeasureSpec make_limit_spec(int m, double r, const GridSpec& grid = {}) {
    if (m < 1) throw std::invalid_argument("make_limit_spec: m must be >= 1");
    if (!(r >= 1.0)) throw std::invalid_argument("make_limit_spec: r must be >= 1");
    LimitMeasureSpec spec;
    spec.m = m;
    spec.r = r;
    spec.kappa = (r - 1.0) / (2.0 * r);
    spec.tau_sq = (r - 1.0) / (r + 1.0);
    spec.grid = grid;
    return spec;
}

// Density of the unnormalized limit measure:
//     mu_m(y) = E |det(A - (y/sqrt(r)) Id)| * e^{-y^2/2} / sqrt(2 pi),
// with A drawn from the shifted ensemble with u = 2 kappa = (r-1)/r, v = 1.
// Exact for m <= 3 via the one-point-density formulas.
inline double mu_m_density(int m, double r, double y) {
    if (!(r >= 1.0)) throw std::invalid_argument("mu_m_density: r must be >= 1");
    const double c = y / std::sqrt(r);
    const double u = (r - 1.0) / r;  // 2 kappa
    const double phi = gaussian_density(0.0, 1.0, y);
    if (u == 0.0) return expected_abs_det_goe(m, 1.0, c) * phi;
    return expected_abs_det_shifted(m, u, 1.0, c) * phi;
}

// sigma_{m,r} built from its convolution representation:
//     sigma_{m,r} proportional to gamma_{(r-1)/r} * (e^{-r l^2/4} rho_{m+1,1/r}(l) dl),
// normalized to a probability measure; r = 1 skips the convolution entirely
// (the smoothing variance is zero, i.e. a point mass).
inline Measure1D sigma_mr(int m, double r, const GridSpec& grid) {
    if (!(r >= 1.0)) throw std::invalid_argument("sigma_mr: r must be >= 1");
    if (m > 3) throw std::invalid_argument("sigma_mr: exact path needs m <= 3 (pass a density)");
    Measure1D base = tabulate_measure(grid, [m, r](double lam) {
        return std::exp(-0.25 * r * lam * lam) * rho_point_exact(m + 1, 1.0 / r, lam);
    });
    if (r > 1.0) base = convolve_gaussian(base, (r - 1.0) / r);
    return normalize(base);
}

// Same construction driven by a precomputed (typically Monte Carlo) density
// for rho_{m+1,1}; the 1/r variance is reached through the exact rescaling.
inline Measure1D sigma_mr(int m, double r, const GridSpec& grid, const CorrelationFunction& rho_m1_v1) {
    if (!(r >= 1.0)) throw std::invalid_argument("sigma_mr: r must be >= 1");
    if (rho_m1_v1.n != m + 1 || std::abs(rho_m1_v1.v - 1.0) > 1e-12)
        throw std::invalid_argument("sigma_mr: need the n = m + 1, v = 1 density");
    const CorrelationFunction scaled = rescale_correlation(rho_m1_v1, std::sqrt(r));
    Measure1D base = tabulate_measure(grid, [&scaled, r](double lam) {
        return std::exp(-0.25 * r * lam * lam) * density_at(scaled.density, lam);
    });
    if (r > 1.0) base = convolve_gaussian(base, (r - 1.0) / r);
    return normalize(base);
}

// sigma_{m,r} built the other way: normalizing the mu_m density directly.
// Agreement with sigma_mr validates the whole derivation chain numerically.
inline Measure1D sigma_mr_via_mu(int m, double r, const GridSpec& grid) {
    return normalize(tabulate_measure(grid, [m, r](double y) { return mu_m_density(m, r, y); }));
}

// Residual of the completed-square identity used in the r > 1 derivation:
// with tau^2 = (r-1)/(r+1),
//   -(1/(4 tau^2)) (l - (tau^2+1) y / sqrt(r))^2 - r y^2 / (2(r+1))
// must equal
//   -l^2/4 - (l sqrt(1/(2(r-1))) - y sqrt(r/(2(r-1))))^2.
// Returned relative to the magnitude of the compared expressions, since both
// sides grow like y^2/(r-1) near r = 1 and absolute cancellation error grows
// with them.
inline double case1_identity_check(double r, double lambda, double y) {
    if (!(r > 1.0)) throw std::invalid_argument("case1_identity_check: r must be > 1");
    const double tau_sq = (r - 1.0) / (r + 1.0);
    const double arg = lambda - (tau_sq + 1.0) * y / std::sqrt(r);
    const double lhs = -arg * arg / (4.0 * tau_sq) - r * y * y / (2.0 * (r + 1.0));
    const double root = lambda * std::sqrt(1.0 / (2.0 * (r - 1.0))) - y * std::sqrt(r / (2.0 * (r - 1.0)));
    const double rhs = -0.25 * lambda * lambda - root * root;
    return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

// Right-hand side of the convolution characterization: the pushforward of
// sigma_{m,1} under scaling by sqrt((m+4)/(m+2)).
inline Measure1D corollary2_rhs(int m, const GridSpec& grid) {
    const double t = std::sqrt((m + 4.0) / (m + 2.0));
    return rescale_pushforward(sigma_mr(m, 1.0, grid), t);
}

inline Measure1D corollary2_rhs(int m, const GridSpec& grid, const CorrelationFunction& rho_m1_v1) {
    const double t = std::sqrt((m + 4.0) / (m + 2.0));
    return rescale_pushforward(sigma_mr(m, 1.0, grid, rho_m1_v1), t);
}

struct SigmaMResult {
    Measure1D measure;
    double forward_residual = 0.0;
    bool reliable = true;
};

// Extraction of sigma_m from the convolution equation
//     gamma_{2/(m+2)} * sigma_m = (R_{sqrt((m+4)/(m+2))})_* sigma_{m,1}
// by regularized deconvolution, with the forward-consistency residual.
inline SigmaMResult sigma_m(int m, const GridSpec& grid, double reg) {
    const Measure1D rhs = corollary2_rhs(m, grid);
    const DeconvolveResult dec = deconvolve_gaussian_checked(rhs, 2.0 / (m + 2.0), reg);
    return {dec.measure, dec.forward_residual, dec.reliable};
}

inline SigmaMResult sigma_m(int m, const GridSpec& grid, double reg, const CorrelationFunction& rho_m1_v1) {
    const Measure1D rhs = corollary2_rhs(m, grid, rho_m1_v1);
    const DeconvolveResult dec = deconvolve_gaussian_checked(rhs, 2.0 / (m + 2.0), reg);
    return {dec.measure, dec.forward_residual, dec.reliable};
}

struct GaussianLimitEntry {
    int m = 0;
    double ks = 0.0;
    double noise_floor = 0.0;  // Monte Carlo scale estimate, ~ 1/sqrt(n_samples)
};

// KS distance of sigma_{m,1} (Monte Carlo densities) from the centered
// Gaussian of variance 2, along a sweep of m.
inline std::vector<GaussianLimitEntry> gaussian_limit_report(const std::vector<int>& ms,
                                                             const GridSpec& grid, long n_samples,
                                                             std::uint64_t seed, int n_bins = 2048) {
    if (ms.empty()) throw std::invalid_argument("gaussian_limit_report: ms must be nonempty");
    const Measure1D gauss2 = normalize(gaussian_measure(2.0, grid));
    std::vector<GaussianLimitEntry> out;
    out.reserve(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const int m = ms[i];
        const CorrelationFunction rho =
            rho_mc(m + 1, 1.0, default_rho_grid(m + 1, 1.0, n_bins), n_samples,
                   derive_seed(seed, static_cast<std::uint64_t>(i)));
        const Measure1D sigma = sigma_mr(m, 1.0, grid, rho);
        GaussianLimitEntry e;
        e.m = m;
        e.ks = ks_distance(sigma, gauss2);
        e.noise_floor = 1.0 / std::sqrt(static_cast<double>(n_samples));
        out.push_back(e);
    }
    return out;
}

struct RbarComparison {
    double sup_inside = 0.0;   // sup_{|x| <= c} |Rbar_m - semicircle|
    double max_outside = 0.0;  // max_{|x| > c} |Rbar_m - semicircle| on the grid
};

// Rbar_m(x) = sqrt(m) rho_{m+1,1}(sqrt(m) x) = rho_{m+1,1/m}(x), compared with
// the unit-variance semicircle inside and outside |x| <= c.
inline RbarComparison rbar_comparison(int m, double c, const CorrelationFunction& rho_m1_v1) {
    if (!(c > 0.0 && c < 2.0)) throw std::invalid_argument("rbar_comparison: need 0 < c < 2");
    if (rho_m1_v1.n != m + 1 || std::abs(rho_m1_v1.v - 1.0) > 1e-12)
        throw std::invalid_argument("rbar_comparison: need the n = m + 1, v = 1 density");
    const CorrelationFunction rbar = rescale_correlation(rho_m1_v1, std::sqrt(static_cast<double>(m)));
    RbarComparison res;
    for (int i = 0; i < rbar.density.n_grid; ++i) {
        const double x = rbar.density.x_at(i);
        const double diff = std::abs(rbar.density.density[static_cast<std::size_t>(i)] -
                                     semicircle_density(1.0, x));
        if (std::abs(x) <= c)
            res.sup_inside = std::max(res.sup_inside, diff);
        else
            res.max_outside = std::max(res.max_outside, diff);
    }
    return res;
}

inline RbarComparison rbar_comparison(int m, double c, long n_samples, std::uint64_t seed,
                                      int n_bins = 200) {
    return rbar_comparison(m, c,
                           rho_mc(m + 1, 1.0, default_rho_grid(m + 1, 1.0, n_bins), n_samples, seed));
}

namespace detail {
// log of mu_m(R) given I_m = int e^{-y^2/4} rho_{m+1,1}(y) dy:
// mu_m(R) = 2^{(m+4)/2} Gamma((m+3)/2) / sqrt(2 pi) * I_m.
inline double log_mu_total_from_i(int m, double i_m) {
    return 0.5 * (m + 4.0) * std::numbers::ln2 + std::lgamma(0.5 * (m + 3)) -
           0.5 * std::log(2.0 * std::numbers::pi) + std::log(i_m);
}

inline double log_c_from_log_mu(int m, double log_mu) {
    return 0.5 * m * std::log(2.0 / (m + 4.0)) + std::lgamma(1.0 + 0.5 * m) + log_mu;
}
}  // namespace detail

// Total mass of the r = 1 limit before normalization, folded with the
// dimensional prefactor: the universal constant governing the expected count.
// Exact (quadrature) for m <= 3.
inline double limit_total_mass(int m) {
    if (m < 1) throw std::invalid_argument("limit_total_mass: m must be >= 1");
    if (m > 3)
        throw std::invalid_argument("limit_total_mass: exact path needs m <= 3 (use the MC variant)");
    const double reach = 4.0 * std::sqrt(m + 1.0) + 8.0;
    const QuadRule r = composite_gl(-reach, reach, 1.0, 16);
    double i_m = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i)
        i_m += r.w[i] * std::exp(-0.25 * r.x[i] * r.x[i]) * rho_point_exact(m + 1, 1.0, r.x[i]);
    return std::exp(detail::log_c_from_log_mu(m, detail::log_mu_total_from_i(m, i_m)));
}

// Monte Carlo version for any m: I_m is an eigenvalue-trace average,
//     I_m = E[(1/(m+1)) sum_i e^{-lambda_i^2/4}]
// over draws of the (m+1)-dimensional u = 0 ensemble at v = 1.
inline DetEstimate limit_total_mass_mc(int m, long n_samples, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("limit_total_mass_mc: m must be >= 1");
    if (n_samples < 2) throw std::invalid_argument("limit_total_mass_mc: n_samples must be >= 2");
    const int n = m + 1;
    const MatrixEnsemble ens{n, 0.0, 1.0};
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
            const Eigen::MatrixXd a = sample_matrix(ens, derive_seed(seed, static_cast<std::uint64_t>(s)));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
            double t = 0.0;
            for (int i = 0; i < n; ++i) {
                const double lam = es.eigenvalues()[i];
                t += std::exp(-0.25 * lam * lam);
            }
            t /= n;
            acc.sum += t;
            acc.sum_sq += t * t;
        }
        return acc;
    });
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& p : parts) {
        sum += p.sum;
        sum_sq += p.sum_sq;
    }
    const double i_m = sum / n_samples;
    const double var = std::max(0.0, sum_sq / n_samples - i_m * i_m);
    const double se_i = std::sqrt(var / n_samples);
    DetEstimate est;
    est.value = std::exp(detail::log_c_from_log_mu(m, detail::log_mu_total_from_i(m, i_m)));
    est.std_error = est.value * se_i / i_m;
    return est;
}

struct GrowthFit {
    double alpha = 0.0;  // coefficient of (1/2) m log m
    double beta = 0.0;   // coefficient of m
    double gamma = 0.0;  // intercept
};

// Least-squares fit log C_m = alpha * (1/2) m log m + beta * m + gamma.
// The lower-order regressors absorb the linear-in-m correction, so alpha
// isolates the leading growth rate.
inline GrowthFit fit_log_growth(const std::vector<int>& ms, const std::vector<double>& log_c) {
    if (ms.size() != log_c.size() || ms.size() < 3)
        throw std::invalid_argument("fit_log_growth: need >= 3 matching points");
    const int n = static_cast<int>(ms.size());
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        const double m = ms[static_cast<std::size_t>(i)];
        X(i, 0) = 0.5 * m * std::log(m);
        X(i, 1) = m;
        X(i, 2) = 1.0;
        b[i] = log_c[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd coef = X.colPivHouseholderQr().solve(b);
    return {coef[0], coef[1], coef[2]};
}

}  // namespace critlab
