#pragma once

// Finite-dimensional Gaussian vectors: sampling through a spectral square
// root, and conditioning via the regression (Schur-complement) formula.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "critlab/rng.hpp"

namespace critlab {

struct GaussianVector {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    int dim() const { return static_cast<int>(mean.size()); }
};

inline void validate_gaussian(const GaussianVector& gv) {
    const auto n = gv.cov.rows();
    if (gv.cov.cols() != n || gv.mean.size() != n)
        throw std::invalid_argument("GaussianVector: inconsistent dimensions");
    const double scale = std::max(1.0, gv.cov.cwiseAbs().maxCoeff());
    if ((gv.cov - gv.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("GaussianVector: covariance not symmetric");
}

// Symmetric square root by spectral decomposition.  Tolerates semidefinite
// input: eigenvalues in [-1e-10 * lambda_max, 0) are clamped to zero, more
// negative ones are an error.
inline Eigen::MatrixXd covariance_sqrt(const Eigen::MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("covariance_sqrt: eigendecomposition failed");
    Eigen::VectorXd ev = es.eigenvalues();
    const double lmax = std::max(0.0, ev.maxCoeff());
    Eigen::VectorXd root(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < -1e-10 * std::max(lmax, 1e-300))
            throw std::runtime_error("covariance_sqrt: covariance not positive semidefinite (eigenvalue " +
                                     std::to_string(ev[i]) + ")");
        root[i] = ev[i] > 0.0 ? std::sqrt(ev[i]) : 0.0;
    }
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

// i.i.d. draws; deterministic for a fixed seed.
inline std::vector<Eigen::VectorXd> sample(const GaussianVector& gv, std::uint64_t seed, long count) {
    if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
    validate_gaussian(gv);
    const Eigen::MatrixXd root = covariance_sqrt(gv.cov);
    GaussianStream g(seed);
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(count));
    Eigen::VectorXd z(gv.dim());
    for (long i = 0; i < count; ++i) {
        for (int j = 0; j < gv.dim(); ++j) z[j] = g.normal();
        out.push_back(gv.mean + root * z);
    }
    return out;
}

struct ConditionResult {
    GaussianVector conditional;          // law of the unobserved block
    std::vector<int> free_indices;       // joint indices it refers to
    double observed_condition_number = 0.0;
};

// Regression formula: for a joint Gaussian (X1, X2) and observation X2 = x2,
//   cov(X1 | X2) = S11 - S12 S22^{-1} S21
//   E(X1 | X2=x2) = mean1 + S12 S22^{-1} (x2 - mean2).
// The conditional covariance does not depend on x2.
inline ConditionResult condition(const GaussianVector& joint,
                                 const std::vector<int>& observed_indices,
                                 const Eigen::VectorXd& observed_values) {
    validate_gaussian(joint);
    const int n = joint.dim();
    const int k = static_cast<int>(observed_indices.size());
    if (static_cast<int>(observed_values.size()) != k)
        throw std::invalid_argument("condition: observed_values size mismatch");
    std::vector<bool> is_obs(static_cast<std::size_t>(n), false);
    for (int idx : observed_indices) {
        if (idx < 0 || idx >= n) throw std::invalid_argument("condition: index out of range");
        if (is_obs[static_cast<std::size_t>(idx)]) throw std::invalid_argument("condition: repeated index");
        is_obs[static_cast<std::size_t>(idx)] = true;
    }
    std::vector<int> free;
    free.reserve(static_cast<std::size_t>(n - k));
    for (int i = 0; i < n; ++i)
        if (!is_obs[static_cast<std::size_t>(i)]) free.push_back(i);
    const int f = static_cast<int>(free.size());

    Eigen::MatrixXd s11(f, f), s12(f, k), s22(k, k);
    Eigen::VectorXd mean1(f), mean2(k);
    for (int i = 0; i < f; ++i) {
        mean1[i] = joint.mean[free[static_cast<std::size_t>(i)]];
        for (int j = 0; j < f; ++j)
            s11(i, j) = joint.cov(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]);
        for (int j = 0; j < k; ++j)
            s12(i, j) = joint.cov(free[static_cast<std::size_t>(i)], observed_indices[static_cast<std::size_t>(j)]);
    }
    for (int i = 0; i < k; ++i) {
        mean2[i] = joint.mean[observed_indices[static_cast<std::size_t>(i)]];
        for (int j = 0; j < k; ++j)
            s22(i, j) = joint.cov(observed_indices[static_cast<std::size_t>(i)],
                                  observed_indices[static_cast<std::size_t>(j)]);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s22);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("condition: eigendecomposition of observed block failed");
    const double emax = es.eigenvalues().maxCoeff();
    const double emin = es.eigenvalues().minCoeff();
    const double cond_number = emin > 0.0 ? emax / emin : std::numeric_limits<double>::infinity();
    if (!(emin > 0.0) || emin <= 1e-14 * emax)
        throw std::runtime_error("condition: observed block numerically singular (condition number " +
                                 std::to_string(cond_number) + ")");

    const Eigen::MatrixXd s22_inv = es.eigenvectors() *
                                    es.eigenvalues().cwiseInverse().asDiagonal() *
                                    es.eigenvectors().transpose();
    const Eigen::MatrixXd regression = s12 * s22_inv;
    ConditionResult res;
    res.conditional.mean = mean1 + regression * (observed_values - mean2);
    Eigen::MatrixXd cc = s11 - regression * s12.transpose();
    res.conditional.cov = 0.5 * (cc + cc.transpose());  // re-symmetrize roundoff
    res.free_indices = free;
    res.observed_condition_number = cond_number;
    return res;
}

// Density of the scalar Gaussian N(mu, v) at x; v = 0 handled by callers
// through the atom-aware convolution path.
inline double gaussian_density(double mu, double v, double x) {
    if (v < 0.0) throw std::invalid_argument("gaussian_density: variance must be nonnegative");
    if (v == 0.0)
        throw std::invalid_argument("gaussian_density: v = 0 is an atom; use the convolution identity path");
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    const double z = (x - mu);
    return inv_sqrt_2pi / std::sqrt(v) * std::exp(-0.5 * z * z / v);
}

}  // namespace critlab
