#pragma once

// Dimensional constants of the band-limited random-field model and the
// omega-parameterization of the constant-mode variance.
//
// For dimension m >= 1:
//   s_m = (4 pi)^{-m/2} / Gamma(1 + m/2)
//   d_m = (4 pi)^{-m/2} / (2 Gamma(2 + m/2))
//   h_m = (4 pi)^{-m/2} / (4 Gamma(3 + m/2))
// subject to the product identities s_m = h_m (m+2)(m+4), d_m = (m+4) h_m.
//
// The omega calculus: a nonnegative constant-mode variance omega = obar L^m is
// chosen so that s_m^omega := s_m + obar = r d_m^2 / h_m = r (m+4)/(m+2) s_m.
// Nonnegativity of obar forces the constraint (C_m): r >= (m+2)/(m+4).

#include <cmath>
#include <stdexcept>
#include <string>

namespace critlab {

struct SpectralConstants {
    int m = 0;
    double s = 0.0;
    double d = 0.0;
    double h = 0.0;
};

// Evaluated in log space (lgamma) so that very large m stays finite.
inline SpectralConstants spectral_constants(int m) {
    if (m < 1) throw std::invalid_argument("spectral_constants: m must be >= 1, got " + std::to_string(m));
    const double log4pi = std::log(4.0 * std::acos(-1.0));
    const double base = -0.5 * m * log4pi;
    SpectralConstants c;
    c.m = m;
    c.s = std::exp(base - std::lgamma(1.0 + 0.5 * m));
    c.d = std::exp(base - std::lgamma(2.0 + 0.5 * m)) / 2.0;
    c.h = std::exp(base - std::lgamma(3.0 + 0.5 * m)) / 4.0;
    return c;
}

struct OmegaParams {
    int m = 0;
    double L = 0.0;
    double r = 0.0;
    double omega_bar = 0.0;  // per-unit-(L^m) variance of the constant mode
    double omega = 0.0;      // omega_bar * L^m
    double s_omega = 0.0;    // s_m + omega_bar
};

inline OmegaParams omega_params(int m, double L, double r) {
    if (m < 1) throw std::invalid_argument("omega_params: m must be >= 1");
    if (!(L > 0.0)) throw std::invalid_argument("omega_params: L must be positive");
    const double r_min = static_cast<double>(m + 2) / static_cast<double>(m + 4);
    // Accept the boundary r = (m+2)/(m+4) with a 1e-15 relative slack so a
    // rounded boundary value is not rejected.
    if (r * (m + 4) < (m + 2) * (1.0 - 1e-15)) {
        throw std::invalid_argument(
            "omega_params: constraint (C_m) violated: need r >= (m+2)/(m+4) = " + std::to_string(r_min) +
            ", got r = " + std::to_string(r));
    }
    const SpectralConstants c = spectral_constants(m);
    OmegaParams p;
    p.m = m;
    p.L = L;
    p.r = r;
    // obar = (r (m+4)/(m+2) - 1) s_m; snap the boundary to exactly zero.
    p.omega_bar = (r * (m + 4) / static_cast<double>(m + 2) - 1.0) * c.s;
    if (p.omega_bar < 0.0) p.omega_bar = 0.0;
    p.s_omega = c.s + p.omega_bar;
    p.omega = p.omega_bar * std::pow(L, m);
    return p;
}

// Leading-order prediction for the dimension of the band-limited space.
inline double weyl_dimension_estimate(int m, double L) {
    if (m < 1) throw std::invalid_argument("weyl_dimension_estimate: m must be >= 1");
    if (!(L > 0.0)) throw std::invalid_argument("weyl_dimension_estimate: L must be positive");
    return spectral_constants(m).s * std::pow(L, m);
}

}  // namespace critlab
