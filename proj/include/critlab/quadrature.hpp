#pragma once

// Quadrature building blocks: Gauss-Legendre rules, composite panels, and
// closed-form incomplete Gaussian moments.  These carry all the "exact"
// integrals in the project, so accuracy targets are machine precision for
// analytic integrands (verified by panel-refinement tests).

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace critlab {

struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
// Cached per order; thread-safe.
inline const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");

    QuadRule rule;
    rule.x.resize(static_cast<std::size_t>(n));
    rule.w.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess, then Newton on the recurrence.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.x[static_cast<std::size_t>(i)] = -x;
        rule.x[static_cast<std::size_t>(n - 1 - i)] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.w[static_cast<std::size_t>(i)] = w;
        rule.w[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

// Composite Gauss-Legendre rule on [a, b] with panels of width <= panel_w.
inline QuadRule composite_gl(double a, double b, double panel_w, int n_gl) {
    QuadRule out;
    if (!(b > a)) return out;
    const QuadRule& base = gauss_legendre(n_gl);
    const int n_panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel_w)));
    const double step = (b - a) / n_panels;
    out.x.reserve(static_cast<std::size_t>(n_panels * n_gl));
    out.w.reserve(static_cast<std::size_t>(n_panels * n_gl));
    for (int p = 0; p < n_panels; ++p) {
        const double lo = a + p * step;
        const double mid = lo + 0.5 * step;
        const double half = 0.5 * step;
        for (int i = 0; i < n_gl; ++i) {
            out.x.push_back(mid + half * base.x[static_cast<std::size_t>(i)]);
            out.w.push_back(half * base.w[static_cast<std::size_t>(i)]);
        }
    }
    return out;
}

template <typename F>
double integrate_rule(const QuadRule& rule, F&& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) acc += rule.w[i] * f(rule.x[i]);
    return acc;
}

// Incomplete Gaussian moments M_k(a, b) = int_a^b s^k e^{-s^2/2} ds for
// k = 0..kmax, written into out[0..kmax].  b may be +infinity.
// Recursion: M_k = (k-1) M_{k-2} + a^{k-1} e^{-a^2/2} - b^{k-1} e^{-b^2/2}.
inline void gaussian_moments(double a, double b, int kmax, double* out) {
    static const double sqrt_half_pi = std::sqrt(std::numbers::pi / 2.0);
    static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const bool binf = std::isinf(b);
    const double ea = std::exp(-0.5 * a * a);
    const double eb = binf ? 0.0 : std::exp(-0.5 * b * b);
    const double erfb = binf ? 1.0 : std::erf(b * inv_sqrt2);
    out[0] = sqrt_half_pi * (erfb - std::erf(a * inv_sqrt2));
    if (kmax >= 1) out[1] = ea - eb;
    double apow = 1.0;  // a^{k-1} built incrementally
    double bpow = 1.0;
    for (int k = 2; k <= kmax; ++k) {
        apow *= a;
        bpow = binf ? 0.0 : bpow * b;
        out[k] = (k - 1) * out[k - 2] + apow * ea - bpow * eb;
    }
}

}  // namespace critlab
