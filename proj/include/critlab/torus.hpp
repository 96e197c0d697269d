#pragma once

// Random band-limited fields on the flat unit-volume torus R^m / Z^m:
// spectrum enumeration, exact trigonometric jets, exact covariance lattice
// sums, critical-point extraction with Morse bookkeeping, the conditional
// counting formula for the expected critical-value density, and the
// end-to-end comparison of rescaled empirical critical values against the
// universal limit measure.
//
// Everything here is exact in the geometry: eigenfunctions are trigonometric
// monomials, covariances are lattice sums accumulated in integers, and the
// reference-point evaluation equals the manifold integral by stationarity.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "critlab/constants.hpp"
#include "critlab/gaussian.hpp"
#include "critlab/limit_law.hpp"
#include "critlab/measure.hpp"
#include "critlab/rng.hpp"

namespace critlab {

struct TorusSpectrum {
    int m = 2;
    double L = 0.0;
    bool constant_mode = true;  // the constant eigenfunction is always included
    // One representative per {k, -k} pair of nonzero lattice vectors with
    // |2 pi k| <= L; entries beyond index m are zero.
    std::vector<std::array<int, 3>> freqs;

    int dim() const { return 1 + 2 * static_cast<int>(freqs.size()); }
    double max_freq_norm() const {
        double best = 0.0;
        for (const auto& k : freqs) {
            double q = 0.0;
            for (int d = 0; d < m; ++d) q += static_cast<double>(k[static_cast<std::size_t>(d)]) *
                                               k[static_cast<std::size_t>(d)];
            best = std::max(best, q);
        }
        return std::sqrt(best);
    }
};

inline TorusSpectrum build_spectrum(int m, double L) {
    if (m != 2 && m != 3)
        throw std::invalid_argument("build_spectrum: m must be 2 or 3, got " + std::to_string(m));
    if (!(L > 0.0)) throw std::invalid_argument("build_spectrum: L must be positive");
    TorusSpectrum spec;
    spec.m = m;
    spec.L = L;
    const double radius = L / (2.0 * std::numbers::pi);
    const double r_sq = radius * radius;
    const int reach = static_cast<int>(std::floor(radius));
    const int lo2 = -reach, lo3 = (m == 3) ? -reach : 0;
    const int hi3 = (m == 3) ? reach : 0;
    for (int k1 = 0; k1 <= reach; ++k1) {
        for (int k2 = (k1 == 0 ? 0 : lo2); k2 <= reach; ++k2) {
            for (int k3 = ((k1 == 0 && k2 == 0) ? 1 : lo3); k3 <= hi3 || (m == 2 && k3 == 0); ++k3) {
                if (m == 2 && k3 != 0) break;
                if (k1 == 0 && k2 == 0 && (m == 2 || k3 == 0)) continue;
                const double norm_sq = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                                       static_cast<double>(k3) * k3;
                if (norm_sq > r_sq) continue;
                spec.freqs.push_back({k1, k2, k3});
                if (spec.dim() > 5000)
                    throw std::invalid_argument("build_spectrum: dimension cap 5000 exceeded");
            }
        }
    }
    return spec;
}

namespace detail {

// Integer lattice moments over the stored half-lattice.  All symmetry-forced
// cancellations happen in exact integer arithmetic, so zero sums are exact.
struct LatticeMoments {
    long long s2[3][3] = {};           // sum k_i k_j
    long long s4[3][3][3][3] = {};     // sum k_i k_j k_k k_l
};

inline LatticeMoments lattice_moments(const TorusSpectrum& spec) {
    LatticeMoments mom;
    for (const auto& k : spec.freqs) {
        for (int i = 0; i < spec.m; ++i)
            for (int j = 0; j < spec.m; ++j) {
                const long long kij = static_cast<long long>(k[static_cast<std::size_t>(i)]) *
                                      k[static_cast<std::size_t>(j)];
                mom.s2[i][j] += kij;
                for (int a = 0; a < spec.m; ++a)
                    for (int b = 0; b < spec.m; ++b)
                        mom.s4[i][j][a][b] += kij * k[static_cast<std::size_t>(a)] *
                                              k[static_cast<std::size_t>(b)];
            }
    }
    return mom;
}

inline std::vector<std::pair<int, int>> hessian_index_pairs(int m) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) pairs.emplace_back(i, j);
    return pairs;
}

}  // namespace detail

struct TorusField {
    const TorusSpectrum* spectrum = nullptr;  // must outlive the field
    double omega = 0.0;
    double coeff_const = 0.0;  // standard-normal coefficient of the constant mode
    double shift = 0.0;        // independent N(0, omega) sample on the constant mode
    std::vector<double> coeff_cos, coeff_sin;
};

inline TorusField sample_field(const TorusSpectrum& spec, double omega, std::uint64_t seed) {
    if (omega < 0.0) throw std::invalid_argument("sample_field: omega must be nonnegative");
    TorusField f;
    f.spectrum = &spec;
    f.omega = omega;
    GaussianStream g(seed);
    f.coeff_const = g.normal();
    const std::size_t n = spec.freqs.size();
    f.coeff_cos.resize(n);
    f.coeff_sin.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        f.coeff_cos[i] = g.normal();
        f.coeff_sin[i] = g.normal();
    }
    f.shift = omega > 0.0 ? std::sqrt(omega) * g.normal() : 0.0;
    return f;
}

struct Jet {
    double value = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

// Exact trigonometric evaluation of (u, du, Hess u) at p (coordinates taken
// modulo 1 implicitly by periodicity of the basis).
inline Jet eval(const TorusField& f, const Eigen::VectorXd& p) {
    const TorusSpectrum& spec = *f.spectrum;
    const int m = spec.m;
    if (static_cast<int>(p.size()) != m) throw std::invalid_argument("eval: point dimension mismatch");
    static const double two_pi = 2.0 * std::numbers::pi;
    static const double sqrt2 = std::numbers::sqrt2;
    Jet jet;
    jet.value = f.coeff_const + f.shift;
    jet.grad = Eigen::VectorXd::Zero(m);
    jet.hess = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t idx = 0; idx < spec.freqs.size(); ++idx) {
        const auto& k = spec.freqs[idx];
        double theta = 0.0;
        for (int d = 0; d < m; ++d) theta += k[static_cast<std::size_t>(d)] * p[d];
        theta *= two_pi;
        const double ct = std::cos(theta), st = std::sin(theta);
        const double even = sqrt2 * (f.coeff_cos[idx] * ct + f.coeff_sin[idx] * st);
        const double odd = sqrt2 * (-f.coeff_cos[idx] * st + f.coeff_sin[idx] * ct);
        jet.value += even;
        for (int i = 0; i < m; ++i) {
            const double ki = two_pi * k[static_cast<std::size_t>(i)];
            jet.grad[i] += ki * odd;
            for (int j = i; j < m; ++j)
                jet.hess(i, j) -= ki * two_pi * k[static_cast<std::size_t>(j)] * even;
        }
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j) jet.hess(i, j) = jet.hess(j, i);
    return jet;
}

struct CovarianceEntry {
    std::string name;
    double exact = 0.0;    // lattice-sum value
    double leading = 0.0;  // asymptotic leading term
    double ratio = 0.0;    // exact / leading (0 when leading = 0)
};

struct CovarianceReport {
    int m = 0;
    double L = 0.0;
    int dim = 0;
    std::vector<CovarianceEntry> leading_entries;  // ratio -> 1 as L grows
    std::vector<CovarianceEntry> zero_entries;     // symmetry-forced exact zeros
};

// Exact covariances of (u, du, Hess u) at a point (any point: the field is
// stationary) against their leading-order spectral predictions.
inline CovarianceReport covariance_report(const TorusSpectrum& spec) {
    const detail::LatticeMoments mom = detail::lattice_moments(spec);
    const SpectralConstants sc = spectral_constants(spec.m);
    const double two_pi_sq = std::pow(2.0 * std::numbers::pi, 2);
    const double two_pi_4 = two_pi_sq * two_pi_sq;
    const double lm = std::pow(spec.L, spec.m);
    const double lm2 = lm * spec.L * spec.L;
    const double lm4 = lm2 * spec.L * spec.L;

    CovarianceReport rep;
    rep.m = spec.m;
    rep.L = spec.L;
    rep.dim = spec.dim();

    auto add = [](std::vector<CovarianceEntry>& list, const std::string& name, double exact,
                  double leading) {
        CovarianceEntry e;
        e.name = name;
        e.exact = exact;
        e.leading = leading;
        e.ratio = leading != 0.0 ? exact / leading : 0.0;
        list.push_back(e);
    };

    add(rep.leading_entries, "var(u)", static_cast<double>(spec.dim()), sc.s * lm);
    add(rep.leading_entries, "var(du_1)", 2.0 * two_pi_sq * mom.s2[0][0], sc.d * lm2);
    add(rep.leading_entries, "cov(u, d2u_11)", -2.0 * two_pi_sq * mom.s2[0][0], -sc.d * lm2);
    add(rep.leading_entries, "var(d2u_11)", 2.0 * two_pi_4 * mom.s4[0][0][0][0], 3.0 * sc.h * lm4);
    add(rep.leading_entries, "cov(d2u_11, d2u_22)", 2.0 * two_pi_4 * mom.s4[0][0][1][1], sc.h * lm4);
    add(rep.leading_entries, "var(d2u_12)", 2.0 * two_pi_4 * mom.s4[0][1][0][1], sc.h * lm4);

    add(rep.zero_entries, "cov(u, du_1)", 0.0, 0.0);  // vanishes mode by mode
    add(rep.zero_entries, "cov(du_1, d2u_11)", 0.0, 0.0);
    add(rep.zero_entries, "cov(du_1, du_2)", 2.0 * two_pi_sq * mom.s2[0][1], 0.0);
    add(rep.zero_entries, "cov(u, d2u_12)", -2.0 * two_pi_sq * mom.s2[0][1], 0.0);
    add(rep.zero_entries, "cov(d2u_11, d2u_12)", 2.0 * two_pi_4 * mom.s4[0][0][0][1], 0.0);
    return rep;
}

struct CriticalPointRecord {
    Eigen::VectorXd location;  // in [0,1)^m
    double value = 0.0;
    int morse_index = 0;
    double hessian_det = 0.0;
    double grad_norm = 0.0;
};

struct CriticalSearchResult {
    std::vector<CriticalPointRecord> records;
    bool morse = true;     // false when a near-degenerate Hessian was met
    bool euler_ok = true;  // alternating index sum vanishes (torus Euler characteristic)
    int grid_n_used = 0;
    int n_seeds_dropped = 0;    // Newton did not converge from these seeds
    int n_degenerate_hits = 0;  // converged to a near-degenerate Hessian
};

namespace detail {

inline double periodic_dist_sq(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double q = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        double d = std::abs(a[i] - b[i]);
        d = std::min(d, 1.0 - d);
        q += d * d;
    }
    return q;
}

inline void wrap_unit(Eigen::VectorXd& p) {
    for (int i = 0; i < p.size(); ++i) p[i] -= std::floor(p[i]);
}

// Newton search from a regular seed grid.  Field scales for the tolerances
// come from the exact lattice sums.
inline CriticalSearchResult critical_search_pass(const TorusField& f, int grid_n) {
    const TorusSpectrum& spec = *f.spectrum;
    const int m = spec.m;
    const LatticeMoments mom = lattice_moments(spec);
    const double two_pi_sq = std::pow(2.0 * std::numbers::pi, 2);
    double hess_scale = 0.0;
    for (int i = 0; i < m; ++i)
        hess_scale += 2.0 * two_pi_sq * two_pi_sq * mom.s4[i][i][i][i];
    hess_scale = std::sqrt(hess_scale / m);
    // Absolute target well under the 1e-10 acceptance bound; the Newton
    // roundoff floor stays below it at every simulated band width.
    const double grad_tol = 1e-11;
    const double det_tol = 1e-8 * std::pow(std::max(1.0, hess_scale), m);
    const double max_step = 0.35 / std::max(1.0, spec.max_freq_norm());

    CriticalSearchResult result;
    result.grid_n_used = grid_n;
    const double cell = 1.0 / grid_n;
    Eigen::VectorXd seed(m);
    const long n_seeds = static_cast<long>(std::pow(static_cast<double>(grid_n), m));
    for (long s = 0; s < n_seeds; ++s) {
        long rem = s;
        for (int d = 0; d < m; ++d) {
            seed[d] = cell * static_cast<double>(rem % grid_n);
            rem /= grid_n;
        }
        Eigen::VectorXd x = seed;
        bool converged = false;
        Jet jet;
        for (int iter = 0; iter < 60; ++iter) {
            jet = eval(f, x);
            if (jet.grad.norm() <= grad_tol) {
                converged = true;
                break;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(jet.hess);
            if (!lu.isInvertible()) break;
            Eigen::VectorXd step = lu.solve(jet.grad);
            const double norm = step.norm();
            if (norm > max_step) step *= max_step / norm;
            x -= step;
            wrap_unit(x);
        }
        if (!converged) {
            ++result.n_seeds_dropped;
            continue;
        }
        if (std::abs(jet.hess.determinant()) < det_tol) {
            result.morse = false;
            ++result.n_degenerate_hits;
            continue;
        }
        bool duplicate = false;
        for (const auto& rec : result.records)
            if (periodic_dist_sq(rec.location, x) < 1e-12) {
                duplicate = true;
                break;
            }
        if (duplicate) continue;
        CriticalPointRecord rec;
        rec.location = x;
        rec.value = jet.value;
        rec.grad_norm = jet.grad.norm();
        rec.hessian_det = jet.hess.determinant();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jet.hess, Eigen::EigenvaluesOnly);
        rec.morse_index = 0;
        for (int i = 0; i < m; ++i)
            if (es.eigenvalues()[i] < 0.0) ++rec.morse_index;
        result.records.push_back(std::move(rec));
    }
    int alt = 0;
    for (const auto& rec : result.records) alt += (rec.morse_index % 2 == 0) ? 1 : -1;
    result.euler_ok = (alt == 0) && !result.records.empty();
    return result;
}

}  // namespace detail

inline int default_grid_n(const TorusSpectrum& spec) {
    return std::max(8, static_cast<int>(std::ceil(4.0 * spec.max_freq_norm())));
}

// Critical points of the field by Newton refinement from a regular seed grid
// (grid_n per axis; at least four seeds per maximal frequency), deduplicated
// in the periodic metric.  When the alternating index sum fails to vanish the
// search is retried on a doubled grid before giving up.
inline CriticalSearchResult find_critical_points(const TorusField& f, int grid_n = 0) {
    const int base = grid_n > 0 ? grid_n : default_grid_n(*f.spectrum);
    CriticalSearchResult result = detail::critical_search_pass(f, base);
    for (int retry = 0; retry < 2 && result.morse && !result.euler_ok; ++retry)
        result = detail::critical_search_pass(f, base * (2 << retry));
    return result;
}

struct ValueRecord {
    double value = 0.0;
    int morse_index = 0;
    int field_id = 0;
};

struct ComplexityResult {
    EmpiricalMeasure values;  // pooled critical values of accepted fields, unit weights
    double mean_count = 0.0;
    double std_error = 0.0;
    int n_fields_requested = 0;
    int n_fields_used = 0;
    int n_rejected_degenerate = 0;
    int n_rejected_search = 0;
    std::vector<ValueRecord> records;        // per accepted critical point
    std::vector<int> per_field_counts;       // accepted fields only, in field order
};

// Samples n_fields independent fields, extracts critical points of the Morse
// ones, and pools the critical values.  The mean count estimates the expected
// number of critical points.
inline ComplexityResult empirical_complexity(const TorusSpectrum& spec, double omega, int n_fields,
                                             std::uint64_t seed, int grid_n = 0) {
    if (n_fields < 1) throw std::invalid_argument("empirical_complexity: n_fields must be >= 1");
    struct FieldOutcome {
        int status = 0;  // 0 = ok, 1 = degenerate, 2 = search failure
        std::vector<ValueRecord> records;
    };
    std::vector<FieldOutcome> outcomes = parallel_chunks<FieldOutcome>(n_fields, [&](int fid) {
        const TorusField f = sample_field(spec, omega, derive_seed(seed, static_cast<std::uint64_t>(fid)));
        const CriticalSearchResult search = find_critical_points(f, grid_n);
        FieldOutcome out;
        if (!search.morse) {
            out.status = 1;
            return out;
        }
        if (!search.euler_ok) {
            out.status = 2;
            return out;
        }
        out.records.reserve(search.records.size());
        for (const auto& rec : search.records)
            out.records.push_back({rec.value, rec.morse_index, fid});
        return out;
    });

    ComplexityResult res;
    res.n_fields_requested = n_fields;
    std::vector<double> pooled;
    double count_sum = 0.0, count_sq = 0.0;
    for (const auto& out : outcomes) {
        if (out.status == 1) {
            ++res.n_rejected_degenerate;
            continue;
        }
        if (out.status == 2) {
            ++res.n_rejected_search;
            continue;
        }
        ++res.n_fields_used;
        const double c = static_cast<double>(out.records.size());
        count_sum += c;
        count_sq += c * c;
        res.per_field_counts.push_back(static_cast<int>(out.records.size()));
        for (const auto& rec : out.records) {
            pooled.push_back(rec.value);
            res.records.push_back(rec);
        }
    }
    if (res.n_fields_used == 0)
        throw std::runtime_error("empirical_complexity: every field was rejected");
    res.values = EmpiricalMeasure::from_values(std::move(pooled));
    res.mean_count = count_sum / res.n_fields_used;
    const double var = std::max(0.0, count_sq / res.n_fields_used - res.mean_count * res.mean_count);
    res.std_error = std::sqrt(var / res.n_fields_used);
    return res;
}

// Joint Gaussian of (u, du, upper-triangle Hess u) at a point, from the exact
// lattice sums; ordering: u, du_1..du_m, H_11, H_12, (H_13,) H_22, ...
inline GaussianVector torus_jet_gaussian(const TorusSpectrum& spec, double omega) {
    const detail::LatticeMoments mom = detail::lattice_moments(spec);
    const int m = spec.m;
    const auto pairs = detail::hessian_index_pairs(m);
    const int nh = static_cast<int>(pairs.size());
    const int dim = 1 + m + nh;
    const double two_pi_sq = std::pow(2.0 * std::numbers::pi, 2);
    const double two_pi_4 = two_pi_sq * two_pi_sq;

    GaussianVector gv;
    gv.mean = Eigen::VectorXd::Zero(dim);
    gv.cov = Eigen::MatrixXd::Zero(dim, dim);
    gv.cov(0, 0) = static_cast<double>(spec.dim()) + omega;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            gv.cov(1 + i, 1 + j) = 2.0 * two_pi_sq * mom.s2[i][j];
    for (int a = 0; a < nh; ++a) {
        const auto [i, j] = pairs[static_cast<std::size_t>(a)];
        gv.cov(0, 1 + m + a) = gv.cov(1 + m + a, 0) = -2.0 * two_pi_sq * mom.s2[i][j];
        for (int b = 0; b < nh; ++b) {
            const auto [k, l] = pairs[static_cast<std::size_t>(b)];
            gv.cov(1 + m + a, 1 + m + b) = 2.0 * two_pi_4 * mom.s4[i][j][k][l];
        }
    }
    // cov(du, u) and cov(du, Hess) vanish mode by mode; the zero initialization
    // already encodes them exactly.
    return gv;
}

struct KacRiceResult {
    Measure1D density;              // expected critical-value density; mass estimates the count
    double total = 0.0;             // expected number of critical points
    double total_std_error = 0.0;
    double observed_condition_number = 0.0;
};

// Conditional Monte Carlo evaluation of the counting formula at the reference
// point: condition the jet on du = 0, average |det Hess| (optionally binned by
// the field value), and multiply by the Gaussian density of du at 0.  By
// stationarity the manifold integral is this point value times unit volume.
inline KacRiceResult kac_rice(const TorusSpectrum& spec, double omega, const GridSpec& value_grid,
                              long n_cond_samples, std::uint64_t seed) {
    if (n_cond_samples < 2) throw std::invalid_argument("kac_rice: n_cond_samples must be >= 2");
    const int m = spec.m;
    const auto pairs = detail::hessian_index_pairs(m);
    const int nh = static_cast<int>(pairs.size());

    const GaussianVector joint = torus_jet_gaussian(spec, omega);
    std::vector<int> observed(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) observed[static_cast<std::size_t>(i)] = 1 + i;
    const ConditionResult cond = condition(joint, observed, Eigen::VectorXd::Zero(m));

    // Gaussian density of du at 0: (2 pi)^{-m/2} det(S_du)^{-1/2}.
    const Eigen::MatrixXd s_du = joint.cov.block(1, 1, m, m);
    const double prefactor = std::pow(2.0 * std::numbers::pi, -0.5 * m) /
                             std::sqrt(s_du.determinant());

    const Eigen::MatrixXd root = covariance_sqrt(cond.conditional.cov);
    const int cdim = 1 + nh;
    const int nb = value_grid.n;
    const double dx = (value_grid.hi - value_grid.lo) / (nb - 1);

    struct Acc {
        std::vector<double> weight;
        double sum = 0.0;
        double sum_sq = 0.0;
    };
    const int n_chunks = 64;
    std::vector<Acc> parts = parallel_chunks<Acc>(n_chunks, [&](int chunk) {
        Acc acc;
        acc.weight.assign(static_cast<std::size_t>(nb), 0.0);
        GaussianStream g(derive_seed(seed, static_cast<std::uint64_t>(chunk)));
        const long lo = n_cond_samples * chunk / n_chunks;
        const long hi = n_cond_samples * (chunk + 1) / n_chunks;
        Eigen::VectorXd z(cdim), y(cdim);
        Eigen::MatrixXd hess(m, m);
        for (long s = lo; s < hi; ++s) {
            for (int i = 0; i < cdim; ++i) z[i] = g.normal();
            y = root * z;
            for (int a = 0; a < nh; ++a) {
                const auto [i, j] = pairs[static_cast<std::size_t>(a)];
                hess(i, j) = y[1 + a];
                hess(j, i) = y[1 + a];
            }
            const double w = std::abs(hess.determinant());
            acc.sum += w;
            acc.sum_sq += w * w;
            const int b = static_cast<int>(std::floor((y[0] - value_grid.lo) / dx + 0.5));
            if (b >= 0 && b < nb) acc.weight[static_cast<std::size_t>(b)] += w;
        }
        return acc;
    });

    double sum = 0.0, sum_sq = 0.0;
    std::vector<double> weight(static_cast<std::size_t>(nb), 0.0);
    for (const auto& p : parts) {
        sum += p.sum;
        sum_sq += p.sum_sq;
        for (int b = 0; b < nb; ++b) weight[static_cast<std::size_t>(b)] += p.weight[static_cast<std::size_t>(b)];
    }
    const double mean_w = sum / n_cond_samples;
    const double var_w = std::max(0.0, sum_sq / n_cond_samples - mean_w * mean_w);

    KacRiceResult res;
    res.total = prefactor * mean_w;
    res.total_std_error = prefactor * std::sqrt(var_w / n_cond_samples);
    res.observed_condition_number = cond.observed_condition_number;
    std::vector<double> density(static_cast<std::size_t>(nb));
    for (int b = 0; b < nb; ++b)
        density[static_cast<std::size_t>(b)] =
            prefactor * weight[static_cast<std::size_t>(b)] / (static_cast<double>(n_cond_samples) * dx);
    res.density = make_measure(value_grid.lo, value_grid.hi, std::move(density));
    return res;
}

inline GridSpec default_value_grid(const TorusSpectrum& spec, double omega, int n = 201) {
    const double sd = std::sqrt(static_cast<double>(spec.dim()) + omega);
    return {-5.0 * sd, 5.0 * sd, n};
}

inline Measure1D kac_rice_density(const TorusSpectrum& spec, double omega, const GridSpec& value_grid,
                                  long n_cond_samples, std::uint64_t seed) {
    return kac_rice(spec, omega, value_grid, n_cond_samples, seed).density;
}

inline DetEstimate kac_rice_total(const TorusSpectrum& spec, double omega, long n_cond_samples,
                                  std::uint64_t seed) {
    const KacRiceResult res = kac_rice(spec, omega, default_value_grid(spec, omega), n_cond_samples, seed);
    return {res.total, res.total_std_error};
}

struct UniversalityReport {
    double ks = 0.0;                 // rescaled empirical values vs the limit measure
    double rescale_factor = 0.0;     // 1 / sqrt(s_omega L^m)
    double noise_floor = 0.0;        // ~ 1/sqrt(pooled count)
    ComplexityResult complexity;
    OmegaParams omega_used;
    Measure1D sigma_reference;
};

// End-to-end check of the universal limit: sample fields at the
// melting-parameter variance omega(m, L, r), rescale the pooled critical
// values by sqrt(s_omega L^m), and measure the KS distance to sigma_{m,r}.
inline UniversalityReport universality_check(int m, double L, double r, int n_fields,
                                             std::uint64_t seed, const GridSpec& sigma_grid = {}) {
    if (m != 2) throw std::invalid_argument("universality_check: m must be 2 (search cost grows as grid^m)");
    const TorusSpectrum spec = build_spectrum(m, L);
    const OmegaParams op = omega_params(m, L, r);
    UniversalityReport rep;
    rep.omega_used = op;
    rep.complexity = empirical_complexity(spec, op.omega, n_fields, seed);
    rep.rescale_factor = 1.0 / std::sqrt(op.s_omega * std::pow(L, m));
    EmpiricalMeasure rescaled = rep.complexity.values;
    for (auto& atom : rescaled.atoms) atom.location *= rep.rescale_factor;
    rep.sigma_reference = sigma_mr(m, r, sigma_grid);
    rep.ks = ks_distance(rescaled.normalized(), rep.sigma_reference);
    rep.noise_floor = 1.0 / std::sqrt(rescaled.mass);
    return rep;
}

}  // namespace critlab
