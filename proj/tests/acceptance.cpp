// Acceptance suite: end-to-end checks of the numerical claims this library is
// built around.  Each criterion prints exactly one [PASS]/[FAIL] line with a
// compact metric trail; the exit code is the number of failed criteria.
//
// argv[1] is the path to the command-line binary; it is only needed by the
// byte-identical-rerun criterion (the last one).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "critlab/constants.hpp"
#include "critlab/gaussian.hpp"
#include "critlab/limit_law.hpp"
#include "critlab/measure.hpp"
#include "critlab/quadrature.hpp"
#include "critlab/random_matrix.hpp"
#include "critlab/rng.hpp"
#include "critlab/torus.hpp"

using namespace critlab;

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* spec, double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, x);
    return buf;
}

int g_failures = 0;

// Runs one criterion, times it, enforces an optional wall-clock budget
// (budget_s <= 0 means unconstrained), and prints the single result line.
void criterion(int id, const std::string& what, double budget_s,
               const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && budget_s > 0.0 && secs > budget_s) {
        ok = false;
        detail += " | exceeded " + fmt("%.0f", budget_s) + " s budget";
    }
    if (!ok) ++g_failures;
    std::printf("[%s] %02d %s | %s | %s s\n", ok ? "PASS" : "FAIL", id, what.c_str(),
                detail.c_str(), fmt("%.2f", secs).c_str());
    std::fflush(stdout);
}

// ---------------------------------------------------------------- criteria

bool c01_constant_identities(std::string& detail) {
    double worst = 0.0;
    for (int m = 1; m <= 50; ++m) {
        const SpectralConstants c = spectral_constants(m);
        worst = std::max(worst, std::abs(c.s - c.h * (m + 2.0) * (m + 4.0)) / c.s);
        worst = std::max(worst, std::abs(c.d - c.h * (m + 4.0)) / c.d);
    }
    detail = "worst_rel=" + fmt("%.2e", worst);
    return worst <= 1e-12;
}

bool c02_normalization_quadrature(std::string& detail) {
    const struct {
        int m;
        double panel;
        int gl;
        double tol;
    } cases[] = {{1, 0.5, 16, 1e-8}, {2, 0.5, 16, 1e-8}, {3, 1.0, 12, 1e-4}};
    bool ok = true;
    std::string rels;
    for (const auto& cs : cases) {
        const double z = selberg_Z(cs.m);
        const double rel = std::abs(selberg_weyl_quadrature(cs.m, cs.panel, cs.gl) - z) / z;
        ok = ok && rel <= cs.tol;
        rels += (rels.empty() ? "rel=" : ",") + fmt("%.1e", rel);
    }
    detail = rels;
    return ok;
}

bool c03_mean_abs_det_mc(std::string& detail) {
    bool ok = true;
    double worst_z = 0.0;
    std::uint64_t idx = 0;
    for (int m : {1, 2, 3}) {
        for (double v : {0.5, 1.0}) {
            for (double c : {0.0, 0.7, -1.3}) {
                const double exact = expected_abs_det_goe(m, v, c);
                const DetEstimate mc =
                    expected_abs_det_mc({m, 0.0, v}, c, 200000, derive_seed(0xA3, idx++));
                const double z = std::abs(mc.value - exact) / mc.std_error;
                worst_z = std::max(worst_z, z);
                ok = ok && z <= 3.0;
            }
        }
    }
    const double anchor = std::abs(expected_abs_det_goe(1, 0.5, 0.0) - std::sqrt(2.0 / kPi));
    ok = ok && anchor <= 1e-3;
    detail = "worst_z=" + fmt("%.2f", worst_z) + " anchor_err=" + fmt("%.1e", anchor);
    return ok;
}

bool c04_shifted_det_forms(std::string& detail) {
    bool ok = true;
    double worst_gap = 0.0, worst_z = 0.0;
    std::uint64_t idx = 0;
    for (int m : {1, 2, 3}) {
        for (double k : {0.25, 0.5}) {
            const double u = 2.0 * k;  // v = 1
            for (double c : {0.0, 0.7}) {
                const ShiftedDetForms forms = expected_abs_det_shifted_forms(m, u, 1.0, c);
                if (!forms.forms_compared) {
                    ok = false;
                    continue;
                }
                worst_gap = std::max(worst_gap, forms.rel_gap);
                ok = ok && forms.rel_gap <= 1e-8;
            }
            const DetEstimate mc =
                expected_abs_det_mc({m, u, 1.0}, 0.7, 200000, derive_seed(0xA4, idx++));
            const double z =
                std::abs(mc.value - expected_abs_det_shifted(m, u, 1.0, 0.7)) / mc.std_error;
            worst_z = std::max(worst_z, z);
            ok = ok && z <= 3.0;
        }
    }
    detail = "worst_form_gap=" + fmt("%.1e", worst_gap) + " worst_z=" + fmt("%.2f", worst_z);
    return ok;
}

bool c05_conditioning_vs_rejection(std::string& detail) {
    bool ok = true;
    double worst_z = 0.0;
    long min_acc = std::numeric_limits<long>::max();
    for (int dim : {4, 6}) {
        GaussianStream g(derive_seed(0xC5, static_cast<std::uint64_t>(dim)));
        Eigen::MatrixXd b(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) b(i, j) = g.normal();
        GaussianVector gv;
        gv.cov = b * b.transpose() + 0.5 * Eigen::MatrixXd::Identity(dim, dim);
        gv.mean = Eigen::VectorXd(dim);
        for (int i = 0; i < dim; ++i) gv.mean[i] = 0.3 * g.normal();

        const std::vector<int> obs_idx = {1, dim - 1};
        const double sd1 = std::sqrt(gv.cov(1, 1));
        const double sd2 = std::sqrt(gv.cov(dim - 1, dim - 1));
        Eigen::VectorXd y(2);
        y << gv.mean[1] + 0.4 * sd1, gv.mean[dim - 1] - 0.3 * sd2;
        const ConditionResult cr = condition(gv, obs_idx, y);
        const int nf = static_cast<int>(cr.free_indices.size());

        // slice rejection: accept joint draws whose observed coordinates fall
        // in a thin slab around y; the slab bias is O(eps^2), far below 4 SE
        const double e1 = 0.05 * sd1, e2 = 0.05 * sd2;
        const Eigen::MatrixXd root = covariance_sqrt(gv.cov);
        GaussianStream gs(derive_seed(0x5C5, static_cast<std::uint64_t>(dim)));
        const long n_prop = 3000000;
        long n_acc = 0;
        Eigen::VectorXd z(dim), x(dim);
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(nf);
        Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(nf, nf);
        Eigen::VectorXd xf(nf);
        for (long s = 0; s < n_prop; ++s) {
            for (int i = 0; i < dim; ++i) z[i] = gs.normal();
            x.noalias() = root * z;
            x += gv.mean;
            if (std::abs(x[1] - y[0]) > e1 || std::abs(x[dim - 1] - y[1]) > e2) continue;
            ++n_acc;
            for (int i = 0; i < nf; ++i) xf[i] = x[cr.free_indices[static_cast<std::size_t>(i)]];
            sum += xf;
            outer += xf * xf.transpose();
        }
        min_acc = std::min(min_acc, n_acc);
        if (n_acc < 500) {
            ok = false;
            continue;
        }
        const Eigen::VectorXd mean_acc = sum / static_cast<double>(n_acc);
        const Eigen::MatrixXd cov_acc =
            outer / static_cast<double>(n_acc) - mean_acc * mean_acc.transpose();
        for (int i = 0; i < nf; ++i) {
            const double se = std::sqrt(cov_acc(i, i) / n_acc);
            const double zscore = std::abs(mean_acc[i] - cr.conditional.mean[i]) / se;
            worst_z = std::max(worst_z, zscore);
            ok = ok && zscore <= 4.0;
            for (int j = i; j < nf; ++j) {
                const double se_c = std::sqrt(
                    (cov_acc(i, i) * cov_acc(j, j) + cov_acc(i, j) * cov_acc(i, j)) / n_acc);
                const double zc = std::abs(cov_acc(i, j) - cr.conditional.cov(i, j)) / se_c;
                worst_z = std::max(worst_z, zc);
                ok = ok && zc <= 4.0;
            }
        }
    }
    detail = "worst_z=" + fmt("%.2f", worst_z) + " min_accepted=" + std::to_string(min_acc);
    return ok;
}

bool c06_density_rescaling(std::string& detail) {
    const double c = 1.7;
    double worst = 0.0;
    for (int n : {2, 3, 4}) {
        for (int i = 0; i < 100; ++i) {
            const double yv = -4.0 + 8.0 * i / 99.0;
            worst = std::max(
                worst, std::abs(c * rho_point_exact(n, c * c, c * yv) - rho_point_exact(n, 1.0, yv)));
        }
    }
    detail = "worst_abs=" + fmt("%.1e", worst);
    return worst <= 1e-10;
}

bool c07_exponent_identity(std::string& detail) {
    GaussianStream g(derive_seed(0xC7, 1));
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double r = 1.0 + 7.0 * g.uniform01();
        const double lam = 10.0 * (g.uniform01() - 0.5);
        const double yv = 10.0 * (g.uniform01() - 0.5);
        worst = std::max(worst, case1_identity_check(r, lam, yv));
    }
    detail = "worst_residual=" + fmt("%.1e", worst);
    return worst <= 1e-12;
}

bool c08_two_constructions(std::string& detail) {
    const GridSpec grid{-8.0, 8.0, 1024};
    bool ok = true;
    std::string s = "ks=";
    for (int m : {1, 2, 3}) {
        const double ks = ks_distance(sigma_mr(m, 1.0, grid), sigma_mr_via_mu(m, 1.0, grid));
        ok = ok && ks <= 1e-4;
        s += fmt("%.1e", ks) + ",";
    }
    const CorrelationFunction rho3 =
        rho_mc(3, 1.0, default_rho_grid(3, 1.0), 200000, derive_seed(0xC8, 2));
    const double ks_r2 =
        ks_distance(sigma_mr(2, 2.0, grid, rho3), sigma_mr_via_mu(2, 2.0, grid));
    ok = ok && ks_r2 <= 0.01;
    detail = s + "r2:" + fmt("%.1e", ks_r2);
    return ok;
}

bool c09_gaussian_limit(std::string& detail) {
    const std::vector<int> ms = {8, 16, 32, 64};
    const auto rep = gaussian_limit_report(ms, {-8.0, 8.0, 1024}, 100000, derive_seed(0xC9, 1));
    bool ok = rep.size() == ms.size();
    std::string s = "ks=";
    for (std::size_t i = 0; i < rep.size(); ++i) {
        s += fmt("%.4f", rep[i].ks) + (i + 1 < rep.size() ? "," : "");
        if (i > 0) ok = ok && rep[i].ks < rep[i - 1].ks;
    }
    ok = ok && rep.back().ks <= 0.05;
    detail = s;
    return ok;
}

bool c10_semicircle_approach(std::string& detail) {
    const RbarComparison a = rbar_comparison(16, 1.5, 100000, derive_seed(0xCA, 16));
    const RbarComparison b = rbar_comparison(64, 1.5, 100000, derive_seed(0xCA, 64));
    detail = "sup_inside=" + fmt("%.4f", a.sup_inside) + "->" + fmt("%.4f", b.sup_inside) +
             " max_outside=" + fmt("%.3f", std::max(a.max_outside, b.max_outside));
    return b.sup_inside < a.sup_inside && a.max_outside <= 0.1 && b.max_outside <= 0.1;
}

bool c11_covariance_ratios(std::string& detail) {
    bool mono = true, zeros = true;
    double prev = std::numeric_limits<double>::infinity();
    double worst_last = 0.0;
    std::string s = "worst=";
    for (double L : {20.0, 40.0, 80.0}) {
        const CovarianceReport rep = covariance_report(build_spectrum(2, L));
        double worst = 0.0;
        for (const auto& e : rep.leading_entries) worst = std::max(worst, std::abs(e.ratio - 1.0));
        for (const auto& e : rep.zero_entries) zeros = zeros && e.exact == 0.0;
        mono = mono && worst < prev;
        prev = worst;
        worst_last = worst;
        s += fmt("%.4f", worst) + (L < 80.0 ? "," : "");
    }
    detail = s + (zeros ? " zeros_exact" : " zeros_violated");
    return mono && zeros && worst_last <= 0.05;
}

bool c12_count_formula_vs_enumeration(std::string& detail) {
    const TorusSpectrum spec = build_spectrum(2, 20.0);
    const OmegaParams op = omega_params(2, 20.0, 1.0);
    const ComplexityResult emp = empirical_complexity(spec, op.omega, 200, derive_seed(0xCC, 1));
    const DetEstimate kr = kac_rice_total(spec, op.omega, 200000, derive_seed(0xCC, 2));
    const double comb =
        std::sqrt(emp.std_error * emp.std_error + kr.std_error * kr.std_error);
    const double z = std::abs(emp.mean_count - kr.value) / comb;

    std::map<int, int> alt;
    for (const auto& rec : emp.records) alt[rec.field_id] += rec.morse_index % 2 == 0 ? 1 : -1;
    bool euler_ok = alt.size() == static_cast<std::size_t>(emp.n_fields_used);
    for (const auto& [fid, a] : alt) euler_ok = euler_ok && a == 0;

    detail = "mean=" + fmt("%.3f", emp.mean_count) + " formula=" + fmt("%.3f", kr.value) +
             " z=" + fmt("%.2f", z) + " fields=" + std::to_string(emp.n_fields_used) +
             (euler_ok ? " euler_ok" : " euler_violated");
    return z <= 3.0 && euler_ok && emp.n_fields_used > 0;
}

bool c13_universal_limit_on_torus(std::string& detail) {
    const UniversalityReport a = universality_check(2, 15.0, 1.0, 300, derive_seed(0xCD, 15));
    const UniversalityReport b = universality_check(2, 30.0, 1.0, 300, derive_seed(0xCD, 30));
    detail = "ks=" + fmt("%.4f", a.ks) + "->" + fmt("%.4f", b.ks) +
             " floor=" + fmt("%.4f", b.noise_floor);
    return b.ks <= 0.08 && b.ks < a.ks;
}

bool c14_growth_fit(std::string& detail) {
    const std::vector<int> ms = {4, 8, 16, 32};
    std::vector<double> logs;
    logs.reserve(ms.size());
    for (int m : ms) {
        const DetEstimate est =
            limit_total_mass_mc(m, 20000, derive_seed(0xCE, static_cast<std::uint64_t>(m)));
        logs.push_back(std::log(est.value));
    }
    const GrowthFit fit = fit_log_growth(ms, logs);
    detail = "alpha=" + fmt("%.3f", fit.alpha) + " beta=" + fmt("%.3f", fit.beta);
    return fit.alpha >= 0.8 && fit.alpha <= 1.2;
}

std::string g_cli_path;

bool c15_cli_byte_identical(std::string& detail) {
    namespace fs = std::filesystem;
    if (g_cli_path.empty()) {
        detail = "command-line binary path not provided (argv[1])";
        return false;
    }
    const fs::path base = fs::temp_directory_path() / "critlab_acceptance";
    fs::remove_all(base);
    auto dir = [&](const char* n) {
        const fs::path p = base / n;
        fs::create_directories(p);
        return p.string();
    };
    auto run = [&](const std::string& args) {
        const std::string cmd = "\"" + g_cli_path + "\" " + args + " >/dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    auto slurp = [](const std::string& d, const char* name) {
        std::ifstream in(fs::path(d) / name, std::ios::binary);
        if (!in) throw std::runtime_error(std::string("missing artifact: ") + name);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    bool ok = true;
    std::string diffs;
    auto compare = [&](const std::string& da, const std::string& db,
                       std::initializer_list<const char*> names) {
        for (const char* n : names) {
            if (slurp(da, n) != slurp(db, n)) {
                ok = false;
                diffs += std::string(" differs:") + n;
            }
        }
    };

    const std::string ca = dir("const_a"), cb = dir("const_b");
    ok = run("constants --m 2 --L 30 --r 1 --seed 7 --out " + ca) && ok;
    ok = run("constants --m 2 --L 30 --r 1 --seed 7 --out " + cb) && ok;
    compare(ca, cb, {"constants_report.json", "constants_table.csv"});

    const std::string la = dir("limit_a"), lb = dir("limit_b");
    const std::string largs = "limit-law --m 1 --r 1 --grid 512 --samples 20000 --seed 3 --out ";
    ok = run(largs + la) && ok;
    ok = run(largs + lb) && ok;
    compare(la, lb, {"limit_law_report.json", "limit_law_checks.csv", "sigma_density.csv"});

    const std::string ra = dir("rmt_a"), rb = dir("rmt_b");
    const std::string rargs = "rmt-verify --m 2 --samples 20000 --seed 11 --out ";
    ok = run(rargs + ra) && ok;
    ok = run(rargs + rb) && ok;
    compare(ra, rb, {"rmt_verify_report.json", "rmt_verify_checks.csv"});

    const std::string sa = dir("sim_a"), sb = dir("sim_b");
    const std::string sargs =
        "simulate --m 2 --L 10 --r 1 --fields 30 --samples 20000 --grid 101 --seed 9 ";
    ok = run(sargs + "--threads 1 --out " + sa) && ok;
    ok = run(sargs + "--threads 4 --out " + sb) && ok;
    compare(sa, sb, {"simulate_report.json", "critical_values.csv"});

    detail = ok ? "4 subcommands, 9 artifacts byte-identical (incl. threads 1 vs 4)"
                : "mismatch or nonzero exit" + diffs;
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];

    criterion(1, "spectral constant identities for m = 1..50 (rel <= 1e-12)", 1.0,
              c01_constant_identities);
    criterion(2, "eigenvalue normalization quadrature vs closed form (1e-8/1e-8/1e-4)", 60.0,
              c02_normalization_quadrature);
    criterion(3, "mean |det| of centered ensembles: sampling within 3 SE at 18 points", 120.0,
              c03_mean_abs_det_mc);
    criterion(4, "shifted-ensemble mean |det|: exact forms to 1e-8, sampling within 3 SE", 120.0,
              c04_shifted_det_forms);
    criterion(5, "gaussian conditioning vs slice-rejection sampling (4 SE)", 60.0,
              c05_conditioning_vs_rejection);
    criterion(6, "one-point density rescaling identity (abs <= 1e-10, n <= 4)", 0.0,
              c06_density_rescaling);
    criterion(7, "completed-square exponent identity (residual <= 1e-12, 1e4 inputs)", 1.0,
              c07_exponent_identity);
    criterion(8, "limit measure built two ways (KS <= 1e-4 exact; <= 0.01 sampled r = 2)", 300.0,
              c08_two_constructions);
    criterion(9, "gaussian approach of limit measures (KS decreasing; <= 0.05 at m = 64)", 600.0,
              c09_gaussian_limit);
    criterion(10, "rescaled one-point density vs semicircle (sup decreasing; outside bounded)", 0.0,
              c10_semicircle_approach);
    criterion(11, "torus covariances vs spectral predictions (5% at L = 80, monotone; zeros exact)",
              60.0, c11_covariance_ratios);
    criterion(12, "expected-count formula vs direct enumeration (3 SE; alternating sums zero)",
              900.0, c12_count_formula_vs_enumeration);
    criterion(13, "rescaled critical values vs limit measure (KS <= 0.08; improving in L)", 1800.0,
              c13_universal_limit_on_torus);
    criterion(14, "growth fit of log expected-count constants (slope within 20% of 1)", 0.0,
              c14_growth_fit);
    criterion(15, "command-line reruns byte-identical (incl. across thread counts)", 0.0,
              c15_cli_byte_identical);

    std::printf("%d/15 criteria passed\n", 15 - g_failures);
    return g_failures;
}
