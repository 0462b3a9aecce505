// Acceptance suite: one line per criterion, nonzero exit if any fail.
// The flow criteria run the full flagship and stable-control integrations,
// so this binary takes a few tens of seconds.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "dhym/flow.hpp"
#include "oracles.hpp"

using namespace dhym;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

GeometryParams flagship() {
    return GeometryParams::make(3, Rational(3), Rational(18), Rational(3), true);
}

void criterion_1() {
    GeometryParams g = flagship();
    ExactSlope es = slope_exact(g, Rational(3));
    bool exact_ok = es.c_s == Rational(5328, 2863);
    double cf = slope(g, 3.0).c_s;
    bool float_ok = std::abs(cf - 5328.0 / 2863.0) < 1e-12;
    report(1, exact_ok && float_ok,
           "exact slope c_q = 5328/2863 (got " + rational_string(es.c_s) +
               ", float residual " + fmt(std::abs(cf - 5328.0 / 2863.0)) + ")");
}

void criterion_2() {
    FPolynomial F = build_F(flagship());
    bool ok = F.coeffs_exact.size() == 5 && F.coeffs_exact[0] == Rational(-1) &&
              F.coeffs_exact[1] == Rational(0) && F.coeffs_exact[2] == Rational(2887) &&
              F.coeffs_exact[3] == Rational(-10692) && F.coeffs_exact[4] == Rational(-2890);
    report(2, ok, "quartic coefficients (-1, 0, 2887, -10692, -2890) reproduced exactly");
}

void criterion_3() {
    GeometryParams g = flagship();
    auto t0 = std::chrono::steady_clock::now();
    CriticalParams cp = find_xi(g);
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0).count();
    FPolynomial F = build_F(g);
    bool bracket = cp.xi > 3.0 && cp.xi < 6.0;
    bool f_res = std::abs(F.eval(cp.xi)) < 1e-9 * F.scale_at(cp.xi);
    bool alg = std::abs(cp.xi - (cp.c_xi + std::sqrt(1 + cp.c_xi * cp.c_xi))) < 1e-9;
    double zeta = (5346.0 - std::pow(cp.xi, 3) + 3 * cp.xi) / (2890.0 - 3 * cp.xi * cp.xi);
    bool zeta_ok = std::abs(zeta - cp.c_xi) < 1e-9 && zeta > 5328.0 / 2863.0;
    report(3, bracket && f_res && alg && zeta_ok,
           "xi = " + fmt(cp.xi) + " in (3,6), |F(xi)| small, xi = c_xi + sqrt(1+c_xi^2), "
           "zeta = " + fmt(zeta) + " > c_q  (" + fmt(ms) + " ms)");
}

void criterion_4() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ub(1.05, 5.0), uscale(0.2, 4.0);
    double worst = 0;
    for (int t = 0; t < 20; ++t) {
        double b = ub(rng);
        double p = b + uscale(rng);
        double closed = b * p - std::sqrt((b * b - 1) * (p * p + 1));
        GeometryParams g = GeometryParams::make(2, b, p, closed / 2);
        CriticalParams cp = find_xi(g);
        worst = std::max(worst,
                         std::abs(cp.xi - closed) / std::max(1.0, std::abs(closed)));
    }
    report(4, worst < 1e-10,
           "n=2 closed form bp - sqrt((b^2-1)(p^2+1)) matched on 20 draws (worst rel " +
               fmt(worst) + ")");
}

void criterion_5() {
    // exact instance first
    FPolynomial F = build_F(flagship());
    bool exact_ok = F.eval_exact(Rational(6)) == Rational(35594) &&
                    Rational(26) * Rational(333) * Rational(333) / Rational(81) ==
                        Rational(35594);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ub(1.05, 5.0), up(0.5, 25.0);
    double worst = 0;
    for (int n : {2, 3})
        for (int t = 0; t < 20; ++t) {
            double b = ub(rng), p = up(rng);
            GeometryParams g = GeometryParams::make(n, b, p, 0.5);
            FPolynomial Fn = build_F(g);
            double closed = (std::pow(b, n) - 1.0) * std::pow(p * p + b * b, n - 1) /
                            std::pow(b, 2 * n - 2);
            worst = std::max(worst, std::abs(Fn.eval(p / b) - closed) / std::abs(closed));
        }
    report(5, exact_ok && worst < 1e-12,
           "F(p/b) anchor: exact 35594 at the flagship, rel " + fmt(worst) +
               " over 20 random draws for n = 2, 3");
}

void criterion_6() {
    GeometryParams g = flagship();
    auto t0 = std::chrono::steady_clock::now();
    CriticalParams cp = find_xi(g);
    CertificateResult cert = resultant_certificate(g, cp);
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool roots = cert.residual_at_1 < 1e-8 && cert.residual_at_b3 < 1e-8;
    bool deflation = std::abs(cert.third_root - cert.third_root_deflated) <=
                     1e-8 * std::max(1.0, std::abs(cert.third_root));
    bool negative = cert.third_root_negative;
    bool dense = cert.dense_grid_max_gap < 1e-9;
    report(6, roots && deflation && negative && dense && sec < 1.0,
           "resultant certificate: roots at 1 and 27 (" + fmt(cert.residual_at_1) + ", " +
               fmt(cert.residual_at_b3) + "), third root " + fmt(cert.third_root) +
               (negative ? " < 0" : " NOT negative") + ", deflation gap " +
               fmt(std::abs(cert.third_root - cert.third_root_deflated)) +
               ", dense-grid gap " + fmt(cert.dense_grid_max_gap) + "  (" + fmt(sec) + " s)");
}

FlowResult run_flagship() {
    GeometryParams g = flagship();
    auto bg = BackgroundMetric::standard(3.0);
    FlowRunConfig cfg;
    cfg.grid_n = 400;
    cfg.delta = 0.05;
    cfg.stop_tol = 1e-8;
    cfg.t_max = 1e6;
    cfg.sample_every = 400;
    return run_flow(g, bg, cfg);
}

void criterion_7(const FlowResult& r) {
    const FlowDiagnostics& d = r.diag;
    bool steady = d.converged && d.final_max_rhs < 1e-8;
    bool sup = d.sup_dist_to_limit < 1e-3;
    bool collar = std::abs(d.value_at_collar - d.limit_at_collar) < 5e-3;
    bool flat = d.c_flat_spread < 2e-3;
    bool near = d.c_offset_from_limit < 2e-3;
    bool fast = d.wall_seconds < 300.0;
    report(7, steady && sup && collar && flat && near && fast,
           "flagship flow N=400: steady (max|rhs| " + fmt(d.final_max_rhs) +
               "), sup|psi - psi_xi|[1.05,3] = " + fmt(d.sup_dist_to_limit) +
               " (tol 1e-3), collar gap " + fmt(d.value_at_collar - d.limit_at_collar) +
               " (tol 5e-3), c spread " + fmt(d.c_flat_spread) + ", |c - c_xi| " +
               fmt(d.c_offset_from_limit) + " (tol 2e-3), wall " + fmt(d.wall_seconds) + " s");
}

void criterion_8(const FlowResult& r) {
    const FlowDiagnostics& d = r.diag;
    bool mono = d.min_monotonicity >= -1e-10;
    bool comp = std::max(0.0, d.max_comparison_violation) < 1e-8;
    bool theta = d.theta_win_min >= d.theta0_min - 1e-6 &&
                 d.theta_win_max <= d.theta0_max + 1e-6;
    bool cmono = d.max_c_backstep <= 1e-8;
    report(8, mono && comp && theta && cmono,
           "maximum-principle suite: monotonicity " + fmt(d.min_monotonicity) +
               " (>= -1e-10), comparison " + fmt(std::max(0.0, d.max_comparison_violation)) +
               " (< 1e-8), theta window [" + fmt(d.theta_win_min) + ", " +
               fmt(d.theta_win_max) + "] inside [" + fmt(d.theta0_min) + ", " +
               fmt(d.theta0_max) + "] +- 1e-6, (cot theta)' backstep " +
               fmt(d.max_c_backstep) + " (<= 1e-8)");
}

void criterion_9() {
    GeometryParams g = GeometryParams::make(3, Rational(3), Rational(18), Rational(5), true);
    auto bg = BackgroundMetric::standard(3.0);
    FlowRunConfig cfg;
    cfg.grid_n = 400;
    cfg.stop_tol = 1e-8;
    cfg.t_max = 1e6;
    cfg.sample_every = 400;
    FlowResult r = run_flow(g, bg, cfg);
    bool stable = r.verdict == Verdict::Stable;
    bool res = r.diag.levelset_residual < 1e-6;
    bool attach = std::abs(r.state.psi[1] - 5.0) < 0.1; // no wall jump
    report(9, stable && r.diag.converged && res && attach,
           "stable control (q=5): level-set residual at slope c_q = " +
               fmt(r.diag.levelset_residual) + " (< 1e-6), wall attach |psi(1+h) - q| = " +
               fmt(std::abs(r.state.psi[1] - 5.0)) + ", wall " + fmt(r.diag.wall_seconds) +
               " s");
}

void criterion_10() {
    GeometryParams g = flagship();
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> u(0.2, 5.8);
    double worst_id = 0, worst_fd = 0;
    for (int t = 0; t < 100; ++t) {
        double s = u(rng);
        int k = 1 + t % 3;
        auto [r1, r2] = check_identities(g, s, k);
        worst_id = std::max({worst_id, r1, r2});
    }
    for (int t = 0; t < 100; ++t) {
        double s = u(rng);
        if (std::abs(slope(g, s).vol_im) < 1e-6) continue;
        double fd = (slope(g, s + 1e-5).c_s - slope(g, s - 1e-5).c_s) / 2e-5;
        double cf = slope_derivative(g, s);
        worst_fd = std::max(worst_fd, std::abs(fd - cf) / std::max(1.0, std::abs(cf)));
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(10, worst_id < 1e-9 && worst_fd < 1e-6 && sec < 1.0,
           "identity suite: worst identity residual " + fmt(worst_id) +
               " (< 1e-9), worst dc/ds vs finite difference " + fmt(worst_fd) +
               " (< 1e-6)  (" + fmt(sec) + " s)");
}

void criterion_11() {
    std::mt19937_64 rng(555);
    const double b = 3.0;
    auto [b_star, b_upper] = unstability_thresholds(b);
    (void)b_upper;
    bool ok = true;
    int n_first = 0, n_second = 0, n_stable = 0;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        // first kind along p = 2bq, q in (b_star, 5]
        double q1 = b_star + (5.0 - b_star) * (t + 0.5) / 50.0;
        StabilityReport r1 = classify(GeometryParams::make(3, b, 2 * b * q1, q1));
        ok = ok && r1.verdict == Verdict::UnstableFirstKind;
        ok = ok && !oracle::brute_force_stable(3, b, 2 * b * q1, q1, r1.c_q);
        n_first++;

        // second kind along p = 3bq, q in [sqrt(4b^3-1), 15]
        double qc = std::sqrt(4 * b * b * b - 1.0);
        double q2 = qc + (15.0 - qc) * (t + 0.5) / 50.0;
        StabilityReport r2 = classify(GeometryParams::make(3, b, 3 * b * q2, q2));
        ok = ok && r2.verdict == Verdict::UnstableSecondKind;
        ok = ok && q2 <= r2.c_q;
        n_second++;

        // stable band q in [p/b, p] (kept supercritical)
        double p3 = 12.0 + 10.0 * u01(rng);
        double q3 = p3 / b + (std::min(p3, 25.0) - p3 / b) * u01(rng);
        StabilityReport r3 = classify(GeometryParams::make(3, b, p3, q3));
        ok = ok && r3.verdict == Verdict::Stable;
        ok = ok && oracle::brute_force_stable(3, b, p3, q3, r3.c_q);
        n_stable++;
    }
    report(11, ok && n_first == 50 && n_second == 50 && n_stable == 50,
           "region tests: 50 first-kind points on p=2bq, 50 second-kind on p=3bq, "
           "50 stable in q in [p/b, p], all matching brute-force witnesses");
}

} // namespace

int main() {
    std::printf("acceptance suite: dHYM stability / singular branch / cotangent flow\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    FlowResult flag = run_flagship();
    criterion_7(flag);
    criterion_8(flag);
    criterion_9();
    criterion_10();
    criterion_11();
    if (failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) failed\n", failures);
    return 1;
}
