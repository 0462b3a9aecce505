// Command-line front end for the blown-up projective space dHYM toolkit:
// stability classification, the singular branch parameter xi, the reduced
// cotangent flow, and (p,q)/(q,b) phase-diagram sweeps.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <thread>
#include <tuple>

#include "dhym/flow.hpp"

using nlohmann::json;
using namespace dhym;

namespace {

struct CliOptions {
    int n = 3;
    std::string b = "3", p = "18", q = "3";
    int grid_n = 400;
    double delta = 0.05;
    double dt_safety = 0.4;
    double stop_tol = 1e-8;
    double t_max = 1e6;
    int sample_every = 400;
    std::string out_dir = ".";
    std::uint64_t seed = 12345;
};

GeometryParams geometry_of(const CliOptions& o) {
    return GeometryParams::make(o.n, parse_rational(o.b), parse_rational(o.p),
                                parse_rational(o.q), true);
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_config_echo(const CliOptions& o, const std::filesystem::path& dir) {
    std::ofstream f(dir / "config_used.txt");
    f << "n=" << o.n << "\n"
      << "b=" << o.b << "\n"
      << "p=" << o.p << "\n"
      << "q=" << o.q << "\n"
      << "grid-n=" << o.grid_n << "\n"
      << "delta=" << fmt17(o.delta) << "\n"
      << "dt-safety=" << fmt17(o.dt_safety) << "\n"
      << "stop-tol=" << fmt17(o.stop_tol) << "\n"
      << "t-max=" << fmt17(o.t_max) << "\n"
      << "sample-every=" << o.sample_every << "\n"
      << "seed=" << o.seed << "\n";
}

json config_json(const CliOptions& o) {
    return json{{"n", o.n},       {"b", o.b},
                {"p", o.p},       {"q", o.q},
                {"grid_n", o.grid_n}, {"delta", o.delta},
                {"dt_safety", o.dt_safety}, {"stop_tol", o.stop_tol},
                {"t_max", o.t_max}, {"sample_every", o.sample_every},
                {"seed", o.seed}, {"out_dir", o.out_dir}};
}

int cmd_classify(const CliOptions& o) {
    GeometryParams g = geometry_of(o);
    StabilityReport rep = classify(g);
    std::cout << "triple: n=" << g.n << " b=" << o.b << " p=" << o.p << " q=" << o.q << "\n";
    std::cout << "verdict: " << verdict_name(rep.verdict) << "\n";
    if (rep.c_q_exact)
        std::cout << "c_q = " << rational_string(*rep.c_q_exact) << " = " << fmt17(rep.c_q)
                  << "\n";
    else
        std::cout << "c_q = " << fmt17(rep.c_q) << "\n";
    std::cout << "threshold c_q + sqrt(1+c_q^2) = " << fmt17(rep.threshold) << "\n";
    std::cout << "witnesses (k, H-side, E-side):\n";
    for (const auto& w : rep.witnesses)
        std::cout << "  k=" << w.k << "  " << fmt17(w.p_side) << "  " << fmt17(w.q_side)
                  << "\n";
    return 0;
}

int cmd_xi(const CliOptions& o) {
    GeometryParams g = geometry_of(o);
    StabilityReport rep = classify(g);
    std::cout << "verdict: " << verdict_name(rep.verdict) << "\n";
    CriticalParams cp;
    try {
        cp = find_xi(g);
    } catch (const NoRootInBracket&) {
        std::cout << "triple appears dHYM stable: no branch parameter xi in (q, p_star)\n";
        return 0;
    }
    FPolynomial F = build_F(g);
    double f_res = std::abs(F.eval(cp.xi)) / F.scale_at(cp.xi);
    double alg_res = std::abs(cp.xi - (cp.c_xi + std::sqrt(1.0 + cp.c_xi * cp.c_xi)));
    std::cout << "xi       = " << fmt17(cp.xi) << "\n";
    std::cout << "xi_prime = " << fmt17(cp.xi_prime) << "\n";
    std::cout << "p_star   = " << fmt17(cp.p_star) << "\n";
    std::cout << "c_xi     = " << fmt17(cp.c_xi) << "\n";
    std::cout << "A_xi     = " << fmt17(cp.A_xi) << "\n";
    if (g.n == 3) {
        // the limiting slope via the slope formula at s = xi
        double zeta = slope(g, cp.xi).c_s;
        std::cout << "zeta     = " << fmt17(zeta) << "  (zeta - c_xi = "
                  << fmt17(zeta - cp.c_xi) << ", zeta - c_q = " << fmt17(zeta - rep.c_q)
                  << ")\n";
    } else {
        double b = g.bd(), p = g.pd();
        double closed = b * p - std::sqrt((b * b - 1.0) * (p * p + 1.0));
        std::cout << "closed form bp - sqrt((b^2-1)(p^2+1)) = " << fmt17(closed)
                  << "  (|xi - closed| = " << fmt17(std::abs(cp.xi - closed)) << ")\n";
    }
    std::cout << "|F(xi)|/scale = " << fmt17(f_res) << "\n";
    std::cout << "|xi - (c_xi+sqrt(1+c_xi^2))| = " << fmt17(alg_res) << "\n";
    return 0;
}

int cmd_flow(const CliOptions& o) {
    GeometryParams g = geometry_of(o);
    std::filesystem::path dir(o.out_dir);
    std::filesystem::create_directories(dir);

    FlowRunConfig cfg;
    cfg.grid_n = o.grid_n;
    cfg.delta = o.delta;
    cfg.dt_safety = o.dt_safety;
    cfg.stop_tol = o.stop_tol;
    cfg.t_max = o.t_max;
    cfg.sample_every = o.sample_every;

    auto bg = BackgroundMetric::standard(g.bd());
    FlowResult r = run_flow(g, bg, cfg);
    const FlowDiagnostics& d = r.diag;

    {
        std::ofstream f(dir / "profile_final.csv");
        f << "x,psi,theta,psi_limit\n";
        for (std::size_t i = 0; i < r.state.x.size(); ++i)
            f << fmt17(r.state.x[i]) << ',' << fmt17(r.state.psi[i]) << ','
              << fmt17(r.theta[i]) << ',' << fmt17(r.psi_limit[i]) << "\n";
    }
    {
        std::ofstream f(dir / "series.csv");
        f << "t,sup_dist,c_spread,theta_min,theta_max,min_psidot\n";
        for (const auto& row : r.series)
            f << fmt17(row.t) << ',' << fmt17(row.sup_dist) << ',' << fmt17(row.c_spread)
              << ',' << fmt17(row.theta_min) << ',' << fmt17(row.theta_max) << ','
              << fmt17(row.min_psidot) << "\n";
    }
    write_config_echo(o, dir);

    const double comp_viol = std::max(0.0, d.max_comparison_violation);
    json invariants = {
        {"comparison", {{"value", comp_viol}, {"tol", 1e-8}, {"pass", comp_viol <= 1e-8}}},
        {"monotonicity",
         {{"value", d.min_monotonicity}, {"tol", -1e-10}, {"pass", d.min_monotonicity >= -1e-10}}},
        {"theta_confinement",
         {{"low", d.theta_win_min},
          {"high", d.theta_win_max},
          {"pass", d.theta_win_min >= d.theta0_min - 1e-6 &&
                       d.theta_win_max <= d.theta0_max + 1e-6}}},
        {"c_monotone_backstep",
         {{"value", d.max_c_backstep}, {"tol", 1e-8}, {"pass", d.max_c_backstep <= 1e-8}}},
    };
    json report = {
        {"config", config_json(o)},
        {"verdict", verdict_name(r.verdict)},
        {"s_limit", r.s_limit},
        {"zeta", r.c_limit},
        {"A_limit", r.A_limit},
        {"certificate_checked", r.certificate_checked},
        {"certificate_ok", r.certificate_ok},
        {"converged", d.converged},
        {"steps", d.steps},
        {"flow_time", r.state.t},
        {"final_max_rhs", d.final_max_rhs},
        {"sup_dist_to_limit", d.sup_dist_to_limit},
        {"value_at_collar", d.value_at_collar},
        {"limit_at_collar", d.limit_at_collar},
        {"c_flat_spread", d.c_flat_spread},
        {"c_offset_from_limit", d.c_offset_from_limit},
        {"levelset_residual", d.levelset_residual},
        {"theta0", {d.theta0_min, d.theta0_max}},
        {"theta_full_range", {d.theta_min, d.theta_max}},
        {"theta_window_range", {d.theta_win_min, d.theta_win_max}},
        {"min_psidot", d.min_psidot},
        {"invariants", invariants},
        {"wall_seconds", d.wall_seconds},
    };
    std::ofstream(dir / "report.json") << report.dump(2) << "\n";

    std::cout << "verdict " << verdict_name(r.verdict) << ", s_limit " << fmt17(r.s_limit)
              << ", converged " << (d.converged ? "yes" : "NO (t_max reached)")
              << ", sup_dist " << fmt17(d.sup_dist_to_limit) << ", steps " << d.steps
              << ", wall " << fmt17(d.wall_seconds) << " s\n";
    if (r.certificate_checked && !r.certificate_ok)
        std::cout << "warning: comparison certificate not established for this triple\n";
    std::cout << "wrote " << (dir / "profile_final.csv").string() << ", series.csv, "
              << "report.json, config_used.txt\n";
    return 0;
}

struct SweepRow {
    double p, q, b;
    std::string verdict;
    double c_q = 0, threshold = 0, xi = 0;
    bool has_xi = false;
    bool degenerate = false;
};

SweepRow sweep_point(int n, double b, double p, double q) {
    SweepRow row;
    row.p = p; row.q = q; row.b = b;
    GeometryParams g = GeometryParams::make(n, b, p, q);
    try {
        StabilityReport rep = classify(g);
        row.verdict = verdict_name(rep.verdict);
        row.c_q = rep.c_q;
        row.threshold = rep.threshold;
        if (rep.verdict != Verdict::Stable && q > 0) {
            try {
                row.xi = find_xi(g).xi;
                row.has_xi = true;
            } catch (const Error&) {}
        }
    } catch (const DegenerateVolume&) {
        row.verdict = "degenerate";
        row.degenerate = true;
    } catch (const SupercriticalViolation&) {
        row.verdict = "non-supercritical";
        row.degenerate = true;
    }
    return row;
}

int cmd_sweep(const CliOptions& o, const std::string& p_range, const std::string& q_range,
              const std::string& b_range, int samples) {
    auto parse_range = [](const std::string& s) {
        double lo, hi; int k;
        if (std::sscanf(s.c_str(), "%lf:%lf:%d", &lo, &hi, &k) != 3 || k < 1)
            throw ValidationError("range must be lo:hi:count, got '" + s + "'");
        return std::tuple<double, double, int>(lo, hi, k);
    };
    const bool pq = !p_range.empty() && !q_range.empty() && b_range.empty();
    const bool qb = !q_range.empty() && !b_range.empty() && p_range.empty();
    if (!pq && !qb)
        throw ValidationError("sweep needs --p-range and --q-range, or --q-range and --b-range");

    std::vector<std::tuple<double, double, double>> pts; // (b, p, q)
    if (samples > 0) {
        std::mt19937_64 rng(o.seed);
        auto [alo, ahi, ak] = parse_range(pq ? p_range : q_range);
        auto [blo, bhi, bk] = parse_range(pq ? q_range : b_range);
        (void)ak; (void)bk;
        std::uniform_real_distribution<double> da(alo, ahi), db(blo, bhi);
        for (int i = 0; i < samples; ++i) {
            double a = da(rng), c = db(rng);
            if (pq) pts.emplace_back(to_double(parse_rational(o.b)), a, c);
            else pts.emplace_back(c, to_double(parse_rational(o.p)), a);
        }
    } else {
        auto [alo, ahi, ak] = parse_range(pq ? p_range : q_range);
        auto [blo, bhi, bk] = parse_range(pq ? q_range : b_range);
        for (int i = 0; i < ak; ++i)
            for (int j = 0; j < bk; ++j) {
                double a = ak == 1 ? alo : alo + (ahi - alo) * i / (ak - 1);
                double c = bk == 1 ? blo : blo + (bhi - blo) * j / (bk - 1);
                if (pq) pts.emplace_back(to_double(parse_rational(o.b)), a, c);
                else pts.emplace_back(c, to_double(parse_rational(o.p)), a);
            }
    }

    std::vector<SweepRow> rows(pts.size());
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < pts.size(); i = next.fetch_add(1)) {
                auto [bb, pp, qq] = pts[i];
                rows[i] = sweep_point(o.n, bb, pp, qq);
            }
        });
    for (auto& th : pool) th.join();

    std::filesystem::path dir(o.out_dir);
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / "sweep.csv");
    f << "p,q,b,verdict,c_q,threshold,xi\n";
    for (const auto& r : rows) {
        f << fmt17(r.p) << ',' << fmt17(r.q) << ',' << fmt17(r.b) << ',' << r.verdict << ',';
        if (r.degenerate) f << ",,";
        else {
            f << fmt17(r.c_q) << ',' << fmt17(r.threshold) << ',';
            if (r.has_xi) f << fmt17(r.xi);
        }
        f << "\n";
    }
    std::cout << "sweep: " << rows.size() << " rows -> " << (dir / "sweep.csv").string()
              << "\n";
    std::map<std::string, int> counts;
    for (const auto& r : rows) counts[r.verdict]++;
    for (const auto& [k, v] : counts) std::cout << "  " << k << ": " << v << "\n";
    return 0;
}

int verify_fail_count = 0;

void check(bool ok, const std::string& label) {
    std::cout << (ok ? "PASS " : "FAIL ") << label << "\n";
    if (!ok) ++verify_fail_count;
}

int cmd_verify(const CliOptions& o) {
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    GeometryParams g = geometry_of(o);
    // identity residuals at random s and k
    {
        double worst = 0;
        for (int trial = 0; trial < 100; ++trial) {
            double s = 0.1 + u01(rng) * (g.pd() / g.bd() - 0.2);
            int k = 1 + int(u01(rng) * g.n);
            k = std::min(k, g.n);
            auto [r1, r2] = check_identities(g, s, k);
            worst = std::max({worst, r1, r2});
        }
        check(worst < 1e-9, "intersection identities, 100 random (s,k), residual < 1e-9");
    }
    // slope derivative vs central difference
    {
        double worst = 0;
        for (int trial = 0; trial < 100; ++trial) {
            double s = 0.1 + u01(rng) * (g.pd() / g.bd() - 0.2);
            if (std::abs(slope(g, s).vol_im) < 1e-6) continue;
            double h = 1e-5;
            double fd = (slope(g, s + h).c_s - slope(g, s - h).c_s) / (2 * h);
            double cf = slope_derivative(g, s);
            worst = std::max(worst, std::abs(fd - cf) / std::max(1.0, std::abs(cf)));
        }
        check(worst < 1e-6, "dc_s/ds closed form vs central difference, rel < 1e-6");
    }
    // A_s two-route agreement
    {
        double worst = 0;
        for (int trial = 0; trial < 100; ++trial) {
            double s = 0.1 + u01(rng) * (g.pd() / g.bd() - 0.2);
            SlopeData sd = slope(g, s);
            auto [wp, ws] = complex_power_pair(g, s, g.n);
            double a2 = ws.real() - sd.c_s * ws.imag();
            (void)wp;
            worst = std::max(worst, std::abs(sd.A_s - a2) /
                                        std::max(1.0, std::abs(sd.A_s)));
        }
        check(worst < 1e-12, "A_s from the H-side equals A_s from the E-side, rel < 1e-12");
    }
    // thresholds chain
    {
        bool ok = true;
        for (int trial = 0; trial < 50; ++trial) {
            double b = 1.05 + 4.0 * u01(rng);
            auto [bs, bu] = unstability_thresholds(b);
            double lower = std::sqrt((b * b * b - 1) / (3 * (4 * b * b * b - 1)));
            ok = ok && lower < bs && bs < bu && bu < 1.0;
        }
        check(ok, "threshold chain sqrt((b^3-1)/(3(4b^3-1))) < b_star < b_upper < 1");
    }
    // F anchor at p/b
    {
        FPolynomial F = build_F(g);
        double pb = g.pd() / g.bd();
        double closed = (std::pow(g.bd(), g.n) - 1.0) *
                        std::pow(g.pd() * g.pd() + g.bd() * g.bd(), g.n - 1) /
                        std::pow(g.bd(), 2 * g.n - 2);
        check(std::abs(F.eval(pb) - closed) <= 1e-12 * std::abs(closed),
              "F(p/b) matches (b^n-1)(p^2+b^2)^{n-1}/b^{2n-2}");
    }
    // branch level-set residuals (n=3 only)
    if (g.n == 3) {
        try {
            CriticalParams cp = find_xi(g);
            double worst = 0;
            for (int trial = 0; trial < 10; ++trial) {
                double s = cp.xi + (cp.xi_prime - cp.xi) * 0.9 * trial / 10.0;
                SlopeData sd = slope(g, s);
                for (int i = 0; i <= 50; ++i) {
                    double x = 1.0 + (g.bd() - 1.0) * i / 50.0;
                    double psi = branch_solve(g, sd, x);
                    double res = std::abs((psi * psi * psi - 3 * psi * x * x) -
                                          sd.c_s * (3 * psi * psi * x - x * x * x) - sd.A_s);
                    worst = std::max(worst, res / std::max(1.0, std::abs(sd.A_s)));
                }
            }
            check(worst < 1e-9, "branch level-set residual < 1e-9 across the family");
            check(std::abs(cp.xi - (cp.c_xi + std::sqrt(1 + cp.c_xi * cp.c_xi))) < 1e-9,
                  "xi = c_xi + sqrt(1+c_xi^2)");
        } catch (const NoRootInBracket&) {
            std::cout << "SKIP branch checks (triple is stable)\n";
        }
        InitialProfile ip = build_psi0(g, uniform_grid(1.0, g.bd(), 101));
        check(phase_monotonicity_check(g, ip) > 0, "(cot theta_psi0)' > 0 on the grid");
    }

    std::cout << (verify_fail_count == 0 ? "verify: all checks passed\n"
                                         : "verify: FAILURES present\n");
    return verify_fail_count == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dHYM stability, singular branches, and the reduced cotangent flow on the "
                 "one-point blow-up of projective space"};
    app.set_config("--config", "", "key = value configuration file");

    CliOptions o;
    app.add_option("--n", o.n, "complex dimension")->capture_default_str();
    app.add_option("--b", o.b, "Kahler class coefficient b (rational, b>1)")
        ->capture_default_str();
    app.add_option("--p", o.p, "class coefficient p (rational)")->capture_default_str();
    app.add_option("--q", o.q, "class coefficient q (rational)")->capture_default_str();
    app.add_option("--grid-n", o.grid_n, "interior grid points")->capture_default_str();
    app.add_option("--delta", o.delta, "collar width for C1-type diagnostics")
        ->capture_default_str();
    app.add_option("--dt-safety", o.dt_safety, "CFL safety factor in (0, 1/2]")
        ->capture_default_str();
    app.add_option("--stop-tol", o.stop_tol, "steady-state threshold on max|rhs|")
        ->capture_default_str();
    app.add_option("--t-max", o.t_max, "flow time cap")->capture_default_str();
    app.add_option("--sample-every", o.sample_every, "steps between diagnostic samples")
        ->capture_default_str();
    app.add_option("--out-dir", o.out_dir, "output directory")
        ->envname("DHYM_OUT_DIR")
        ->capture_default_str();
    app.add_option("--seed", o.seed, "RNG seed (sweep sampling and verify)")
        ->capture_default_str();

    auto* c_classify = app.add_subcommand("classify", "stability verdict and witnesses");
    auto* c_xi = app.add_subcommand("xi", "critical branch parameter xi and derived constants");
    auto* c_flow = app.add_subcommand("flow", "run the reduced cotangent flow");
    auto* c_sweep = app.add_subcommand("sweep", "verdict table over a parameter rectangle");
    auto* c_verify = app.add_subcommand("verify", "run the identity/invariant suite");
    std::string p_range, q_range, b_range;
    int samples = 0;
    c_sweep->add_option("--p-range", p_range, "lo:hi:count");
    c_sweep->add_option("--q-range", q_range, "lo:hi:count");
    c_sweep->add_option("--b-range", b_range, "lo:hi:count");
    c_sweep->add_option("--samples", samples, "random samples instead of a grid");
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*c_classify) return cmd_classify(o);
        if (*c_xi) return cmd_xi(o);
        if (*c_flow) return cmd_flow(o);
        if (*c_sweep) return cmd_sweep(o, p_range, q_range, b_range, samples);
        if (*c_verify) return cmd_verify(o);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
