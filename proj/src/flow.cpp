#include "dhym/flow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace dhym {

namespace {

constexpr double kPi = 3.14159265358979323846;

inline double arccot(double v) { return kPi / 2 - std::atan(v); }

inline void power_parts(int n, double psi, double x, double& U, double& V) {
    if (n == 3) {
        U = psi * psi * psi - 3.0 * psi * x * x;
        V = 3.0 * psi * psi * x - x * x * x;
    } else {
        U = psi * psi - x * x;
        V = 2.0 * psi * x;
    }
}

} // namespace

BackgroundMetric BackgroundMetric::standard(double b) {
    BackgroundMetric bg;
    bg.b = b;
    bg.Q = [b](double x) { return (x - 1.0) * (b - x) / (b - 1.0); };
    return bg;
}

FlowState make_state(const GeometryParams& g, int grid_n) {
    if (grid_n < 16) throw ValidationError("grid_n must be >= 16");
    FlowState st;
    st.n = g.n;
    st.b = g.bd();
    st.q = g.qd();
    st.p = g.pd();
    const int m = grid_n + 2;
    st.x.resize(m);
    st.psi.resize(m);
    const double h = (st.b - 1.0) / (grid_n + 1);
    for (int i = 0; i < m; ++i) st.x[i] = 1.0 + h * i;
    st.x.back() = st.b;
    for (int i = 0; i < m; ++i) st.psi[i] = psi_family_value(g, g.qd(), st.x[i]);
    st.psi.front() = st.q;
    st.psi.back() = st.p;
    return st;
}

std::vector<double> phase(const FlowState& state) {
    const auto& x = state.x;
    const auto& psi = state.psi;
    const std::size_t m = x.size();
    const double h = state.h();
    std::vector<double> theta(m);
    for (std::size_t i = 0; i < m; ++i) {
        double d;
        if (i == 0) d = (psi[1] - psi[0]) / h;
        else if (i == m - 1) d = (psi[m - 1] - psi[m - 2]) / h;
        else d = (psi[i + 1] - psi[i - 1]) / (2 * h);
        theta[i] = (state.n - 1) * arccot(psi[i] / x[i]) + arccot(d);
        if (!(theta[i] > 0.0) || !(theta[i] < kPi))
            throw PhaseOutOfRange("theta out of (0, pi) at x = " + std::to_string(x[i]));
    }
    return theta;
}

std::vector<double> rhs(const FlowState& state, const BackgroundMetric& bg) {
    const auto& x = state.x;
    const auto& psi = state.psi;
    const std::size_t m = x.size();
    const double h = state.h();
    // cell slopes of cot(theta) as divided differences of Re^n against Im^n
    std::vector<double> cell(m - 1);
    double U0, V0, U1, V1;
    power_parts(state.n, psi[0], x[0], U0, V0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        power_parts(state.n, psi[i + 1], x[i + 1], U1, V1);
        const double dV = V1 - V0;
        if (!(dV > 0))
            throw PhaseOutOfRange("Im(psi+ix)^n not increasing across cell " +
                                  std::to_string(i) + " (supercriticality lost)");
        cell[i] = (U1 - U0) / dV;
        U0 = U1; V0 = V1;
    }
    std::vector<double> out(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double right = cell[i];
        double left = cell[i - 1];
        if (i == 1 && state.wall == WallFlux::Extrapolated)
            left = 2.0 * cell[1] - cell[2];
        out[i] = bg.Q(x[i]) * (right - left) / h;
    }
    return out;
}

double cfl_limit(const FlowState& state, const BackgroundMetric& bg) {
    const auto theta = phase(state);
    const auto& x = state.x;
    const auto& psi = state.psi;
    const double h = state.h();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const double d = (psi[i + 1] - psi[i - 1]) / (2 * h);
        const double s = std::sin(theta[i]);
        const double Q = bg.Q(x[i]);
        if (Q <= 0) continue;
        best = std::min(best, (1.0 + d * d) * s * s / Q);
    }
    return h * h * best;
}

void step(FlowState& state, const BackgroundMetric& bg, double dt, double cfl_safety) {
    if (dt < 0) throw ValidationError("negative dt");
    if (dt > cfl_safety * cfl_limit(state, bg) * (1.0 + 1e-12))
        throw CflViolation("dt exceeds the diffusion-limited stability bound");
    const auto dpsi = rhs(state, bg);
    for (std::size_t i = 1; i + 1 < state.psi.size(); ++i)
        state.psi[i] += dt * dpsi[i];
    state.psi.front() = state.q;
    state.psi.back() = state.p;
    state.t += dt;
    (void)phase(state); // validates theta in (0, pi)
}

namespace {

struct Window {
    std::size_t first_in;  // first interior index with x >= 1+delta
    std::size_t last_in;   // last interior index with x <= b-delta
};

Window make_window(const FlowState& st, double delta) {
    Window w{1, st.x.size() - 2};
    while (w.first_in < st.x.size() - 1 && st.x[w.first_in] < 1.0 + delta - 1e-12)
        ++w.first_in;
    while (w.last_in > 1 && st.x[w.last_in] > st.b - delta + 1e-12) --w.last_in;
    return w;
}

std::vector<double> cot_profile(const FlowState& st) {
    auto th = phase(st);
    std::vector<double> c(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) c[i] = 1.0 / std::tan(th[i]);
    return c;
}

} // namespace

FlowResult run_flow(const GeometryParams& g, const BackgroundMetric& bg,
                    const FlowRunConfig& cfg) {
    if (cfg.grid_n < 16) throw ValidationError("grid_n must be >= 16");
    if (!(cfg.delta > 0) || !(cfg.delta < (g.bd() - 1.0) / 4.0))
        throw ValidationError("delta must lie in (0, (b-1)/4)");
    if (!(cfg.stop_tol > 0)) throw ValidationError("stop_tol must be positive");
    if (!(cfg.dt_safety > 0) || cfg.dt_safety > 0.5)
        throw ValidationError("dt_safety must lie in (0, 1/2]");

    const auto t_start = std::chrono::steady_clock::now();
    FlowResult res;
    res.state = make_state(g, cfg.grid_n);
    FlowState& st = res.state;

    // limit profile: xi-branch for non-stable geometry, q-branch for stable
    StabilityReport rep = classify(g);
    res.verdict = rep.verdict;
    st.wall = (rep.verdict == Verdict::Stable || rep.verdict == Verdict::Semistable)
                  ? WallFlux::Anchored
                  : WallFlux::Extrapolated;
    SlopeData limit_slope;
    if (rep.verdict == Verdict::Stable) {
        limit_slope = slope(g, g.qd());
        res.s_limit = g.qd();
    } else {
        CriticalParams cp = find_xi(g);
        limit_slope.s = cp.xi;
        limit_slope.c_s = cp.c_xi;
        limit_slope.A_s = cp.A_xi;
        res.s_limit = cp.xi;
        CertificateResult cert = resultant_certificate(g, cp);
        res.certificate_ok = cert.ok;
        res.certificate_checked = true;
    }
    res.c_limit = limit_slope.c_s;
    res.A_limit = limit_slope.A_s;
    res.psi_limit.resize(st.x.size());
    for (std::size_t i = 0; i < st.x.size(); ++i)
        res.psi_limit[i] = branch_solve(g, limit_slope, st.x[i]);

    FlowDiagnostics& dg = res.diag;
    {
        auto th0 = phase(st); // aborts at step 0 on a degenerate start
        dg.theta0_min = *std::min_element(th0.begin(), th0.end());
        dg.theta0_max = *std::max_element(th0.begin(), th0.end());
        dg.theta_min = dg.theta0_min;
        dg.theta_max = dg.theta0_max;
        dg.theta_win_min = std::numeric_limits<double>::infinity();
        dg.theta_win_max = -std::numeric_limits<double>::infinity();
    }
    dg.min_psidot = std::numeric_limits<double>::infinity();
    dg.max_comparison_violation = -std::numeric_limits<double>::infinity();
    dg.min_monotonicity = std::numeric_limits<double>::infinity();
    dg.max_c_backstep = 0;

    const Window win = make_window(st, cfg.delta);
    std::vector<double> prev_sample = st.psi;
    double dt = 0;
    int quiet_samples = 0;
    long step_count = 0;
    double max_rhs = std::numeric_limits<double>::infinity();

    auto sample = [&](const std::vector<double>& dpsi) {
        SampleRow row;
        row.t = st.t;
        auto th = phase(st);
        row.theta_min = *std::min_element(th.begin(), th.end());
        row.theta_max = *std::max_element(th.begin(), th.end());
        dg.theta_min = std::min(dg.theta_min, row.theta_min);
        dg.theta_max = std::max(dg.theta_max, row.theta_max);
        for (std::size_t i = win.first_in; i < th.size(); ++i) {
            dg.theta_win_min = std::min(dg.theta_win_min, th[i]);
            dg.theta_win_max = std::max(dg.theta_win_max, th[i]);
        }

        double sup = 0;
        for (std::size_t i = win.first_in; i + 1 < st.x.size(); ++i)
            sup = std::max(sup, std::abs(st.psi[i] - res.psi_limit[i]));
        row.sup_dist = sup;

        std::vector<double> c(th.size());
        for (std::size_t i = 0; i < th.size(); ++i) c[i] = 1.0 / std::tan(th[i]);
        double cmin = c[win.first_in], cmax = c[win.first_in];
        for (std::size_t i = win.first_in; i <= win.last_in; ++i) {
            cmin = std::min(cmin, c[i]);
            cmax = std::max(cmax, c[i]);
        }
        row.c_spread = cmax - cmin;

        double mn = std::numeric_limits<double>::infinity();
        double backstep = 0;
        for (std::size_t i = 1; i + 1 < st.x.size(); ++i) {
            mn = std::min(mn, dpsi[i]);
            const double Q = bg.Q(st.x[i]);
            if (Q > 0) backstep = std::max(backstep, -dpsi[i] / Q);
        }
        row.min_psidot = mn;
        dg.min_psidot = std::min(dg.min_psidot, mn);
        dg.max_c_backstep = std::max(dg.max_c_backstep, backstep);

        double comp = -std::numeric_limits<double>::infinity();
        double mono = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < st.x.size(); ++i) {
            comp = std::max(comp, st.psi[i] - res.psi_limit[i]);
            mono = std::min(mono, st.psi[i] - prev_sample[i]);
        }
        dg.max_comparison_violation = std::max(dg.max_comparison_violation, comp);
        dg.min_monotonicity = std::min(dg.min_monotonicity, mono);
        prev_sample = st.psi;
        res.series.push_back(row);
    };

    while (true) {
        const auto dpsi = rhs(st, bg);
        max_rhs = 0;
        for (std::size_t i = 1; i + 1 < st.x.size(); ++i)
            max_rhs = std::max(max_rhs, std::abs(dpsi[i]));

        const bool do_sample = (step_count % cfg.sample_every) == 0;
        if (do_sample) {
            sample(dpsi);
            quiet_samples = (max_rhs < cfg.stop_tol) ? quiet_samples + 1 : 0;
            if (quiet_samples >= cfg.stop_consecutive) {
                dg.converged = true;
                break;
            }
        }
        if (st.t >= cfg.t_max || step_count >= cfg.max_steps) break; // NotConverged

        if (step_count % 50 == 0) dt = cfg.dt_safety * cfl_limit(st, bg);
        for (std::size_t i = 1; i + 1 < st.x.size(); ++i) st.psi[i] += dt * dpsi[i];
        st.psi.front() = st.q;
        st.psi.back() = st.p;
        st.t += dt;
        ++step_count;
    }

    dg.final_max_rhs = max_rhs;
    dg.steps = step_count;

    res.theta = phase(st);
    auto c = cot_profile(st);
    double cmin = c[win.first_in], cmax = c[win.first_in], coff = 0;
    for (std::size_t i = win.first_in; i <= win.last_in; ++i) {
        cmin = std::min(cmin, c[i]);
        cmax = std::max(cmax, c[i]);
        coff = std::max(coff, std::abs(c[i] - res.c_limit));
    }
    dg.c_flat_spread = cmax - cmin;
    dg.c_offset_from_limit = coff;

    double sup = 0;
    for (std::size_t i = win.first_in; i + 1 < st.x.size(); ++i)
        sup = std::max(sup, std::abs(st.psi[i] - res.psi_limit[i]));
    dg.sup_dist_to_limit = sup;
    // the collar-edge value is read at the node nearest 1+delta
    std::size_t near = 1;
    for (std::size_t i = 1; i + 1 < st.x.size(); ++i)
        if (std::abs(st.x[i] - (1.0 + cfg.delta)) < std::abs(st.x[near] - (1.0 + cfg.delta)))
            near = i;
    dg.value_at_collar = st.psi[near];
    dg.limit_at_collar = res.psi_limit[near];

    // level-set residual against (c_limit, A_limit), relative to the
    // magnitude of the boundary terms
    double U, V, res_max = 0;
    for (std::size_t i = win.first_in; i + 1 < st.x.size(); ++i) {
        power_parts(st.n, st.psi[i], st.x[i], U, V);
        res_max = std::max(res_max, std::abs(U - res.c_limit * V - res.A_limit));
    }
    power_parts(st.n, st.p, st.b, U, V);
    dg.levelset_residual = res_max / std::max(1.0, std::abs(U) + std::abs(res.c_limit * V));

    dg.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

} // namespace dhym
