#pragma once

#include <functional>
#include <vector>

#include "dhym/initial_data.hpp"

namespace dhym {

// Q(x) = u'' o u'^{-1}(x) for the background Kahler potential. The default
// u'(rho) = (b e^rho + 1)/(e^rho + 1) gives the closed form
// Q(x) = (x-1)(b-x)/(b-1); Q only reparametrizes time, not the limit.
struct BackgroundMetric {
    double b = 3.0;
    std::function<double(double)> Q;

    static BackgroundMetric standard(double b);
};

// Closure for the flux on the wall cell [1, 1+h]. The anchored form uses the
// pinned node; it is exact when the boundary datum lies on the limit level
// set (stable and semistable attach). The unstable limit carries its jump in
// the wall cell, so there the flux is taken one-sidedly from the interior.
enum class WallFlux { Anchored, Extrapolated };

struct FlowState {
    int n = 3;
    double b = 3, q = 3, p = 18;
    double t = 0;
    WallFlux wall = WallFlux::Anchored;
    std::vector<double> x;   // N+2 nodes, x[0]=1, x[N+1]=b
    std::vector<double> psi; // pinned: psi[0]=q, psi[N+1]=p
    double h() const { return x[1] - x[0]; }
    std::size_t interior() const { return x.size() - 2; }
};

FlowState make_state(const GeometryParams& g, int grid_n);

// theta_i = (n-1) arccot(psi/x) + arccot(psi'), centered differences inside,
// one-sided at the pinned endpoints. Throws PhaseOutOfRange outside (0, pi).
std::vector<double> phase(const FlowState& state);

// Time derivative Q(x) (cot theta)' with the level-set divided-difference
// flux: cot theta on a cell is d[Re(psi+ix)^n]/d[Im(psi+ix)^n], which makes
// every exact level-set profile an exact fixed point. The flux at the wall
// cell x in [1, 1+h] is extrapolated from the interior because the singular
// limit carries its jump there. Endpoints get exactly 0.
std::vector<double> rhs(const FlowState& state, const BackgroundMetric& bg);

// Diffusion-limited bound dt <= safety * h^2 * min (1+psi'^2) sin^2(theta)/Q.
double cfl_limit(const FlowState& state, const BackgroundMetric& bg);

// Explicit Euler update; endpoints re-pinned. Throws CflViolation when dt
// exceeds the bound and PhaseOutOfRange if the new state leaves (0, pi).
void step(FlowState& state, const BackgroundMetric& bg, double dt, double cfl_safety = 1.0);

struct FlowRunConfig {
    int grid_n = 400;
    double delta = 0.05;
    double dt_safety = 0.4;
    double stop_tol = 1e-8;
    double t_max = 1e6;
    int sample_every = 400;
    int stop_consecutive = 10;
    long max_steps = 400000000L;
};

struct SampleRow {
    double t;
    double sup_dist;   // sup |psi - psi_limit| on x >= 1+delta
    double c_spread;   // max-min of cot(theta) on [1+delta, b-delta]
    double theta_min;
    double theta_max;
    double min_psidot; // min rhs over interior
};

struct FlowDiagnostics {
    double min_psidot = 0;                // min over samples
    double max_comparison_violation = 0;  // max over samples/grid of psi - psi_limit
    double min_monotonicity = 0;          // min over consecutive samples of dpsi
    double theta0_min = 0, theta0_max = 0;
    double theta_min = 0, theta_max = 0;  // over all samples, full grid
    // theta range over samples away from the wall collar; the collar nodes
    // straddle the forming jump, so their centered slopes are not meaningful
    // samples of the continuum phase
    double theta_win_min = 0, theta_win_max = 0;
    double max_c_backstep = 0;            // max over samples of (-min rhs/Q)^+
    double sup_dist_to_limit = 0;         // final, on [1+delta, b]
    double value_at_collar = 0;           // final psi at first node >= 1+delta
    double limit_at_collar = 0;
    double c_flat_spread = 0;             // final, on [1+delta, b-delta]
    double c_offset_from_limit = 0;       // final max |c - c_limit| on window
    double levelset_residual = 0;         // final, relative, vs (c_limit, A_limit)
    double final_max_rhs = 0;
    bool converged = false;
    double wall_seconds = 0;
    long steps = 0;
};

struct FlowResult {
    FlowState state;
    FlowDiagnostics diag;
    std::vector<SampleRow> series;
    std::vector<double> theta;      // final phase profile
    std::vector<double> psi_limit;  // branch reference on the grid
    double s_limit = 0;             // xi (unstable) or q (stable)
    double c_limit = 0;
    double A_limit = 0;
    Verdict verdict = Verdict::Stable;
    bool certificate_ok = false;    // (H1) certificate, unstable runs
    bool certificate_checked = false;
};

// Drives the flow from psi0 until max|rhs| stays under stop_tol for
// stop_consecutive samples or t reaches t_max (NotConverged flag, not fatal).
FlowResult run_flow(const GeometryParams& g, const BackgroundMetric& bg,
                    const FlowRunConfig& cfg);

} // namespace dhym
