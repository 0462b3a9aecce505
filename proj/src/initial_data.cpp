#include "dhym/initial_data.hpp"

#include <cmath>

namespace dhym {

double psi_family_mu(const GeometryParams& g, double s) {
    double b = g.bd(), p = g.pd();
    return 3.0 * (p * p * b - s * s) / (b * b * b - 1.0);
}

double psi_family_value(const GeometryParams& g, double s, double x) {
    double mu = psi_family_mu(g, s);
    if (!(mu > 1.0))
        throw IllPosed("psi^(s) needs mu > 1, i.e. 3s^2 < 3p^2 b - b^3 + 1");
    double lam = 3.0 * s * s - mu;
    double radicand = mu * x * x + lam / x;
    if (!(radicand > 0)) throw IllPosed("mu x^3 + lam not positive on [1,b]");
    return std::sqrt(radicand / 3.0);
}

double psi_family_derivative(const GeometryParams& g, double s, double x) {
    double mu = psi_family_mu(g, s);
    double lam = 3.0 * s * s - mu;
    double radicand = mu * x * x + lam / x;
    return (2.0 * mu * x - lam / (x * x)) / (2.0 * std::sqrt(3.0 * radicand));
}

InitialProfile build_psi0(const GeometryParams& g, const std::vector<double>& grid) {
    if (g.n != 3) throw UnsupportedDimension("psi0 is the n = 3 initial potential");
    if (!(g.qd() > 0)) throw ValidationError("psi0 needs q > 0");
    InitialProfile ip;
    ip.mu = psi_family_mu(g, g.qd());
    if (!(ip.mu > 1.0))
        throw IllPosed("3q^2 >= 3p^2 b - b^3 + 1: initial potential ill-posed (mu <= 1)");
    ip.lam = 3.0 * g.qd() * g.qd() - ip.mu;
    ip.grid = grid;
    ip.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        ip.values[i] = psi_family_value(g, g.qd(), grid[i]);
    return ip;
}

double cot_theta_psi0_derivative(const GeometryParams& g, double x) {
    double mu = psi_family_mu(g, g.qd());
    double lam = 3.0 * g.qd() * g.qd() - mu;
    double radicand = mu * x * x + lam / x;
    return 9.0 * lam * lam * (mu - 1.0) /
           (4.0 * std::sqrt(3.0) * x * x * std::pow(radicand, 1.5));
}

double phase_monotonicity_check(const GeometryParams& g, const InitialProfile& ip) {
    double worst = std::numeric_limits<double>::infinity();
    for (double x : ip.grid) worst = std::min(worst, cot_theta_psi0_derivative(g, x));
    return worst;
}

double ResultantCubic::scale_at(double t) const {
    double at = std::abs(t);
    return std::max(1.0, std::abs(a3) * at * at * at + std::abs(a2) * at * at +
                             std::abs(a1) * at + std::abs(a0));
}

CertificateResult resultant_certificate(const GeometryParams& g, const CriticalParams& cp) {
    if (g.n != 3) throw UnsupportedDimension("resultant certificate is for n = 3");
    const double xi = cp.xi, c = cp.c_xi, A = cp.A_xi;
    const double mu = psi_family_mu(g, xi);
    const double lam = 3.0 * xi * xi - mu;
    const double b3 = std::pow(g.bd(), 3);

    CertificateResult out;
    // R0(t) = (mu t + lam)^2((27c^2+18-mu)t - lam) + 27 t (c t - A)^2
    //         - 27 t (mu t + lam)((2c^2+3)t - 2cA)
    const double E = 27.0 * c * c + 18.0 - mu;
    ResultantCubic& R = out.cubic;
    R.a3 = mu * mu * E + 27.0 * c * c - 27.0 * (2.0 * c * c + 3.0) * mu;
    R.a2 = 2.0 * mu * lam * E - mu * mu * lam - 54.0 * c * A + 54.0 * c * A * mu -
           27.0 * (2.0 * c * c + 3.0) * lam;
    R.a1 = lam * lam * E - 2.0 * mu * lam * lam + 27.0 * A * A + 54.0 * c * A * lam;
    R.a0 = -lam * lam * lam;

    out.residual_at_1 = std::abs(R.eval(1.0)) / R.scale_at(1.0);
    out.residual_at_b3 = std::abs(R.eval(b3)) / R.scale_at(b3);

    // product of roots: 1 * b^3 * t3 = -a0/a3
    out.third_root_deflated = -R.a0 / (R.a3 * b3);

    const double denom = 27.0 * c * c * (mu - 1.0) * (mu - 1.0) -
                         mu * (mu - 9.0) * (mu - 9.0);
    const double denom_scale =
        std::abs(27.0 * c * c * (mu - 1.0) * (mu - 1.0)) + std::abs(mu * (mu - 9.0) * (mu - 9.0));
    if (std::abs(denom) <= 1e-12 * std::max(1.0, denom_scale)) {
        out.closed_form_used = false;
        out.third_root = out.third_root_deflated;
    } else {
        const double numer = 54.0 * c * (mu - 1.0) * (lam * c + A) -
                             3.0 * lam * (mu - 3.0) * (mu - 9.0);
        out.third_root = -b3 - 1.0 - numer / denom;
    }

    out.third_root_negative = out.third_root < 0.0;
    const double tol = 1e-9 * std::max(1.0, b3);
    out.no_interior_crossing = (out.third_root <= 1.0 + tol) || (out.third_root >= b3 - tol);

    // belt and braces: dense pointwise comparison psi^(xi) vs the xi-branch
    SlopeData sd;
    sd.s = xi; sd.c_s = c; sd.A_s = A;
    sd.vol_im = 0; // not used by branch_solve
    const std::size_t kDense = 10000;
    double max_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= kDense; ++i) {
        double x = 1.0 + (g.bd() - 1.0) * static_cast<double>(i) / kDense;
        double gap = psi_family_value(g, xi, x) - branch_solve(g, sd, x);
        max_gap = std::max(max_gap, gap);
    }
    out.dense_grid_max_gap = max_gap;
    out.ok = out.no_interior_crossing && max_gap < 1e-9;
    return out;
}

} // namespace dhym
