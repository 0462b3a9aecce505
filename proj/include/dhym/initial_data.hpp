#pragma once

#include <array>
#include <vector>

#include "dhym/aux_family.hpp"

namespace dhym {

// psi0(x) = sqrt(mu x^2 + lam/x)/sqrt(3) with
//   mu = 3(p^2 b - q^2)/(b^3-1),  lam = 3 q^2 - mu.
struct InitialProfile {
    double mu = 0;
    double lam = 0;
    std::vector<double> grid;
    std::vector<double> values;
};

double psi_family_mu(const GeometryParams& g, double s);
double psi_family_value(const GeometryParams& g, double s, double x);
double psi_family_derivative(const GeometryParams& g, double s, double x);

// The s = q member. Throws IllPosed when 3q^2 >= 3p^2 b - b^3 + 1 (mu <= 1).
InitialProfile build_psi0(const GeometryParams& g, const std::vector<double>& grid);

// min over the grid of the closed form
//   (cot theta_{psi0})' = 9 lam^2 (mu-1) / (4 sqrt(3) x^2) * (mu x^2 + lam/x)^{-3/2}
double phase_monotonicity_check(const GeometryParams& g, const InitialProfile& ip);
double cot_theta_psi0_derivative(const GeometryParams& g, double x);

struct ResultantCubic {
    // a3 t^3 + a2 t^2 + a1 t + a0 in t = x^3
    double a3 = 0, a2 = 0, a1 = 0, a0 = 0;
    double eval(double t) const { return ((a3 * t + a2) * t + a1) * t + a0; }
    double scale_at(double t) const;
};

struct CertificateResult {
    ResultantCubic cubic;
    double residual_at_1 = 0;      // |R0(1)| relative
    double residual_at_b3 = 0;     // |R0(b^3)| relative
    double third_root = 0;         // closed form (or deflation on pole)
    double third_root_deflated = 0;
    bool closed_form_used = true;
    bool third_root_negative = false;
    bool no_interior_crossing = false; // third root outside (1, b^3)
    double dense_grid_max_gap = 0;     // max over fine grid of psi^(xi) - branch
    bool ok = false;                   // no crossing and dense-grid gap < 1e-9
};

// Builds R0 from its displayed coefficient expression, verifies tau = 1 and
// tau = b^3 are roots, locates the third root by closed form and deflation,
// and runs the dense-grid comparison of psi^(xi) against the xi-branch.
CertificateResult resultant_certificate(const GeometryParams& g, const CriticalParams& cp);

} // namespace dhym
