#pragma once

#include <vector>

#include "dhym/cohomology.hpp"

namespace dhym {

// F(s) = Im((s-i)^{n-1}((p+ib)^n - (s+i)^n)), stored dense in descending
// degree. Coefficients are exact; a double mirror is kept for evaluation.
struct FPolynomial {
    int n = 3;
    std::vector<Rational> coeffs_exact; // size 2n-1, descending
    std::vector<double> coeffs;

    double eval(double s) const;
    double deriv(double s) const;
    Rational eval_exact(const Rational& s) const;
    // magnitude scale used for residual tolerances at s
    double scale_at(double s) const;
};

FPolynomial build_F(const GeometryParams& g);

struct CriticalParams {
    double xi = 0;
    double xi_prime = 0;
    double c_xi = 0;
    double A_xi = 0;
    double p_star = 0;
};

// Root of F in (q, p_star) plus the derived constants. Semistable input gives
// xi = q; a stable triple has no sign change and throws NoRootInBracket.
CriticalParams find_xi(const GeometryParams& g);

// Largest s <= p_star with s^2 - 1 - 2 s c_s > 0 throughout (xi, s). n = 3.
double find_xi_prime(const GeometryParams& g, const CriticalParams& cp);

// Level-set branch value at x: largest real root of
//   psi^3 - 3 c_s x psi^2 - 3 x^2 psi + c_s x^3 - A_s = 0   (n = 3).
// Positive discriminant takes the trigonometric three-real-root form; a
// negative one falls back to the single Cardano root unless the caller
// demands the triple-root regime (s = xi has Delta >= 0 on [1,b], so a
// negative value there signals inconsistent inputs).
double branch_solve(const GeometryParams& g, const SlopeData& sd, double x,
                    bool expect_real_triple = false);

// Discriminant of the depressed cubic at parameter xi:
//   108 (c_xi^2+1)^2 (x^6 + 2 xi c_xi x^3 - xi^2).
double discriminant(const GeometryParams& g, const CriticalParams& cp, double x);

struct BranchProfile {
    double s = 0;
    double slope_at = 0; // c_s
    double calib = 0;    // A_s
    std::vector<double> grid;
    std::vector<double> values;
};

BranchProfile branch_profile(const GeometryParams& g, const SlopeData& sd,
                             const std::vector<double>& grid);

bool branch_family_monotone(const GeometryParams& g, double s1, double s2,
                            const std::vector<double>& grid);

// Max finite-difference residual of (x^2+psi^2)psi'' + (n-1)(1+psi'^2)(x psi' - psi)
// over the interior, excluding the collar [1, 1+delta].
double ode_residual(const BranchProfile& profile, int n, double delta = 0.05);

std::vector<double> uniform_grid(double a, double b, std::size_t points);

} // namespace dhym
