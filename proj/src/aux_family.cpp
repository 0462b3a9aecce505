#include "dhym/aux_family.hpp"

#include <algorithm>
#include <cmath>

namespace dhym {

double FPolynomial::eval(double s) const {
    double acc = 0;
    for (double c : coeffs) acc = acc * s + c;
    return acc;
}

double FPolynomial::deriv(double s) const {
    const int deg = static_cast<int>(coeffs.size()) - 1;
    double acc = 0;
    for (int i = 0; i < deg; ++i) acc = acc * s + coeffs[i] * (deg - i);
    return acc;
}

Rational FPolynomial::eval_exact(const Rational& s) const {
    Rational acc = 0;
    for (const Rational& c : coeffs_exact) acc = acc * s + c;
    return acc;
}

double FPolynomial::scale_at(double s) const {
    const int deg = static_cast<int>(coeffs.size()) - 1;
    double acc = 0, pw = 1;
    for (int i = deg; i >= 0; --i) { acc += std::abs(coeffs[i]) * pw; pw *= std::abs(s); }
    return std::max(1.0, acc);
}

FPolynomial build_F(const GeometryParams& g) {
    if (g.n != 2 && g.n != 3)
        throw UnsupportedDimension("F/xi machinery is defined for n = 2, 3 only");
    FPolynomial F;
    F.n = g.n;
    const Rational& p = g.p;
    const Rational& b = g.b;
    if (g.n == 2) {
        // Im((s-i)((p+ib)^2-(s+i)^2)) = -s^2 + 2pb s - (p^2 - b^2 + 1)
        F.coeffs_exact = {Rational(-1), 2 * p * b, -(p * p - b * b + 1)};
    } else {
        // -s^4 + (3p^2 b - b^3 - 2) s^2 - 2p(p^2-3b^2) s - (3p^2 b - b^3 + 1)
        Rational m = 3 * p * p * b - b * b * b;
        F.coeffs_exact = {Rational(-1), Rational(0), m - 2, -2 * p * (p * p - 3 * b * b),
                          -(m + 1)};
    }
    F.coeffs.reserve(F.coeffs_exact.size());
    for (const Rational& c : F.coeffs_exact) F.coeffs.push_back(to_double(c));
    return F;
}

namespace {

double p_star_of(const GeometryParams& g) {
    double p = g.pd(), b = g.bd();
    if (g.n == 2) return b * p;
    double vol_zero = std::sqrt((3 * p * p * b - b * b * b + 1) / 3.0);
    return std::min(p / b, vol_zero);
}

// Bisection on a sign bracket followed by Newton polish.
double refine_root(const FPolynomial& F, double lo, double hi) {
    double flo = F.eval(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = F.eval(mid);
        if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; }
        else hi = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
        double f = F.eval(x), d = F.deriv(x);
        if (d == 0) break;
        double nx = x - f / d;
        if (nx <= lo || nx >= hi) break; // keep the bracket
        x = nx;
    }
    return x;
}

} // namespace

CriticalParams find_xi(const GeometryParams& g) {
    if (!(g.qd() > 0)) throw ValidationError("find_xi needs q > 0");
    FPolynomial F = build_F(g);
    CriticalParams cp;
    cp.p_star = p_star_of(g);
    const double q = g.qd();
    if (!(q < cp.p_star))
        throw ValidationError("find_xi needs q < p_star");

    double Fq = F.eval(q);
    double fscale = F.scale_at(q);
    if (Fq > 1e-12 * fscale)
        throw NoRootInBracket("F(q) > 0: triple appears dHYM stable, no xi in (q, p_star)");

    double xi = q;
    if (Fq < -1e-12 * fscale) {
        // scan for the first sign change, then bisect
        const int kScan = 4096;
        double lo = q, hi = cp.p_star;
        double prev = Fq, root_lo = q, root_hi = cp.p_star;
        bool found = false;
        for (int i = 1; i <= kScan; ++i) {
            double s = q + (cp.p_star - q) * i / kScan;
            double fs = F.eval(s);
            if (prev < 0 && fs >= 0) { root_lo = q + (cp.p_star - q) * (i - 1) / kScan; root_hi = s; found = true; break; }
            prev = fs;
        }
        if (!found)
            throw NoRootInBracket("no sign change of F in (q, p_star)");
        (void)lo; (void)hi;
        xi = refine_root(F, root_lo, root_hi);
    }

    cp.xi = xi;
    if (g.n == 3) {
        cp.c_xi = (xi * xi - 1.0) / (2.0 * xi);
        cp.A_xi = -(xi * xi + 1.0) * (xi * xi + 1.0) / (2.0 * xi);
    } else {
        SlopeData sd = slope(g, xi);
        cp.c_xi = sd.c_s;
        cp.A_xi = sd.A_s;
        // closed form bp - sqrt((b^2-1)(p^2+1)) is exact for n = 2
        double b = g.bd(), p = g.pd();
        double closed = b * p - std::sqrt((b * b - 1.0) * (p * p + 1.0));
        if (std::abs(xi - closed) > 1e-8 * std::max(1.0, std::abs(closed)))
            throw Error("n=2 xi root disagrees with the closed form");
    }
    cp.xi_prime = (g.n == 3) ? find_xi_prime(g, cp) : g.bd() * g.pd();
    return cp;
}

double find_xi_prime(const GeometryParams& g, const CriticalParams& cp) {
    if (g.n != 3) throw UnsupportedDimension("xi_prime is defined for n = 3");
    auto H = [&](double s) { return s * s - 1.0 - 2.0 * s * slope(g, s).c_s; };
    const int kScan = 4096;
    const double eps = 1e-9 * std::max(1.0, cp.p_star);
    double lo = cp.xi + eps;
    if (lo >= cp.p_star) return cp.p_star;
    double prev = H(lo), s_prev = lo;
    for (int i = 1; i <= kScan; ++i) {
        double s = lo + (cp.p_star - lo) * i / kScan;
        double hs = H(s);
        if (prev > 0 && hs <= 0) {
            // bisect the crossing
            double a = s_prev, c = s;
            for (int it = 0; it < 100; ++it) {
                double mid = 0.5 * (a + c);
                if (H(mid) > 0) a = mid; else c = mid;
            }
            return 0.5 * (a + c);
        }
        prev = hs; s_prev = s;
    }
    return cp.p_star;
}

double branch_solve(const GeometryParams& g, const SlopeData& sd, double x,
                    bool expect_real_triple) {
    if (g.n != 3) throw UnsupportedDimension("branch_solve implements the n = 3 cubic");
    const double c = sd.c_s, A = sd.A_s;
    const double R1 = -3.0 * (c * c + 1.0) * x * x;
    const double R2 = -2.0 * c * (c * c + 1.0) * x * x * x - A;
    const double disc = -(4.0 * R1 * R1 * R1 + 27.0 * R2 * R2);
    const double dscale = std::max(1.0, std::abs(4.0 * R1 * R1 * R1) + 27.0 * R2 * R2);
    if (disc < -1e-12 * dscale) {
        if (expect_real_triple)
            throw NegativeDiscriminant("cubic discriminant negative at x = " +
                                       std::to_string(x));
        // one real root (Cardano); R1 < 0 always, so use the hyperbolic form
        const double m = 2.0 * std::sqrt(-R1 / 3.0);
        const double arg = -3.0 * std::abs(R2) / (R1 * m); // >= 1 here
        const double t = m * std::cosh(std::acosh(arg) / 3.0);
        const double Psi = (R2 > 0 ? -t : t);
        return Psi + c * x;
    }
    // three real roots; the largest is m*cos(phi/3) with the clamped argument
    const double m = 2.0 * std::sqrt(-R1 / 3.0);
    double arg = 3.0 * R2 / (R1 * m);
    if (std::abs(arg) >= 1.0 - 4e-15) {
        // at the double root itself the factored form {a, a, -2a}, 2a^3 = R2,
        // avoids the sqrt sensitivity of acos at +-1
        const double a = std::cbrt(std::abs(R2) / 2.0);
        const double Psi = (R2 >= 0) ? a : 2.0 * a;
        return Psi + c * x;
    }
    arg = std::clamp(arg, -1.0, 1.0);
    const double Psi = m * std::cos(std::acos(arg) / 3.0);
    return Psi + c * x;
}

double discriminant(const GeometryParams& g, const CriticalParams& cp, double x) {
    if (g.n != 3) throw UnsupportedDimension("discriminant formula is for n = 3");
    const double c = cp.c_xi, xi = cp.xi;
    const double t = c * c + 1.0;
    const double x3 = x * x * x;
    return 108.0 * t * t * (x3 * x3 + 2.0 * xi * c * x3 - xi * xi);
}

BranchProfile branch_profile(const GeometryParams& g, const SlopeData& sd,
                             const std::vector<double>& grid) {
    BranchProfile out;
    out.s = sd.s;
    out.slope_at = sd.c_s;
    out.calib = sd.A_s;
    out.grid = grid;
    out.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.values[i] = branch_solve(g, sd, grid[i]);
    return out;
}

bool branch_family_monotone(const GeometryParams& g, double s1, double s2,
                            const std::vector<double>& grid) {
    if (s1 == s2) return true;
    SlopeData a = slope(g, s1), c = slope(g, s2);
    for (double x : grid) {
        if (x <= grid.front() || x >= grid.back()) continue; // endpoints coincide at x=b
        if (!(branch_solve(g, a, x) < branch_solve(g, c, x))) return false;
    }
    return true;
}

double ode_residual(const BranchProfile& profile, int n, double delta) {
    const auto& x = profile.grid;
    const auto& v = profile.values;
    if (x.size() < 3) throw ValidationError("ode_residual needs at least 3 grid points");
    const double h = x[1] - x[0];
    double worst = 0;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (x[i] < x.front() + delta) continue;
        double d1 = (v[i + 1] - v[i - 1]) / (2 * h);
        double d2 = (v[i + 1] - 2 * v[i] + v[i - 1]) / (h * h);
        double res = (x[i] * x[i] + v[i] * v[i]) * d2 +
                     (n - 1) * (1 + d1 * d1) * (x[i] * d1 - v[i]);
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

std::vector<double> uniform_grid(double a, double b, std::size_t points) {
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1);
    g.back() = b;
    return g;
}

} // namespace dhym
