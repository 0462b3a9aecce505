#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dhym/rational.hpp"

namespace dhym {

// The triple (Bl_{x0}P^n, alpha, beta) with beta = b[H]-[E] and
// alpha = p[H]-q[E]. Values are stored exactly; `exact` records whether they
// came in as rationals (so slopes and witnesses may be reported as fractions).
struct GeometryParams {
    int n = 3;
    Rational b{3};
    Rational p{18};
    Rational q{3};
    bool exact = true;

    double bd() const { return to_double(b); }
    double pd() const { return to_double(p); }
    double qd() const { return to_double(q); }

    static GeometryParams make(int n, const Rational& b, const Rational& p, const Rational& q,
                               bool exact = true);
    static GeometryParams make(int n, double b, double p, double q);
};

struct SlopeData {
    double s = 0;
    double c_s = 0;
    double A_s = 0;
    double vol_im = 0; // Im(alpha_s + i beta)^n
};

struct ExactSlope {
    Rational s;
    Rational c_s;
    Rational A_s;
    Rational vol_im;
};

enum class Verdict {
    Stable,
    Semistable,
    UnstableFirstKind,
    UnstableSecondKind,
    UnstableNonpositiveQ,
};

std::string verdict_name(Verdict v);

struct Witness {
    int k;
    double p_side; // Re(p+ib)^k - c_q Im(p+ib)^k
    double q_side; // Re(q+i)^k  - c_q Im(q+i)^k
};

struct StabilityReport {
    Verdict verdict;
    std::vector<Witness> witnesses; // k = 1..n-1
    double threshold; // c_q + sqrt(1+c_q^2)
    double c_q;
    std::optional<Rational> c_q_exact; // set when geometry is exact
};

// ((p+ib)^k, (s+i)^k): the pairings (alpha_s+i beta)^k.H^{n-k} and
// (alpha_s+i beta)^k.(-1)^{n-k-1}E^{n-k}.
std::pair<std::complex<double>, std::complex<double>>
complex_power_pair(const GeometryParams& g, double s, int k);

std::pair<GaussianRational, GaussianRational>
complex_power_pair_exact(const GeometryParams& g, const Rational& s, int k);

SlopeData slope(const GeometryParams& g, double s);
ExactSlope slope_exact(const GeometryParams& g, const Rational& s);

// Closed-form dc_s/ds; matches a central difference of `slope`.
double slope_derivative(const GeometryParams& g, double s);

// Relative residuals of the two intersection identities at power k.
std::pair<double, double> check_identities(const GeometryParams& g, double s, int k);

StabilityReport classify(const GeometryParams& g);

// (b_star, b_upper_star) bounding the first/second-kind regions on p = 2bq.
std::pair<double, double> unstability_thresholds(double b);

} // namespace dhym
