#include "dhym/cohomology.hpp"

#include <cmath>

namespace dhym {

GeometryParams GeometryParams::make(int n, const Rational& b, const Rational& p,
                                    const Rational& q, bool exact) {
    if (n < 2) throw ValidationError("dimension n must be >= 2");
    if (!(b > 1)) throw ValidationError("beta = b[H]-[E] is Kahler only for b > 1");
    GeometryParams g;
    g.n = n;
    g.b = b;
    g.p = p;
    g.q = q;
    g.exact = exact;
    return g;
}

GeometryParams GeometryParams::make(int n, double b, double p, double q) {
    // doubles convert exactly, but we do not advertise them as exact inputs
    return make(n, Rational(b), Rational(p), Rational(q), false);
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "Stable";
        case Verdict::Semistable: return "Semistable";
        case Verdict::UnstableFirstKind: return "UnstableFirstKind";
        case Verdict::UnstableSecondKind: return "UnstableSecondKind";
        case Verdict::UnstableNonpositiveQ: return "UnstableNonpositiveQ";
    }
    return "?";
}

std::pair<std::complex<double>, std::complex<double>>
complex_power_pair(const GeometryParams& g, double s, int k) {
    if (k < 1 || k > g.n) throw ValidationError("power k must satisfy 1 <= k <= n");
    std::complex<double> zp(g.pd(), g.bd());
    std::complex<double> zs(s, 1.0);
    std::complex<double> wp(1.0, 0.0), ws(1.0, 0.0);
    for (int i = 0; i < k; ++i) { wp *= zp; ws *= zs; }
    return {wp, ws};
}

std::pair<GaussianRational, GaussianRational>
complex_power_pair_exact(const GeometryParams& g, const Rational& s, int k) {
    if (k < 1 || k > g.n) throw ValidationError("power k must satisfy 1 <= k <= n");
    GaussianRational zp{g.p, g.b};
    GaussianRational zs{s, Rational(1)};
    return {gpow(zp, k), gpow(zs, k)};
}

ExactSlope slope_exact(const GeometryParams& g, const Rational& s) {
    auto [wp, ws] = complex_power_pair_exact(g, s, g.n);
    Rational vol = wp.im - ws.im;
    if (vol == 0)
        throw DegenerateVolume("Im(alpha_s + i beta)^n = 0 at s = " + rational_string(s));
    ExactSlope out;
    out.s = s;
    out.vol_im = vol;
    out.c_s = (wp.re - ws.re) / vol;
    out.A_s = wp.re - out.c_s * wp.im;
    return out;
}

SlopeData slope(const GeometryParams& g, double s) {
    auto [wp, ws] = complex_power_pair(g, s, g.n);
    double vol = wp.imag() - ws.imag();
    double scale = std::abs(wp.imag()) + std::abs(ws.imag());
    if (std::abs(vol) <= 1e-14 * std::max(1.0, scale))
        throw DegenerateVolume("Im(alpha_s + i beta)^n vanishes at s = " + std::to_string(s));
    SlopeData out;
    out.s = s;
    out.vol_im = vol;
    out.c_s = (wp.real() - ws.real()) / vol;
    out.A_s = wp.real() - out.c_s * wp.imag();
    return out;
}

double slope_derivative(const GeometryParams& g, double s) {
    SlopeData sd = slope(g, s);
    auto [wp_k, ws_k] = complex_power_pair(g, s, g.n - 1);
    (void)wp_k;
    double numer = ws_k.real() - sd.c_s * ws_k.imag();
    return -static_cast<double>(g.n) * numer / sd.vol_im;
}

std::pair<double, double> check_identities(const GeometryParams& g, double s, int k) {
    SlopeData sd = slope(g, s);
    auto [wp_k, ws_k] = complex_power_pair(g, s, k);
    auto [wp_n, ws_n] = complex_power_pair(g, s, g.n);
    std::complex<double> diff_n = wp_n - ws_n;

    double lhs1 = (wp_k.real() - sd.c_s * wp_k.imag()) * sd.vol_im;
    double rhs1 = std::imag(std::conj(wp_k) * diff_n);
    double lhs2 = (ws_k.real() - sd.c_s * ws_k.imag()) * sd.vol_im;
    double rhs2 = std::imag(std::conj(ws_k) * diff_n);

    double scale1 = std::max({1.0, std::abs(lhs1), std::abs(rhs1)});
    double scale2 = std::max({1.0, std::abs(lhs2), std::abs(rhs2)});
    return {std::abs(lhs1 - rhs1) / scale1, std::abs(lhs2 - rhs2) / scale2};
}

namespace {

// Exact-path classification; every comparison is a rational decision.
// q > c_q + sqrt(1+c_q^2) is decided via q > c_q and (q-c_q)^2 > 1+c_q^2.
StabilityReport classify_exact(const GeometryParams& g) {
    ExactSlope sq = slope_exact(g, g.q);
    if (sq.vol_im <= 0)
        throw SupercriticalViolation("Im(alpha + i beta)^n <= 0: phase not supercritical");

    StabilityReport rep;
    rep.c_q_exact = sq.c_s;
    rep.c_q = to_double(sq.c_s);
    double cq = rep.c_q;
    rep.threshold = cq + std::sqrt(1.0 + cq * cq);

    bool all_pos = true, any_neg = false;
    for (int k = 1; k <= g.n - 1; ++k) {
        auto [wp, ws] = complex_power_pair_exact(g, g.q, k);
        Rational wpv = wp.re - sq.c_s * wp.im;
        Rational wsv = ws.re - sq.c_s * ws.im;
        rep.witnesses.push_back({k, to_double(wpv), to_double(wsv)});
        if (wpv <= 0 || wsv <= 0) all_pos = false;
        if (wpv < 0 || wsv < 0) any_neg = true;
    }

    if (all_pos) rep.verdict = Verdict::Stable;
    else if (!any_neg) rep.verdict = Verdict::Semistable;
    else if (g.q <= 0) rep.verdict = Verdict::UnstableNonpositiveQ;
    else if (g.q <= sq.c_s) rep.verdict = Verdict::UnstableSecondKind;
    else rep.verdict = Verdict::UnstableFirstKind;
    return rep;
}

StabilityReport classify_float(const GeometryParams& g) {
    SlopeData sq = slope(g, g.qd());
    if (sq.vol_im <= 0)
        throw SupercriticalViolation("Im(alpha + i beta)^n <= 0: phase not supercritical");

    StabilityReport rep;
    rep.c_q = sq.c_s;
    rep.threshold = sq.c_s + std::sqrt(1.0 + sq.c_s * sq.c_s);

    const double tol = 1e-12;
    bool all_pos = true, any_neg = false;
    for (int k = 1; k <= g.n - 1; ++k) {
        auto [wp, ws] = complex_power_pair(g, g.qd(), k);
        double wpv = wp.real() - sq.c_s * wp.imag();
        double wsv = ws.real() - sq.c_s * ws.imag();
        rep.witnesses.push_back({k, wpv, wsv});
        if (wpv <= tol || wsv <= tol) all_pos = false;
        if (wpv < -tol || wsv < -tol) any_neg = true;
    }

    if (all_pos) rep.verdict = Verdict::Stable;
    else if (!any_neg) rep.verdict = Verdict::Semistable;
    else if (g.qd() <= 0) rep.verdict = Verdict::UnstableNonpositiveQ;
    else if (g.qd() <= sq.c_s) rep.verdict = Verdict::UnstableSecondKind;
    else rep.verdict = Verdict::UnstableFirstKind;
    return rep;
}

} // namespace

StabilityReport classify(const GeometryParams& g) {
    return g.exact ? classify_exact(g) : classify_float(g);
}

std::pair<double, double> unstability_thresholds(double b) {
    if (!(b > 1)) throw ValidationError("thresholds need b > 1");
    double b3 = b * b * b;
    double b_star = std::sqrt((std::sqrt(b3 * (17.0 * b3 - 1.0)) - b3 - 2.0) /
                              (2.0 * (4.0 * b3 + 1.0)));
    double b_upper = std::sqrt(3.0 * (2.0 * b3 - 1.0) / (8.0 * b3 - 1.0));
    return {b_star, b_upper};
}

} // namespace dhym
