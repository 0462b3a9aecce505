#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dhym/cohomology.hpp"
#include "oracles.hpp"

using namespace dhym;

namespace {
GeometryParams flagship() {
    return GeometryParams::make(3, Rational(3), Rational(18), Rational(3), true);
}
} // namespace

TEST_CASE("complex_power_pair matches direct complex arithmetic") {
    GeometryParams g = flagship();
    auto [wp, ws] = complex_power_pair(g, 3.0, 3);
    // (18+3i)^3 = 5346 + 2889i, (3+i)^3 = 18 + 26i
    CHECK(wp.real() == doctest::Approx(5346.0));
    CHECK(wp.imag() == doctest::Approx(2889.0));
    CHECK(ws.real() == doctest::Approx(18.0));
    CHECK(ws.imag() == doctest::Approx(26.0));
    CHECK(wp.imag() - ws.imag() > 0); // theta-hat well defined

    auto [wp1, ws1] = complex_power_pair(g, 7.5, 1);
    CHECK(wp1 == std::complex<double>(18.0, 3.0));
    CHECK(ws1 == std::complex<double>(7.5, 1.0));

    GeometryParams g2 = GeometryParams::make(2, Rational(2), Rational(3), Rational(1), true);
    auto [a, b2] = complex_power_pair(g2, 1.0, 2);
    CHECK(a == std::complex<double>(5.0, 12.0));
    CHECK(b2.real() == doctest::Approx(0.0));
    CHECK(b2.imag() == doctest::Approx(2.0));
}

TEST_CASE("exact slope reproduces the flagship fraction") {
    GeometryParams g = flagship();
    ExactSlope es = slope_exact(g, Rational(3));
    CHECK(es.c_s == Rational(5328, 2863));
    CHECK(es.vol_im == Rational(2863));
    SlopeData sd = slope(g, 3.0);
    CHECK(std::abs(sd.c_s - 5328.0 / 2863.0) < 1e-12);
    // A_s from both sides
    auto [wp, ws] = complex_power_pair(g, 3.0, 3);
    double a_p = wp.real() - sd.c_s * wp.imag();
    double a_q = ws.real() - sd.c_s * ws.imag();
    CHECK(std::abs(a_p - a_q) < 1e-12 * std::max(1.0, std::abs(a_p)));
    CHECK(sd.A_s == doctest::Approx(a_p));
}

TEST_CASE("slope handles the n=2 sample and degenerate volume") {
    GeometryParams g = GeometryParams::make(2, Rational(2), Rational(3), Rational(1), true);
    SlopeData sd = slope(g, 3.0);
    CHECK(sd.c_s == doctest::Approx(-0.5)); // (5-8)/(12-6)
    // Im(alpha_s+i beta)^2 = 2(pb - s) vanishes at s = pb
    CHECK_THROWS_AS(slope(g, 6.0), DegenerateVolume);
}

TEST_CASE("slope derivative: closed form vs central difference, and sign at q") {
    GeometryParams g = flagship();
    // at s = q = 3 the family slope is increasing toward xi
    CHECK(slope_derivative(g, 3.0) > 0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.2, 5.8);
    for (int t = 0; t < 10; ++t) {
        double s = u(rng);
        if (std::abs(slope(g, s).vol_im) < 1e-6) continue;
        double fd = oracle::central_diff([&](double v) { return slope(g, v).c_s; }, s, 1e-5);
        double cf = slope_derivative(g, s);
        CHECK(std::abs(fd - cf) <= 1e-6 * std::max(1.0, std::abs(cf)));
    }
}

TEST_CASE("intersection identities hold at rational and random points") {
    GeometryParams g = flagship();
    auto [r1, r2] = check_identities(g, 3.0, 2);
    CHECK(r1 < 1e-9);
    CHECK(r2 < 1e-9);

    // k = n: first identity reduces to A_s vol = Im((p-ib)^n ((p+ib)^n-(s+i)^n))
    SlopeData sd = slope(g, 3.0);
    auto [wpn, wsn] = complex_power_pair(g, 3.0, 3);
    double lhs = sd.A_s * sd.vol_im;
    double rhs = std::imag(std::conj(wpn) * (wpn - wsn));
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(lhs)));

    // s = p with b arbitrary, k = 1
    GeometryParams g2 = GeometryParams::make(3, Rational(7, 2), Rational(18), Rational(3), true);
    auto [q1, q2] = check_identities(g2, 18.0, 1);
    CHECK(q1 < 1e-9);
    CHECK(q2 < 1e-9);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.3, 5.5);
    for (int t = 0; t < 100; ++t) {
        double s = u(rng);
        int k = 1 + int(t % 3);
        auto [e1, e2] = check_identities(g, s, k);
        CHECK(e1 < 1e-9);
        CHECK(e2 < 1e-9);
    }
}

TEST_CASE("classifier resolves the three flagship-family instances") {
    StabilityReport a = classify(flagship());
    CHECK(a.verdict == Verdict::UnstableFirstKind);
    CHECK(a.c_q_exact.has_value());
    CHECK(*a.c_q_exact == Rational(5328, 2863));
    CHECK(a.threshold == doctest::Approx(3.9736290820813281).epsilon(1e-12));
    CHECK(a.threshold > 3.0);
    CHECK(a.c_q < 3.0);

    StabilityReport b =
        classify(GeometryParams::make(3, Rational(3), Rational(99), Rational(11), true));
    CHECK(b.verdict == Verdict::UnstableSecondKind);
    CHECK(b.c_q >= 11.0);

    StabilityReport c =
        classify(GeometryParams::make(3, Rational(3), Rational(18), Rational(12), true));
    CHECK(c.verdict == Verdict::Stable);

    StabilityReport d =
        classify(GeometryParams::make(3, Rational(3), Rational(18), Rational(-1), true));
    CHECK(d.verdict == Verdict::UnstableNonpositiveQ);
}

TEST_CASE("classifier demands the supercritical normalization") {
    // Im(alpha+i beta)^3 = 3p^2 b - b^3 - 3q^2 + 1 < 0 for tiny p, large q
    CHECK_THROWS_AS(classify(GeometryParams::make(3, Rational(3), Rational(1), Rational(2), true)),
                    SupercriticalViolation);
}

TEST_CASE("classifier agrees with brute-force witnesses across a random sweep") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ub(1.1, 4.0), up(0.5, 30.0), uq(0.05, 6.0);
    int checked = 0;
    for (int t = 0; t < 1000; ++t) {
        double b = ub(rng), p = up(rng), q = uq(rng);
        GeometryParams g = GeometryParams::make(3, b, p, q);
        StabilityReport rep;
        try {
            rep = classify(g);
        } catch (const SupercriticalViolation&) {
            continue;
        }
        bool stable = oracle::brute_force_stable(3, b, p, q, rep.c_q);
        CHECK(stable == (rep.verdict == Verdict::Stable));
        // the H-side inequality comes for free when q > 0 (supercritical)
        CHECK(p > b * rep.threshold - 1e-9 * std::max(1.0, b * rep.threshold));
        ++checked;
    }
    CHECK(checked > 500);
}

TEST_CASE("second-kind boundary: verdict flips exactly at q = c_q") {
    // on p = 3bq the second kind occurs for q >= sqrt(4b^3-1)
    double b = 3.0;
    double qc = std::sqrt(4 * b * b * b - 1.0);
    GeometryParams lo = GeometryParams::make(3, b, 3 * b * (qc - 0.05), qc - 0.05);
    GeometryParams hi = GeometryParams::make(3, b, 3 * b * (qc + 0.05), qc + 0.05);
    CHECK(classify(lo).verdict == Verdict::UnstableFirstKind);
    CHECK(classify(hi).verdict == Verdict::UnstableSecondKind);
}

TEST_CASE("unstability thresholds at b = 3 and the general chain") {
    auto [bs, bu] = unstability_thresholds(3.0);
    CHECK(bs == doctest::Approx(std::sqrt((std::sqrt(12366.0) - 29.0) / 218.0)).epsilon(1e-14));
    CHECK(bs == doctest::Approx(0.61406495621).epsilon(1e-9));
    CHECK(bu == doctest::Approx(std::sqrt(159.0 / 215.0)).epsilon(1e-14));
    CHECK(bu == doctest::Approx(0.85996214086).epsilon(1e-9));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ub(1.01, 6.0);
    for (int t = 0; t < 50; ++t) {
        double b = ub(rng);
        auto [s, u] = unstability_thresholds(b);
        double lower = std::sqrt((b * b * b - 1) / (3 * (4 * b * b * b - 1)));
        CHECK(lower < s);
        CHECK(s < u);
        CHECK(u < 1.0);
    }
}

TEST_CASE("G(p,q,b) expansion identity") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.5, 6.0);
    for (int t = 0; t < 50; ++t) {
        double p = 3 * u(rng), q = u(rng), b = 1.0 + u(rng);
        std::complex<double> zp(p, b), zq(q, 1.0);
        double direct = std::imag(std::conj(zp) * std::conj(zp) *
                                  (zp * zp * zp - zq * zq * zq));
        double expanded = b * std::pow(p, 4) + p * p * (2 * b * b * b - 3 * q * q + 1) +
                          2 * p * b * q * (q * q - 3) +
                          b * b * (b * b * b + 3 * q * q - 1);
        CHECK(direct == doctest::Approx(expanded).epsilon(1e-12));
    }
}

TEST_CASE("rational parsing round-trips fractions and decimals") {
    CHECK(parse_rational("5328/2863") == Rational(5328, 2863));
    CHECK(parse_rational("3") == Rational(3));
    CHECK(parse_rational("2.5") == Rational(5, 2));
    CHECK(parse_rational("-0.125") == Rational(-1, 8));
    CHECK_THROWS_AS(parse_rational("1/0"), ValidationError);
    CHECK_THROWS_AS(parse_rational("abc"), ValidationError);
}

TEST_CASE("geometry validation") {
    CHECK_THROWS_AS(GeometryParams::make(3, Rational(1), Rational(18), Rational(3), true),
                    ValidationError);
    CHECK_THROWS_AS(GeometryParams::make(1, Rational(3), Rational(18), Rational(3), true),
                    ValidationError);
}
