#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <optional>
#include <string>

#include "dhym/errors.hpp"

namespace dhym {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return static_cast<double>(r); }

// Gaussian rational z = re + i*im with exact arithmetic. Only the handful of
// operations the intersection formulae need.
struct GaussianRational {
    Rational re;
    Rational im;

    GaussianRational() = default;
    GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    GaussianRational operator*(const GaussianRational& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    GaussianRational operator-(const GaussianRational& o) const {
        return {re - o.re, im - o.im};
    }
    GaussianRational conj() const { return {re, -im}; }

    std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }
};

inline GaussianRational gpow(const GaussianRational& z, int k) {
    GaussianRational acc{Rational(1), Rational(0)};
    for (int i = 0; i < k; ++i) acc = acc * z;
    return acc;
}

// Parses "a/b", integers, and plain decimals ("2.5" -> 5/2) exactly.
inline Rational parse_rational(const std::string& text) {
    using boost::multiprecision::cpp_int;
    std::string s = text;
    if (s.empty()) throw ValidationError("empty numeric literal");
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            Rational num(s.substr(0, slash));
            Rational den(s.substr(slash + 1));
            if (den == 0) throw ValidationError("zero denominator in '" + text + "'");
            return num / den;
        }
        auto dot = s.find('.');
        if (dot == std::string::npos) return Rational(s);
        std::string head = s.substr(0, dot);
        std::string frac = s.substr(dot + 1);
        bool neg = !head.empty() && head[0] == '-';
        if (head == "-" || head.empty()) head = "0";
        Rational value(head);
        if (!frac.empty()) {
            cpp_int scale = 1;
            for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
            Rational tail = Rational(cpp_int(frac)) / Rational(scale);
            value += neg ? -tail : tail;
        }
        return value;
    } catch (const std::exception&) {
        throw ValidationError("cannot parse numeric literal '" + text + "'");
    }
}

inline std::string rational_string(const Rational& r) {
    return r.str();
}

} // namespace dhym
