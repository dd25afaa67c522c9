#pragma once

// Exact rational numbers backed by Boost.Multiprecision.
//
// Every probability, distance and roughness degree in the library is a
// Rational. Values are always in lowest terms with a positive denominator
// (guaranteed by cpp_rational).

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace roughlab {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline Rational make_rational(std::int64_t p, std::int64_t q = 1) {
    if (q == 0) throw std::domain_error("rational with zero denominator");
    return Rational(Integer(p), Integer(q));
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline int sign(const Rational& q) { return q < 0 ? -1 : (q > 0 ? 1 : 0); }

/// Integer power with a possibly negative exponent.
inline Rational pow(const Rational& base, std::int64_t exponent) {
    if (exponent == 0) return Rational(1);
    if (exponent < 0) {
        if (base == 0) throw std::domain_error("zero raised to a negative power");
        return pow(Rational(1) / base, -exponent);
    }
    Integer num = boost::multiprecision::pow(numerator(base), static_cast<unsigned>(exponent));
    Integer den = boost::multiprecision::pow(denominator(base), static_cast<unsigned>(exponent));
    return Rational(num, den);
}

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

/// Parses "p", "-p", "p/q". Floating-point literals are rejected.
inline Rational parse_rational(std::string_view text) {
    auto bad = [&] { return std::invalid_argument("not a rational literal: '" + std::string(text) + "'"); };
    if (text.empty()) throw bad();
    auto slash = text.find('/');
    auto parse_int = [&](std::string_view s, bool allow_sign) {
        if (s.empty()) throw bad();
        std::size_t i = 0;
        if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
        if (i == s.size()) throw bad();
        for (std::size_t k = i; k < s.size(); ++k)
            if (s[k] < '0' || s[k] > '9') throw bad();
        Integer v(std::string(s.substr(s[0] == '+' ? 1 : 0)));
        return v;
    };
    if (slash == std::string_view::npos) return Rational(parse_int(text, true));
    Integer p = parse_int(text.substr(0, slash), true);
    Integer q = parse_int(text.substr(slash + 1), false);
    if (q == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(p, q);
}

/// Nearest double, for reporting and sampling only.
inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// floor(q) as an Integer.
inline Integer floor(const Rational& q) {
    Integer n = numerator(q), d = denominator(q);
    Integer f = n / d;
    if (n < 0 && f * d != n) f -= 1;
    return f;
}

inline Integer ceil(const Rational& q) { return -floor(Rational(-q)); }

}  // namespace roughlab
