#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace tamekit {

// All scalar arithmetic in this library is exact. Int/Rational are
// arbitrary-precision; Rational is kept in lowest terms with a positive
// denominator by the backend.
using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Int num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Int den(const Rational& r) { return boost::multiprecision::denominator(r); }

inline bool is_integer(const Rational& r) { return den(r) == 1; }

inline Int pow_int(Int base, unsigned exp) {
    Int r = 1;
    while (exp) {
        if (exp & 1u) r *= base;
        base *= base;
        exp >>= 1u;
    }
    return r;
}

inline int sign_of(const Rational& r) { return r.sign(); }

/// Renders "n" when the denominator is 1, otherwise "n/d".
inline std::string to_string(const Rational& r) {
    std::string s = num(r).str();
    if (!is_integer(r)) {
        s += '/';
        s += den(r).str();
    }
    return s;
}

inline Rational parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("rational: empty string");
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(Int(s));
    Int n(s.substr(0, slash));
    Int d(s.substr(slash + 1));
    if (d <= 0) throw std::invalid_argument("rational: denominator must be positive in " + s);
    return Rational(n, d);
}

}  // namespace tamekit
