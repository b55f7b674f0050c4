#pragma once

#include <boost/rational.hpp>

#include <stdexcept>
#include <string>

namespace cachezf {

/// Exact rational arithmetic for every bound, budget, and replication-factor
/// comparison. Floating point is confined to the physical-layer solves.
using Rational = boost::rational<long long>;

inline bool is_integer(const Rational& q) { return q.denominator() == 1; }

inline long long rat_floor(const Rational& q) {
    long long d = q.numerator() / q.denominator();
    if (q.numerator() % q.denominator() != 0 && q.numerator() < 0) --d;
    return d;
}

inline long long rat_ceil(const Rational& q) {
    long long d = q.numerator() / q.denominator();
    if (q.numerator() % q.denominator() != 0 && q.numerator() > 0) ++d;
    return d;
}

/// Nearest integer, ties away from zero.
inline long long rat_round(const Rational& q) {
    const Rational half(1, 2);
    return q >= 0 ? rat_floor(q + half) : rat_ceil(q - half);
}

/// "3" for integers, "5/2" otherwise.
inline std::string to_string(const Rational& q) {
    if (is_integer(q)) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

/// Parses "3", "-4" or "5/2". Throws std::invalid_argument on malformed input.
inline Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(s));
        long long num = std::stoll(s.substr(0, slash));
        long long den = std::stoll(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational: '" + s + "'");
    }
}

}  // namespace cachezf
