#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

#include "lifespan/errors.hpp"

namespace lifespan {

// Exact arithmetic backbone: arbitrary-precision integers under an exact
// rational type. All exponent identities are asserted with zero tolerance,
// so nothing in this layer may round.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// 128-bit-equivalent binary float used by high-precision oracles.
using Quad = boost::multiprecision::cpp_bin_float_quad;

inline double to_double(const Rational& r) { return static_cast<double>(r); }

inline Quad to_quad(const Rational& r) {
    return Quad(boost::multiprecision::numerator(r)) / Quad(boost::multiprecision::denominator(r));
}

std::string rational_to_string(const Rational& r);

// Accepts "3", "-4/7", and decimal literals such as "2.5" (converted exactly).
Rational parse_rational(const std::string& text);

std::vector<double> to_double_vector(const std::vector<Rational>& v);

}  // namespace lifespan
