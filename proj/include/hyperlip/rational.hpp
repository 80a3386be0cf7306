#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

#include "hyperlip/error.hpp"

namespace hyperlip {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using RatVec = std::vector<Rational>;
using RatMat = std::vector<std::vector<Rational>>;

// Parses "p/q", "-p/q" or a bare integer string. Lowest terms and positive
// denominator are maintained by the number type itself.
Rational parse_rational(const std::string& text);

// "p/q" when the denominator is not 1, otherwise just "p".
std::string rat_to_string(const Rational& r);

inline BigInt rat_num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt rat_den(const Rational& r) { return boost::multiprecision::denominator(r); }

inline Rational rat_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

Rational rat_pow(const Rational& base, int exp); // exp may be negative

RatMat mat_identity_q(int d);
RatMat mat_transpose_q(const RatMat& m);
RatMat mat_mul_q(const RatMat& a, const RatMat& b);
RatVec mat_apply_q(const RatMat& m, const RatVec& v);
bool mat_is_orthogonal_q(const RatMat& m);

} // namespace hyperlip
